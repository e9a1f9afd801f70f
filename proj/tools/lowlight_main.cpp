// Copyright (c) 2026 The lowlight Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands:
//   gen    - materialize a paired dataset from a directory of images
//   eval   - score (pred, gt) pairs with PSNR/SSIM and write a report
//   verify - re-check a written dataset against its manifest
//   crf    - inspect a response-curve file
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
// Progress and logs go to stderr; machine-readable output goes to files.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lowlight/crf.hpp"
#include "lowlight/dataset.hpp"
#include "lowlight/degrade.hpp"
#include "lowlight/json_util.hpp"
#include "lowlight/metrics.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lowlight::IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw lowlight::IoError("read failed for '" + path.string() + "'");
    return ss.str();
}

struct GenArgs {
    std::string input;
    std::string output;
    std::uint64_t seed = 0;
    std::string config_path;
    std::string ablation;
    std::uint64_t limit = 0;
    int workers = 1;
    int size = 0;
};

int run_gen(const GenArgs& args) {
    lowlight::PipelineConfig config;
    if (!args.config_path.empty())
        config = lowlight::config_from_json(read_text_file(args.config_path));
    if (!args.ablation.empty())
        config = lowlight::apply_ablation(config, args.ablation);
    if (args.size > 0) config.size = args.size;

    lowlight::GenerateOptions options;
    if (args.limit > 0) options.limit = args.limit;
    options.workers = args.workers;

    const auto t0 = std::chrono::steady_clock::now();
    lowlight::Manifest manifest;
    try {
        manifest = lowlight::generate(args.input, args.output, config,
                                      args.seed, options);
    } catch (const lowlight::IoError&) {
        std::cerr << "gen: aborted; output in '" << args.output
                  << "' may be partial\n";
        throw;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    std::cerr << "gen: " << manifest.records.size() << " pairs written, "
              << manifest.skips.size() << " skipped\n"
              << "gen: corpus mean intensity "
              << manifest.corpus_mean_intensity << "\n"
              << "gen: " << seconds << " s ("
              << manifest.records.size() / std::max(seconds, 1e-9)
              << " pairs/s)\n"
              << "gen: manifest at "
              << (fs::path(args.output) / lowlight::kManifestFilename).string()
              << "\n";
    return 0;
}

struct EvalArgs {
    std::string pred_dir;
    std::string gt_dir;
    std::string manifest_path;
    std::string report_path;
};

int run_eval(const EvalArgs& args) {
    std::vector<lowlight::EvalPair> pairs;
    lowlight::MetricReport report;

    if (!args.manifest_path.empty()) {
        const auto manifest = lowlight::load_manifest(args.manifest_path);
        pairs = lowlight::pairs_from_manifest(
            manifest, fs::path(args.manifest_path).parent_path());
        report.config = "manifest=" + args.manifest_path;
    } else {
        std::vector<std::string> unmatched;
        pairs = lowlight::pairs_from_dirs(args.pred_dir, args.gt_dir, &unmatched);
        report.config = "pred=" + args.pred_dir + " gt=" + args.gt_dir;
        for (auto& name : unmatched) report.skipped.push_back(std::move(name));
    }

    const int workers = std::max(1u, std::thread::hardware_concurrency());
    lowlight::MetricReport scored = lowlight::evaluate(pairs, workers);
    scored.config = report.config;
    for (auto& s : report.skipped) scored.skipped.push_back(std::move(s));

    lowlight::save_report(scored, args.report_path);
    for (const auto& s : scored.skipped)
        std::cerr << "eval: skipped " << s << "\n";
    if (scored.per_image.empty()) {
        std::cerr << "eval: no pairs could be scored\n";
        return kExitData;
    }
    std::cerr << "eval: " << scored.per_image.size() << " pairs scored\n";
    std::cout << "mean_psnr " << lowlight::format_double(scored.mean_psnr)
              << "\nmean_ssim " << lowlight::format_double(scored.mean_ssim)
              << "\n";
    return 0;
}

struct VerifyArgs {
    std::string manifest_path;
    std::string corpus_dir;
};

int run_verify(const VerifyArgs& args) {
    std::optional<fs::path> corpus;
    if (!args.corpus_dir.empty()) corpus = args.corpus_dir;
    const lowlight::VerifyReport report =
        lowlight::verify_dataset(args.manifest_path, corpus);

    std::cout << "corpus_mean_intensity "
              << (report.mean_ok ? "ok" : "MISMATCH") << " (manifest "
              << lowlight::format_double(report.manifest_mean)
              << ", recomputed "
              << lowlight::format_double(report.recomputed_mean) << ")\n";
    if (corpus)
        std::cout << "replay " << (report.replay_ok ? "ok" : "MISMATCH")
                  << " (" << report.replayed
                  << " records, max channel diff " << report.max_replay_diff
                  << ")\n";
    for (const auto& issue : report.issues)
        std::cerr << "verify: " << issue << "\n";
    if (!report.ok()) {
        std::cerr << "verify: dataset does not match its manifest\n";
        return kExitData;
    }
    std::cerr << "verify: " << report.records_checked << " records checked\n";
    return 0;
}

struct CrfArgs {
    std::string dorf_path;
    bool roundtrip = false;
};

int run_crf(const CrfArgs& args) {
    std::ifstream in(args.dorf_path, std::ios::binary);
    if (!in)
        throw lowlight::IoError("cannot open '" + args.dorf_path + "'");

    lowlight::CrfLoadReport load_report;
    const lowlight::CrfDatabase db =
        lowlight::load_dorf(in, args.dorf_path, &load_report);
    std::cerr << "crf: " << db.curves.size() << " curves loaded, "
              << load_report.repaired.size() << " repaired\n";

    for (const auto& curve : db.curves) {
        std::cout << curve.id;
        if (args.roundtrip) {
            double max_err = 0.0;
            for (int i = 0; i < lowlight::kCurveSamples; ++i) {
                const double x =
                    static_cast<double>(i) / (lowlight::kCurveSamples - 1);
                const double rt = lowlight::apply_scalar(
                    curve, lowlight::invert_scalar(curve, x));
                max_err = std::max(max_err, std::abs(rt - x));
            }
            std::cout << " roundtrip_max_err " << lowlight::format_double(max_err);
        }
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic low-light paired dataset toolkit"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand(
        "gen", "Generate a paired (bright, dark) dataset from an image directory");
    gen->add_option("--input", gen_args.input, "Directory of source images")
        ->required();
    gen->add_option("--output", gen_args.output, "Output dataset directory")
        ->required();
    gen->add_option("--seed", gen_args.seed, "Global seed")->required();
    gen->add_option("--config", gen_args.config_path,
                    "Pipeline config JSON (defaults used when omitted)");
    gen->add_option("--ablation", gen_args.ablation,
                    "Disable one stage: no_epsilon, no_noise, no_crf, no_k, "
                    "no_lab (or proposed)");
    gen->add_option("--limit", gen_args.limit, "Process at most N images");
    gen->add_option("--workers", gen_args.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    gen->add_option("--size", gen_args.size, "Training crop size override");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Score image pairs with PSNR/SSIM");
    auto* pred_opt =
        eval->add_option("--pred", eval_args.pred_dir, "Directory of predictions");
    auto* gt_opt = eval->add_option("--gt", eval_args.gt_dir,
                                    "Directory of ground-truth images");
    auto* manifest_opt = eval->add_option(
        "--manifest", eval_args.manifest_path,
        "Score a generated dataset (dark vs bright) from its manifest");
    eval->add_option("--report", eval_args.report_path,
                     "Report path (JSON; a .csv sibling is written too)")
        ->required();
    pred_opt->needs(gt_opt);
    gt_opt->needs(pred_opt);
    manifest_opt->excludes(pred_opt);

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand(
        "verify", "Re-check a generated dataset against its manifest");
    verify->add_option("--manifest", verify_args.manifest_path,
                       "Manifest of the dataset to verify")
        ->required();
    verify->add_option("--corpus", verify_args.corpus_dir,
                       "Source corpus; enables bit-exact replay of every record");

    CrfArgs crf_args;
    auto* crf = app.add_subcommand("crf", "Inspect a response-curve file");
    crf->add_option("--dorf", crf_args.dorf_path, "Curve file")->required();
    crf->add_flag("--roundtrip", crf_args.roundtrip,
                  "Print per-curve max apply(invert(x)) - x error over a "
                  "1024-point grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (eval->parsed()) {
            if (eval_args.manifest_path.empty() && eval_args.pred_dir.empty()) {
                std::cerr << "eval: either --manifest or --pred/--gt is required\n";
                return kExitUsage;
            }
            return run_eval(eval_args);
        }
        if (verify->parsed()) return run_verify(verify_args);
        if (crf->parsed()) return run_crf(crf_args);
    } catch (const lowlight::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const lowlight::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
