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

// Acceptance suite: exercises the full toolkit, one numbered criterion per
// check, each printed as a single [PASS]/[FAIL] line. Runs the real CLI
// binary for the end-to-end criteria.
//
// Usage: acceptance <path-to-cli> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "lowlight/color.hpp"
#include "lowlight/crf.hpp"
#include "lowlight/dataset.hpp"
#include "lowlight/degrade.hpp"
#include "lowlight/json_util.hpp"
#include "lowlight/metrics.hpp"
#include "lowlight/png_io.hpp"
#include "testutil.hpp"

using namespace lowlight;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scratch;
int g_failures = 0;

void report(int number, bool pass, const std::string& what,
            const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", number,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >" +
                            (g_scratch / "cli_stdout.txt").string() + " 2>" +
                            (g_scratch / "cli_stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Fixtures

// 200 monotone response curves in the text record format.
void write_curve_file(const fs::path& path, int count) {
    std::ofstream out(path);
    out.precision(9);
    for (int c = 0; c < count; ++c) {
        out << "fixture_curve_" << c << "\n";
        out << "type: synthetic fixture\n";
        out << "I =";
        for (int i = 0; i < kCurveSamples; ++i) out << " " << i / 1023.0;
        out << "\nB =";
        if (c % 4 == 3) {
            // S-shaped family.
            const double p = 0.7 + 0.02 * (c % 40);
            for (int i = 0; i < kCurveSamples; ++i) {
                const double x = i / 1023.0;
                const double s = x * x * (3.0 - 2.0 * x);
                out << " " << std::pow(s, 1.0 / p);
            }
        } else {
            const double g = 0.4 + 2.8 * c / count;
            for (int i = 0; i < kCurveSamples; ++i)
                out << " " << std::pow(i / 1023.0, 1.0 / g);
        }
        out << "\n";
    }
}

void write_corpus(const fs::path& dir, int n, int width, int height) {
    fs::create_directories(dir);
    for (int i = 0; i < n; ++i) {
        char name[24];
        std::snprintf(name, sizeof name, "img_%04d.png", i);
        save_png(testutil::make_test_image(width, height, 31337 + i),
                 dir / name);
    }
}

// ---------------------------------------------------------------------------
// Criteria

void criterion_1_crf_roundtrip() {
    const fs::path file = g_scratch / "curves_200.txt";
    write_curve_file(file, 200);

    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(file);
    const auto db = load_dorf(in, file.string());
    double max_err = 0.0;
    for (const auto& curve : db.curves)
        for (int i = 0; i < kCurveSamples; ++i) {
            const double x = i / 1023.0;
            const double rt = apply_scalar(curve, invert_scalar(curve, x));
            max_err = std::max(max_err, std::abs(rt - x));
        }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const bool pass = db.curves.size() == 200 && max_err <= 1e-3 && seconds < 5.0;
    report(1, pass, "CRF round-trip",
           "max |apply(invert(x)) - x| = " + fmt(max_err) + " over " +
               std::to_string(db.curves.size()) + " curves in " + fmt(seconds) +
               " s");
}

void criterion_2_analytic_k() {
    PipelineConfig config;
    config.epsilon_min = config.epsilon_max = 0.0;
    config.gamma_min = config.gamma_max = 0.05;
    config.shot_min = config.shot_max = 0.0;
    config.read_min = config.read_max = 0.0;
    config.use_crf = false;

    const auto img = testutil::make_test_image(96, 96, 4242);
    const auto pair = synthesize_pair(img, CrfDatabase{}, config, 99);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < pair.bright.samples().size(); ++i)
        max_diff = std::max(max_diff, std::abs(pair.bright.samples()[i] -
                                               pair.dark.samples()[i]));
    const double k_err = std::abs(pair.record.k - 20.0);
    const bool pass = k_err <= 1e-6 && max_diff <= 1e-6;
    report(2, pass, "Analytic k",
           "|k - 20| = " + fmt(k_err) + ", max |L - H| = " + fmt(max_diff));
}

void criterion_3_sampling_ranges() {
    const auto img = testutil::make_test_image(8, 8, 5);
    const auto db = synthetic_database();
    PipelineConfig config;
    int out_of_range = 0;
    const int n = 10000;
    double gamma_lo = 1.0, gamma_hi = 0.0, eps_lo = 1.0, eps_hi = -1.0;
    for (int i = 0; i < n; ++i) {
        const auto pair =
            synthesize_pair(img, db, config, Rng::derive_seed(2024, i));
        const auto& p = pair.record.params;
        if (!(p.gamma > 0.01 && p.gamma < 0.09)) ++out_of_range;
        if (!(p.epsilon > -0.1 && p.epsilon < 0.1)) ++out_of_range;
        gamma_lo = std::min(gamma_lo, p.gamma);
        gamma_hi = std::max(gamma_hi, p.gamma);
        eps_lo = std::min(eps_lo, p.epsilon);
        eps_hi = std::max(eps_hi, p.epsilon);
    }
    report(3, out_of_range == 0, "Sampling ranges",
           std::to_string(n) + " pairs, gamma in [" + fmt(gamma_lo) + ", " +
               fmt(gamma_hi) + "], epsilon in [" + fmt(eps_lo) + ", " +
               fmt(eps_hi) + "], " + std::to_string(out_of_range) +
               " out-of-range draws");
}

void criterion_4_noise_statistics() {
    const double shot = 1e-3, read = 1e-2, x = 0.5;
    const double expected = shot * x + read * read; // 6e-4
    const auto img =
        ImageF::constant(300, 300, 3, x, ColorSpace::kLinearRgb, Range::kUnit);
    Rng rng(808);
    const auto noisy = add_noise(img, shot, read, rng);

    double sum = 0.0, sq = 0.0;
    for (double v : noisy.samples()) {
        sum += v - x;
        sq += (v - x) * (v - x);
    }
    const double n = static_cast<double>(noisy.samples().size());
    const double var = sq / n - (sum / n) * (sum / n);
    const bool pass = var >= 0.9 * expected && var <= 1.1 * expected;
    report(4, pass, "Noise statistics",
           "empirical variance " + fmt(var) + " vs configured " +
               fmt(expected) + " over " + fmt(n) + " samples");
}

void criterion_5_metric_oracles() {
    // PSNR against a plain two-loop MSE oracle.
    double max_psnr_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = testutil::make_random_image(8, 8, 10000 + trial);
        const auto b = testutil::make_random_image(8, 8, 20000 + trial);
        double sum = 0.0;
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                for (int c = 0; c < 3; ++c) {
                    const double d = a.at(x, y, c) - b.at(x, y, c);
                    sum += d * d;
                }
        const double oracle = 10.0 * std::log10(1.0 / (sum / 192.0));
        max_psnr_err = std::max(max_psnr_err, std::abs(psnr(a, b) - oracle));
    }

    // SSIM against a direct per-window oracle (2D weights, weighted moments).
    double max_ssim_err = 0.0;
    {
        const int win = 11;
        const double sigma = 1.5;
        double weights[11][11];
        double wsum = 0.0;
        for (int i = 0; i < win; ++i)
            for (int j = 0; j < win; ++j) {
                const double dy = i - win / 2, dx = j - win / 2;
                weights[i][j] =
                    std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
                wsum += weights[i][j];
            }
        for (int i = 0; i < win; ++i)
            for (int j = 0; j < win; ++j) weights[i][j] /= wsum;
        const double c1 = 1e-4, c2 = 9e-4;

        for (int trial = 0; trial < 20; ++trial) {
            const auto a = testutil::make_random_image(16, 16, 30000 + trial);
            const auto b = testutil::make_random_image(16, 16, 40000 + trial);
            double channel_sum = 0.0;
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                int windows = 0;
                for (int y0 = 0; y0 + win <= 16; ++y0)
                    for (int x0 = 0; x0 + win <= 16; ++x0) {
                        double mu_x = 0.0, mu_y = 0.0;
                        for (int i = 0; i < win; ++i)
                            for (int j = 0; j < win; ++j) {
                                mu_x += weights[i][j] * a.at(x0 + j, y0 + i, c);
                                mu_y += weights[i][j] * b.at(x0 + j, y0 + i, c);
                            }
                        double vx = 0.0, vy = 0.0, cov = 0.0;
                        for (int i = 0; i < win; ++i)
                            for (int j = 0; j < win; ++j) {
                                const double dx =
                                    a.at(x0 + j, y0 + i, c) - mu_x;
                                const double dy =
                                    b.at(x0 + j, y0 + i, c) - mu_y;
                                vx += weights[i][j] * dx * dx;
                                vy += weights[i][j] * dy * dy;
                                cov += weights[i][j] * dx * dy;
                            }
                        acc += ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) /
                               ((mu_x * mu_x + mu_y * mu_y + c1) *
                                (vx + vy + c2));
                        ++windows;
                    }
                channel_sum += acc / windows;
            }
            max_ssim_err = std::max(
                max_ssim_err, std::abs(ssim(a, b) - channel_sum / 3.0));
        }
    }

    // Analytic case: a difference of exactly the double 0.1 gives the MSE
    // closest to 0.01 and exactly 20 dB; a full constant image holds 20 dB
    // within summation rounding.
    const auto hi =
        ImageF::constant(1, 1, 1, 0.1, ColorSpace::kSrgb, Range::kUnit);
    const auto lo =
        ImageF::constant(1, 1, 1, 0.0, ColorSpace::kSrgb, Range::kUnit);
    const double analytic = psnr(hi, lo);
    const auto hi_full =
        ImageF::constant(8, 8, 3, 0.6, ColorSpace::kSrgb, Range::kUnit);
    const auto lo_full =
        ImageF::constant(8, 8, 3, 0.5, ColorSpace::kSrgb, Range::kUnit);
    const double analytic_full_err = std::abs(psnr(hi_full, lo_full) - 20.0);

    const bool pass = max_psnr_err <= 1e-9 && max_ssim_err <= 1e-6 &&
                      analytic == 20.0 && analytic_full_err <= 1e-9;
    report(5, pass, "Metric oracles",
           "psnr err " + fmt(max_psnr_err) + " (100 pairs), ssim err " +
               fmt(max_ssim_err) + " (20 pairs), analytic case " +
               format_double(analytic) + " dB");
}

void criterion_6_loss_formulas() {
    const auto a = testutil::make_random_image(16, 16, 606);
    const auto b = testutil::make_random_image(16, 16, 707);
    const IdentityExtractor identity;
    const bool identity_exact =
        perceptual_loss(identity, "identity", a, b) == l1_loss(a, b);

    const auto losses = cgan_losses(DiscriminatorScores({0.5, 0.5}, {0.5, 0.5}));
    const double d_err = std::abs(losses.d_loss - 2.0 * std::log(2.0));
    const double g_err = std::abs(losses.g_loss - std::log(2.0));

    // lambda = 100: hand-computed combinations.
    const bool combined_ok =
        combined_objective(0.5, 0.01) == 0.5 + 100.0 * 0.01 &&
        combined_objective(0.5, 0.01, 100.0) == 1.5 &&
        combined_objective(1.25, 0.002, 100.0) == 1.25 + 100.0 * 0.002 &&
        combined_objective(0.7, 0.3, 0.0) == 0.7;

    const bool pass =
        identity_exact && d_err <= 1e-12 && g_err <= 1e-12 && combined_ok;
    report(6, pass, "Loss formulas",
           std::string("identity==l1 ") + (identity_exact ? "exact" : "MISMATCH") +
               ", cgan errs (" + fmt(d_err) + ", " + fmt(g_err) +
               "), lambda=100 combination " + (combined_ok ? "ok" : "WRONG"));
}

void criterion_7_determinism() {
    const fs::path corpus = g_scratch / "det_corpus";
    write_corpus(corpus, 12, 64, 56);
    const std::string base = "gen --input " + corpus.string() +
                             " --seed 1234 --size 48 --output ";
    const fs::path out_a = g_scratch / "det_a";
    const fs::path out_b = g_scratch / "det_b";
    const fs::path out_c = g_scratch / "det_c";
    bool pass = run_cli(base + out_a.string() + " --workers 1") == 0 &&
                run_cli(base + out_b.string() + " --workers 1") == 0 &&
                run_cli(base + out_c.string() + " --workers 8") == 0;

    std::string detail;
    if (pass) {
        const auto manifest_a = testutil::read_file(out_a / kManifestFilename);
        pass = manifest_a == testutil::read_file(out_b / kManifestFilename) &&
               manifest_a == testutil::read_file(out_c / kManifestFilename);
        detail = pass ? "manifests byte-identical (workers 1 and 8)"
                      : "manifest bytes differ";

        const auto manifest = load_manifest(out_a / kManifestFilename);
        for (const auto& record : manifest.records) {
            const auto bright = testutil::read_file(out_a / record.bright_path);
            const auto dark = testutil::read_file(out_a / record.dark_path);
            if (bright != testutil::read_file(out_b / record.bright_path) ||
                bright != testutil::read_file(out_c / record.bright_path) ||
                dark != testutil::read_file(out_b / record.dark_path) ||
                dark != testutil::read_file(out_c / record.dark_path)) {
                pass = false;
                detail = "image bytes differ for " + record.bright_path;
                break;
            }
        }

        // Replay every stored record from its parameters.
        if (pass) {
            const auto paths = ingest(corpus).paths;
            const auto db = synthetic_database();
            int max_diff = 0;
            for (std::size_t i = 0; i < manifest.records.size() && pass; ++i) {
                const auto& record = manifest.records[i];
                const auto prepared = prepare(
                    expand_to_rgb(load_image(paths[i])), manifest.config.size);
                const auto pair = synthesize_pair(prepared, db, manifest.config,
                                                  record.params.seed);
                const auto stored =
                    quantize8(load_image(out_a / record.dark_path));
                const auto replayed = quantize8(pair.dark);
                for (std::size_t s = 0; s < stored.size(); ++s)
                    max_diff = std::max(
                        max_diff, std::abs(static_cast<int>(stored[s]) -
                                           static_cast<int>(replayed[s])));
            }
            pass = pass && max_diff <= 1;
            detail += ", replay max channel diff " + std::to_string(max_diff);
        }
    } else {
        detail = "gen run failed";
    }
    report(7, pass, "Determinism", detail);
}

void criterion_8_lab_fidelity() {
    const auto img = testutil::make_random_image(100, 100, 888);
    const auto back = lab_to_rgb(rgb_to_lab(img));
    double sq = 0.0;
    for (std::size_t i = 0; i < img.samples().size(); ++i) {
        const double d = img.samples()[i] - back.samples()[i];
        sq += d * d;
    }
    const double rms =
        std::sqrt(sq / static_cast<double>(img.samples().size()));

    ImageF white(1, 1, 3, ColorSpace::kSrgb, Range::kUnit);
    white.at(0, 0, 0) = white.at(0, 0, 1) = white.at(0, 0, 2) = 1.0;
    const auto white_lab = rgb_to_lab(white);
    const double white_err = std::abs(white_lab.at(0, 0, 0) - 100.0);

    double max_chroma = 0.0;
    for (int i = 0; i <= 100; ++i) {
        ImageF gray(1, 1, 3, ColorSpace::kSrgb, Range::kUnit);
        gray.at(0, 0, 0) = gray.at(0, 0, 1) = gray.at(0, 0, 2) = i / 100.0;
        const auto lab = rgb_to_lab(gray);
        max_chroma = std::max({max_chroma, std::abs(lab.at(0, 0, 1)),
                               std::abs(lab.at(0, 0, 2))});
    }

    const bool pass = rms <= 1e-4 && white_err <= 1e-3 && max_chroma <= 1e-3;
    report(8, pass, "LAB fidelity",
           "round-trip RMS " + fmt(rms) + " (1e4 pixels), |L_white - 100| = " +
               fmt(white_err) + ", gray-axis max |a|,|b| = " + fmt(max_chroma));
}

void criterion_9_end_to_end() {
    const fs::path corpus = g_scratch / "e2e_corpus";
    write_corpus(corpus, 100, 320, 280);

    const double read_sigmas[3] = {3e-3, 1e-2, 3e-2};
    double mean_psnrs[3] = {0, 0, 0};
    bool pass = true;
    double first_seconds = 0.0;
    std::string detail;

    for (int cfg = 0; cfg < 3 && pass; ++cfg) {
        PipelineConfig config;
        config.shot_min = config.shot_max = 1e-4;
        config.read_min = config.read_max = read_sigmas[cfg];
        config.size = 256;
        const fs::path config_path =
            g_scratch / ("e2e_config_" + std::to_string(cfg) + ".json");
        {
            std::ofstream out(config_path);
            out << config_to_json(config);
        }
        const fs::path out_dir = g_scratch / ("e2e_out_" + std::to_string(cfg));
        const fs::path report_path =
            g_scratch / ("e2e_report_" + std::to_string(cfg) + ".json");

        const auto t0 = std::chrono::steady_clock::now();
        if (run_cli("gen --input " + corpus.string() + " --output " +
                    out_dir.string() + " --seed 777 --config " +
                    config_path.string()) != 0) {
            pass = false;
            detail = "gen failed for config " + std::to_string(cfg);
            break;
        }
        if (run_cli("eval --manifest " +
                    (out_dir / kManifestFilename).string() + " --report " +
                    report_path.string()) != 0) {
            pass = false;
            detail = "eval failed for config " + std::to_string(cfg);
            break;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (cfg == 0) first_seconds = seconds;

        nlohmann::json scores;
        {
            std::ifstream in(report_path);
            in >> scores;
        }
        if (scores.at("per_image").size() != 100) {
            pass = false;
            detail = "expected 100 scored pairs";
            break;
        }
        for (const auto& row : scores.at("per_image")) {
            const double p = row.at("psnr").get<double>();
            const double s = row.at("ssim").get<double>();
            if (!std::isfinite(p) || !(s >= 0.0 && s <= 1.0)) {
                pass = false;
                detail = "non-finite psnr or ssim outside [0, 1]";
                break;
            }
        }
        mean_psnrs[cfg] = scores.at("aggregate").at("mean_psnr").get<double>();
    }

    if (pass) {
        pass = first_seconds < 60.0 && mean_psnrs[0] > mean_psnrs[1] &&
               mean_psnrs[1] > mean_psnrs[2];
        detail = "gen+eval " + fmt(first_seconds) + " s for 100 pairs; mean psnr " +
                 fmt(mean_psnrs[0]) + " > " + fmt(mean_psnrs[1]) + " > " +
                 fmt(mean_psnrs[2]) + " as read noise rises";
    }
    report(9, pass, "End-to-end", detail);
}

void criterion_10_ablation_plumbing() {
    const fs::path corpus = g_scratch / "abl_corpus";
    write_corpus(corpus, 4, 40, 36);

    bool pass = true;
    std::string detail;
    auto fail = [&](const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    };

    auto gen_with = [&](const std::string& tag) -> Manifest {
        const fs::path out = g_scratch / ("abl_" + tag);
        if (run_cli("gen --input " + corpus.string() + " --output " +
                    out.string() + " --seed 5 --size 24 --ablation " + tag) != 0)
            throw Error("gen failed for ablation " + tag);
        return load_manifest(out / kManifestFilename);
    };

    try {
        const auto no_noise = gen_with("no_noise");
        for (const auto& r : no_noise.records)
            if (r.params.shot_strength != 0.0 || r.params.read_sigma != 0.0)
                fail("no_noise left nonzero strengths");
        if (no_noise.config.shot_max != 0.0 || no_noise.config.read_max != 0.0)
            fail("no_noise config keeps noise ranges");

        const auto no_k = gen_with("no_k");
        for (const auto& r : no_k.records)
            if (r.k != 1.0) fail("no_k left k != 1");

        const auto no_crf = gen_with("no_crf");
        if (no_crf.config.use_crf) fail("no_crf config keeps curves on");
        for (const auto& r : no_crf.records)
            if (r.params.crf_inv_id != "identity" ||
                r.params.crf_fwd_id != "identity")
                fail("no_crf records name non-identity curves");
        // The identity curve's round-trip must be error-free on the grid.
        const auto identity = identity_curve();
        double identity_err = 0.0;
        for (int i = 0; i < kCurveSamples; ++i) {
            const double x = i / 1023.0;
            identity_err = std::max(
                identity_err,
                std::abs(apply_scalar(identity, invert_scalar(identity, x)) - x));
        }
        if (identity_err > 1e-12) fail("identity round-trip error " + fmt(identity_err));

        const auto no_eps = gen_with("no_epsilon");
        for (const auto& r : no_eps.records)
            if (r.params.epsilon != 0.0) fail("no_epsilon left nonzero epsilon");

        const auto no_lab = gen_with("no_lab");
        if (no_lab.config.use_lab) fail("no_lab config keeps LAB emission");
        if (no_lab.config.ablation != "no_lab") fail("ablation tag not echoed");

        // Each tag must leave every other stage enabled.
        if (!no_noise.config.use_crf || !no_noise.config.use_k ||
            !no_noise.config.use_lab)
            fail("no_noise disabled unrelated stages");
        if (no_k.config.shot_max == 0.0 || !no_k.config.use_crf)
            fail("no_k disabled unrelated stages");
        if (no_lab.config.epsilon_max == 0.0 || !no_lab.config.use_k)
            fail("no_lab disabled unrelated stages");
    } catch (const std::exception& e) {
        fail(e.what());
    }

    if (pass)
        detail = "all five tags disable exactly their stage "
                 "(zero strengths / k=1 / identity curves, err 0 / eps=0 / RGB flag)";
    report(10, pass, "Ablation plumbing", detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <path-to-cli> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scratch = argv[2];
    std::error_code ec;
    fs::remove_all(g_scratch, ec);
    fs::create_directories(g_scratch);

    criterion_1_crf_roundtrip();
    criterion_2_analytic_k();
    criterion_3_sampling_ranges();
    criterion_4_noise_statistics();
    criterion_5_metric_oracles();
    criterion_6_loss_formulas();
    criterion_7_determinism();
    criterion_8_lab_fidelity();
    criterion_9_end_to_end();
    criterion_10_ablation_plumbing();

    std::printf("ACCEPTANCE: %d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
