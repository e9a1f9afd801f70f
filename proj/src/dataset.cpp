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

#include "lowlight/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lowlight/color.hpp"
#include "lowlight/json_util.hpp"
#include "lowlight/parallel.hpp"
#include "lowlight/png_io.hpp"

namespace fs = std::filesystem;

namespace lowlight {

namespace {

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return ss.str();
}

void write_params(JsonWriter& w, const DegradeParams& params) {
    w.begin_object("params");
    w.field("epsilon", params.epsilon);
    w.field("gamma", params.gamma);
    w.field("crf_inv_id", params.crf_inv_id);
    w.field("crf_fwd_id", params.crf_fwd_id);
    w.field("shot_strength", params.shot_strength);
    w.field("read_sigma", params.read_sigma);
    w.field("seed", params.seed);
    w.end_object();
}

DegradeParams parse_params(const nlohmann::json& j) {
    DegradeParams p;
    p.epsilon = j.at("epsilon").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.crf_inv_id = j.at("crf_inv_id").get<std::string>();
    p.crf_fwd_id = j.at("crf_fwd_id").get<std::string>();
    p.shot_strength = j.at("shot_strength").get<double>();
    p.read_sigma = j.at("read_sigma").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

} // namespace

IngestResult ingest(const fs::path& dir, std::optional<std::size_t> limit) {
    if (!fs::exists(dir) || !fs::is_directory(dir))
        throw ParseError("ingest: '" + dir.string() +
                         "' is not a readable directory");

    std::vector<fs::path> candidates;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; it != end && !ec;
         it.increment(ec))
        if (it->is_regular_file()) candidates.push_back(it->path());
    if (ec)
        throw ParseError("ingest: cannot scan '" + dir.string() +
                         "': " + ec.message());
    std::sort(candidates.begin(), candidates.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });

    IngestResult result;
    for (const auto& path : candidates) {
        if (limit && result.paths.size() >= *limit) break;
        try {
            load_image(path); // decodability probe
            result.paths.push_back(path);
        } catch (const ParseError&) {
            ++result.skipped;
        } catch (const IoError&) {
            ++result.skipped;
        }
    }
    if (result.paths.empty())
        throw ParseError("ingest: no decodable images in '" + dir.string() + "'");
    return result;
}

ImageF resize_bilinear(const ImageF& img, int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0)
        throw ContractError("resize_bilinear: output dimensions must be positive");
    if (out_width == img.width() && out_height == img.height()) return img;

    ImageF out(out_width, out_height, img.channels(), img.colorspace(),
               img.range());
    const double sx = static_cast<double>(img.width()) / out_width;
    const double sy = static_cast<double>(img.height()) / out_height;
    for (int y = 0; y < out_height; ++y) {
        const double src_y = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                        static_cast<double>(img.height() - 1));
        const int y0 = static_cast<int>(src_y);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double fy = src_y - y0;
        for (int x = 0; x < out_width; ++x) {
            const double src_x = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                            static_cast<double>(img.width() - 1));
            const int x0 = static_cast<int>(src_x);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double fx = src_x - x0;
            for (int c = 0; c < img.channels(); ++c) {
                const double top = img.at(x0, y0, c) * (1.0 - fx) +
                                   img.at(x1, y0, c) * fx;
                const double bottom = img.at(x0, y1, c) * (1.0 - fx) +
                                      img.at(x1, y1, c) * fx;
                out.at(x, y, c) = top * (1.0 - fy) + bottom * fy;
            }
        }
    }
    return out;
}

ImageF prepare(const ImageF& img, int size) {
    if (size <= 0) throw ContractError("prepare: size must be positive");

    const int w = img.width();
    const int h = img.height();
    int out_w, out_h;
    if (w <= h) {
        out_w = size;
        out_h = std::max(size, static_cast<int>(std::lround(
                                   static_cast<double>(h) * size / w)));
    } else {
        out_h = size;
        out_w = std::max(size, static_cast<int>(std::lround(
                                   static_cast<double>(w) * size / h)));
    }
    ImageF resized = resize_bilinear(img, out_w, out_h);

    const int x0 = (out_w - size) / 2;
    const int y0 = (out_h - size) / 2;
    if (x0 == 0 && y0 == 0 && out_w == size && out_h == size) return resized;

    ImageF out(size, size, resized.channels(), resized.colorspace(),
               resized.range());
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < resized.channels(); ++c)
                out.at(x, y, c) = resized.at(x0 + x, y0 + y, c);
    return out;
}

std::string manifest_to_json(const Manifest& manifest) {
    JsonWriter w;
    w.begin_object();
    w.field("version", manifest.version);
    w.field("global_seed", manifest.global_seed);

    w.begin_object("config");
    // Keep field order in sync with config_to_json.
    w.field("epsilon_min", manifest.config.epsilon_min);
    w.field("epsilon_max", manifest.config.epsilon_max);
    w.field("gamma_min", manifest.config.gamma_min);
    w.field("gamma_max", manifest.config.gamma_max);
    w.field("shot_min", manifest.config.shot_min);
    w.field("shot_max", manifest.config.shot_max);
    w.field("read_min", manifest.config.read_min);
    w.field("read_max", manifest.config.read_max);
    w.field("use_crf", manifest.config.use_crf);
    w.field("use_k", manifest.config.use_k);
    w.field("use_lab", manifest.config.use_lab);
    w.field("noise_after_gamma", manifest.config.noise_after_gamma);
    w.field("size", static_cast<std::int64_t>(manifest.config.size));
    w.field("crf_source", manifest.config.crf_source);
    w.field("ablation", manifest.config.ablation);
    w.end_object();

    w.field("corpus_mean_intensity", manifest.corpus_mean_intensity);

    w.begin_array("records");
    for (const auto& record : manifest.records) {
        w.begin_object();
        w.field("bright_path", record.bright_path);
        w.field("dark_path", record.dark_path);
        w.field("k", record.k);
        write_params(w, record.params);
        w.end_object();
    }
    w.end_array();

    w.begin_array("skips");
    for (const auto& skip : manifest.skips) {
        w.begin_object();
        w.field("index", skip.index);
        w.field("source", skip.source);
        w.field("reason", skip.reason);
        w.end_object();
    }
    w.end_array();

    w.end_object();
    return w.str();
}

Manifest manifest_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest: invalid JSON: ") + e.what());
    }

    Manifest m;
    try {
        m.version = j.at("version").get<std::string>();
        m.global_seed = j.at("global_seed").get<std::uint64_t>();
        m.config = config_from_json(j.at("config").dump());
        m.corpus_mean_intensity = j.at("corpus_mean_intensity").get<double>();
        for (const auto& r : j.at("records")) {
            PairRecord record;
            record.bright_path = r.at("bright_path").get<std::string>();
            record.dark_path = r.at("dark_path").get<std::string>();
            record.k = r.at("k").get<double>();
            record.params = parse_params(r.at("params"));
            m.records.push_back(std::move(record));
        }
        if (j.contains("skips")) {
            for (const auto& s : j.at("skips")) {
                SkipRecord skip;
                skip.index = s.at("index").get<std::uint64_t>();
                skip.source = s.at("source").get<std::string>();
                skip.reason = s.at("reason").get<std::string>();
                m.skips.push_back(std::move(skip));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest: missing or bad field: ") +
                         e.what());
    }
    return m;
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
    const std::string text = manifest_to_json(manifest);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("save_manifest: cannot open '" + tmp.string() + "'");
        out << text;
        if (!out) throw IoError("save_manifest: write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("save_manifest: rename to '" + path.string() +
                      "' failed: " + ec.message());
}

Manifest load_manifest(const fs::path& path) {
    return manifest_from_json(read_text_file(path));
}

CrfDatabase load_curve_database(const PipelineConfig& config) {
    if (!config.use_crf) return {};
    if (config.crf_source.empty()) return synthetic_database();
    std::ifstream in(config.crf_source, std::ios::binary);
    if (!in)
        throw IoError("cannot open curve file '" + config.crf_source + "'");
    return load_dorf(in, config.crf_source);
}

Manifest generate(const fs::path& corpus_dir, const fs::path& out_dir,
                  const PipelineConfig& config, std::uint64_t seed,
                  const GenerateOptions& options) {
    validate_config(config);
    const CrfDatabase db = load_curve_database(config);

    const IngestResult corpus = ingest(corpus_dir, options.limit);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("generate: cannot create '" + out_dir.string() +
                      "': " + ec.message());

    struct Slot {
        bool ok = false;
        PairRecord record;
        std::string skip_reason;
        std::uint64_t bright_sum = 0; // sum of quantized bright samples
        std::uint64_t bright_count = 0;
    };
    std::vector<Slot> slots(corpus.paths.size());

    parallel_for(corpus.paths.size(), options.workers, [&](std::size_t i) {
        Slot& slot = slots[i];
        ImageF source(1, 1, 1, ColorSpace::kSrgb, Range::kUnit);
        try {
            source = load_image(corpus.paths[i]);
        } catch (const Error&) {
            slot.skip_reason = "decode_failed";
            return;
        }
        const ImageF prepared = prepare(expand_to_rgb(source), config.size);

        SynthesizedPair pair;
        try {
            pair = synthesize_pair(prepared, db, config,
                                   Rng::derive_seed(seed, i));
        } catch (const DegenerateImageError&) {
            slot.skip_reason = "degenerate_k";
            return;
        }

        const std::string stem = std::to_string(i);
        pair.record.bright_path = stem + "_bright.png";
        pair.record.dark_path = stem + "_dark.png";
        save_png(pair.bright, out_dir / pair.record.bright_path);
        save_png(pair.dark, out_dir / pair.record.dark_path);

        // Corpus statistics come from the quantized samples, so a verifier
        // re-reading the stored files reproduces them exactly.
        const auto bytes = quantize8(pair.bright);
        std::uint64_t sum = 0;
        for (std::uint8_t b : bytes) sum += b;
        slot.bright_sum = sum;
        slot.bright_count = bytes.size();
        slot.record = std::move(pair.record);
        slot.ok = true;
    });

    Manifest manifest;
    manifest.global_seed = seed;
    manifest.config = config;

    std::uint64_t total_sum = 0, total_count = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].ok) {
            total_sum += slots[i].bright_sum;
            total_count += slots[i].bright_count;
            manifest.records.push_back(std::move(slots[i].record));
        } else {
            manifest.skips.push_back(
                {i, corpus.paths[i].filename().string(), slots[i].skip_reason});
        }
    }
    if (manifest.records.empty())
        throw DegenerateImageError("generate: every corpus image was skipped");
    manifest.corpus_mean_intensity =
        static_cast<double>(total_sum) / (255.0 * static_cast<double>(total_count));

    save_manifest(manifest, out_dir / kManifestFilename);
    return manifest;
}

VerifyReport verify_dataset(const fs::path& manifest_path,
                            const std::optional<fs::path>& corpus_dir) {
    const Manifest manifest = load_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();

    VerifyReport report;
    report.manifest_mean = manifest.corpus_mean_intensity;

    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& record : manifest.records) {
        try {
            const ImageF bright = load_image(base / record.bright_path);
            for (double v : bright.samples()) sum += v;
            count += bright.sample_count();
            ++report.records_checked;
        } catch (const Error& e) {
            report.issues.push_back(record.bright_path + ": " + e.what());
        }
    }
    if (count > 0) {
        report.recomputed_mean = sum / static_cast<double>(count);
        report.mean_ok =
            std::abs(report.recomputed_mean - manifest.corpus_mean_intensity) <=
            1e-6;
    }

    if (!corpus_dir) return report;

    const CrfDatabase db = load_curve_database(manifest.config);
    const auto paths = ingest(*corpus_dir).paths;
    for (const auto& record : manifest.records) {
        // Filenames carry the corpus index: <index>_bright.png.
        std::size_t index = 0;
        try {
            index = std::stoull(record.bright_path);
        } catch (const std::exception&) {
            report.issues.push_back(record.bright_path + ": unparsable index");
            continue;
        }
        if (index >= paths.size()) {
            report.issues.push_back(record.bright_path +
                                    ": index beyond the corpus");
            continue;
        }
        try {
            const ImageF prepared = prepare(
                expand_to_rgb(load_image(paths[index])), manifest.config.size);
            const SynthesizedPair pair = synthesize_pair(
                prepared, db, manifest.config, record.params.seed);
            if (pair.record.params.gamma != record.params.gamma ||
                pair.record.params.crf_inv_id != record.params.crf_inv_id ||
                pair.record.params.crf_fwd_id != record.params.crf_fwd_id ||
                pair.record.k != record.k) {
                report.issues.push_back(record.bright_path +
                                        ": replayed parameters differ");
                continue;
            }
            const auto stored = quantize8(load_image(base / record.dark_path));
            const auto replayed = quantize8(pair.dark);
            if (stored.size() != replayed.size()) {
                report.issues.push_back(record.dark_path + ": shape differs");
                continue;
            }
            for (std::size_t i = 0; i < stored.size(); ++i)
                report.max_replay_diff =
                    std::max(report.max_replay_diff,
                             std::abs(static_cast<int>(stored[i]) -
                                      static_cast<int>(replayed[i])));
            ++report.replayed;
        } catch (const Error& e) {
            report.issues.push_back(record.bright_path + ": " + e.what());
        }
    }
    report.replay_ok = report.max_replay_diff <= 1;
    return report;
}

PairStream::PairStream(std::vector<fs::path> sources, const CrfDatabase* db,
                       PipelineConfig config, std::uint64_t global_seed)
    : sources_(std::move(sources)), db_(db), config_(std::move(config)),
      global_seed_(global_seed) {
    validate_config(config_);
    if (config_.use_crf && (!db_ || db_->curves.empty()))
        throw ContractError("PairStream: curve database required");
}

std::optional<PairStream::Sample> PairStream::next() {
    static const CrfDatabase kEmptyDb;
    while (index_ < sources_.size()) {
        const std::size_t i = index_++;
        ImageF source(1, 1, 1, ColorSpace::kSrgb, Range::kUnit);
        try {
            source = load_image(sources_[i]);
        } catch (const Error&) {
            continue;
        }
        const ImageF prepared = prepare(expand_to_rgb(source), config_.size);
        SynthesizedPair pair;
        try {
            pair = synthesize_pair(prepared, db_ ? *db_ : kEmptyDb, config_,
                                   Rng::derive_seed(global_seed_, i));
        } catch (const DegenerateImageError&) {
            continue;
        }

        auto to_model = [&](const ImageF& img) {
            return config_.use_lab ? normalize_pm1(rgb_to_lab(img))
                                   : normalize_pm1(img);
        };
        Sample sample;
        sample.input = to_model(pair.dark);
        sample.target = to_model(pair.bright);
        sample.source = sources_[i];
        sample.record = std::move(pair.record);
        return sample;
    }
    return std::nullopt;
}

} // namespace lowlight
