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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lowlight/degrade.hpp"
#include "lowlight/image.hpp"

namespace lowlight {

inline constexpr const char* kManifestVersion = "1";
inline constexpr const char* kManifestFilename = "manifest.json";

struct IngestResult {
    std::vector<std::filesystem::path> paths; // lexicographic order
    std::size_t skipped = 0;                  // non-image / undecodable files
};

/// Scans a directory (non-recursive) for decodable images. Ordering is
/// lexicographic on filename, so the corpus index of every image is stable
/// across platforms. Throws IoError on unreadable directories and ParseError
/// when nothing decodable is found.
IngestResult ingest(const std::filesystem::path& dir,
                    std::optional<std::size_t> limit = {});

/// Bilinear resampling with half-pixel-centered sampling:
/// src_x = (dst_x + 0.5) * width / out_width - 0.5, clamped to the border.
/// A scale factor of 1 reproduces the input exactly.
ImageF resize_bilinear(const ImageF& img, int out_width, int out_height);

/// Resizes the shorter side to `size` (upscaling smaller images), then
/// center-crops to size x size.
ImageF prepare(const ImageF& img, int size);

struct SkipRecord {
    std::uint64_t index = 0; // corpus index of the skipped image
    std::string source;
    std::string reason;
};

struct Manifest {
    std::string version = kManifestVersion;
    std::uint64_t global_seed = 0;
    PipelineConfig config;
    double corpus_mean_intensity = 0.0; // mean over all stored bright samples
    std::vector<PairRecord> records;
    std::vector<SkipRecord> skips;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);

/// Atomic write: temp file in the target directory, then rename.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

/// The curve database a config names: the file at crf_source, the built-in
/// family when no source is set, or an empty database when curves are
/// disabled.
CrfDatabase load_curve_database(const PipelineConfig& config);

struct GenerateOptions {
    std::optional<std::size_t> limit;
    int workers = 1;
};

/// Materializes a paired dataset: for every ingested image, prepare ->
/// synthesize -> write <index>_bright.png and <index>_dark.png into out_dir,
/// then write the manifest last. Per-image seeds derive from (seed, index),
/// so the output is a pure function of (corpus bytes, config, seed) - worker
/// count and scheduling cannot change a single byte. Degenerate sources are
/// skipped and recorded.
Manifest generate(const std::filesystem::path& corpus_dir,
                  const std::filesystem::path& out_dir,
                  const PipelineConfig& config, std::uint64_t seed,
                  const GenerateOptions& options = {});

struct VerifyReport {
    double manifest_mean = 0.0;
    double recomputed_mean = 0.0;
    bool mean_ok = false;
    std::size_t records_checked = 0;
    std::size_t replayed = 0;  // stays 0 when no corpus is given
    int max_replay_diff = 0;   // worst 8-bit channel difference
    bool replay_ok = true;
    std::vector<std::string> issues;

    bool ok() const { return mean_ok && replay_ok && issues.empty(); }
};

/// Re-checks a written dataset against its manifest: recomputes the corpus
/// mean intensity from the stored bright images (must agree within 1e-6)
/// and, when the source corpus is available, replays every record from its
/// stored parameters and compares against the stored dark image (at most one
/// 8-bit level apart).
VerifyReport verify_dataset(const std::filesystem::path& manifest_path,
                            const std::optional<std::filesystem::path>&
                                corpus_dir = {});

/// In-memory variant of generate for training loops: walks the corpus in
/// ingest order and yields model-convention tensors (LAB or RGB per the
/// config, scaled to [-1, 1]) without touching disk.
class PairStream {
public:
    struct Sample {
        ImageF input;  // dark image, model input convention
        ImageF target; // bright image, model input convention
        std::filesystem::path source;
        PairRecord record; // paths empty: nothing is persisted
    };

    PairStream(std::vector<std::filesystem::path> sources,
               const CrfDatabase* db, PipelineConfig config,
               std::uint64_t global_seed);

    /// Next sample, or nullopt when the corpus is exhausted. Undecodable or
    /// degenerate sources are skipped.
    std::optional<Sample> next();

    void reset() { index_ = 0; }

private:
    std::vector<std::filesystem::path> sources_;
    const CrfDatabase* db_;
    PipelineConfig config_;
    std::uint64_t global_seed_;
    std::size_t index_ = 0;
};

} // namespace lowlight
