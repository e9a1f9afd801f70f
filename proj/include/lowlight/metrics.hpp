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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lowlight/dataset.hpp"
#include "lowlight/image.hpp"

namespace lowlight {

/// Identical images report this instead of an infinite ratio.
inline constexpr double kPsnrCap = 99.0;

/// 10 * log10(1 / MSE) for UNIT images (peak value 1), MSE over all samples.
/// Capped at kPsnrCap; MSE of zero reports the cap exactly.
double psnr(const ImageF& pred, const ImageF& gt);

/// Single-scale structural similarity: 11x11 Gaussian window, sigma 1.5,
/// K1 = 0.01, K2 = 0.03, dynamic range 1. Computed per channel over valid
/// window positions and averaged across channels. Requires both dimensions
/// >= 11.
double ssim(const ImageF& pred, const ImageF& gt);

/// Mean absolute difference over all samples.
double l1_loss(const ImageF& pred, const ImageF& gt);

/// Mean squared difference over all samples.
double l2_loss(const ImageF& pred, const ImageF& gt);

struct FeatureVolume {
    int channels = 0;
    int height = 0;
    int width = 0;
    // Element order is extractor-defined; losses only reduce over the whole
    // volume, so only the multiset of values and c*h*w matter.
    std::vector<double> data;

    std::size_t size() const { return data.size(); }
};

/// A deterministic, shape-stable bank of named feature transforms. This is
/// the seam where a learned feature backbone would plug in; the built-in
/// extractors exist to pin the loss arithmetic down with testable transforms.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual std::vector<std::string> layers() const = 0;
    /// Throws ContractError for unknown layer names.
    virtual FeatureVolume extract(const std::string& layer,
                                  const ImageF& img) const = 0;
};

/// Single layer "identity": the image itself as a (c, h, w) volume.
class IdentityExtractor : public FeatureExtractor {
public:
    std::vector<std::string> layers() const override;
    FeatureVolume extract(const std::string& layer,
                          const ImageF& img) const override;
};

/// Single layer "pool3": non-overlapping 3x3 mean pooling per channel.
class AvgPoolExtractor : public FeatureExtractor {
public:
    std::vector<std::string> layers() const override;
    FeatureVolume extract(const std::string& layer,
                          const ImageF& img) const override;
};

/// Feature-space distance: mean absolute difference of the layer's feature
/// volumes, normalized by c * h * w. With the identity extractor this equals
/// l1_loss exactly.
double perceptual_loss(const FeatureExtractor& extractor,
                       const std::string& layer, const ImageF& pred,
                       const ImageF& gt);

/// Discriminator output probabilities, clamped into [eps, 1 - eps] at
/// construction so the log losses stay finite.
class DiscriminatorScores {
public:
    DiscriminatorScores(std::vector<double> real, std::vector<double> fake,
                        double eps = 1e-7);
    const std::vector<double>& real() const { return real_; }
    const std::vector<double>& fake() const { return fake_; }

private:
    std::vector<double> real_;
    std::vector<double> fake_;
};

struct CganLosses {
    double d_loss = 0.0; // -mean(log real) - mean(log(1 - fake))
    double g_loss = 0.0; // -mean(log fake), non-saturating form
};

CganLosses cgan_losses(const DiscriminatorScores& scores);

/// g_loss + lambda * l1. The default weighting is 100.
double combined_objective(double g_loss, double l1, double lambda = 100.0);

/// Scale estimate without a reference: the constant that brings the input's
/// mean intensity up to the corpus mean. Throws DegenerateImageError for
/// near-black inputs (same threshold as compute_k).
double estimate_k_nonref(double corpus_mean_intensity, const ImageF& input);

struct PairScore {
    std::string id;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct MetricReport {
    std::vector<PairScore> per_image;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    std::string config;               // echo of the evaluation inputs
    std::vector<std::string> skipped; // unmatched or unreadable entries
};

struct EvalPair {
    std::string id;
    std::filesystem::path pred;
    std::filesystem::path gt;
};

/// Pairs files with identical names across two directories. Unmatched names
/// from either side are reported through `skipped`.
std::vector<EvalPair> pairs_from_dirs(const std::filesystem::path& pred_dir,
                                      const std::filesystem::path& gt_dir,
                                      std::vector<std::string>* skipped = nullptr);

/// (dark, bright) pairs of a manifest, paths resolved against base_dir.
std::vector<EvalPair> pairs_from_manifest(const Manifest& manifest,
                                          const std::filesystem::path& base_dir);

/// Scores every pair; per-pair failures (missing file, shape mismatch) are
/// skipped and recorded. Aggregates are the arithmetic means of the
/// per-image rows. Deterministic output order regardless of worker count.
MetricReport evaluate(const std::vector<EvalPair>& pairs, int workers = 1);

std::string report_to_json(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);

/// Writes the JSON report to `json_path` and the flat table next to it with
/// extension .csv.
void save_report(const MetricReport& report,
                 const std::filesystem::path& json_path);

} // namespace lowlight
