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
#include <string>
#include <vector>

#include "lowlight/crf.hpp"
#include "lowlight/image.hpp"
#include "lowlight/rng.hpp"

namespace lowlight {

/// Every knob of the synthesis pipeline. A config plus a seed fully
/// determines a dataset; the effective config is echoed into every manifest.
struct PipelineConfig {
    // Brightness jitter on the reference image: H = clamp((1 + eps) * img).
    double epsilon_min = -0.1;
    double epsilon_max = 0.1;

    // Darkening weight applied in the linear domain.
    double gamma_min = 0.01;
    double gamma_max = 0.09;

    // Per-pair noise strengths, drawn log-uniformly. shot scales the
    // signal-dependent variance term, read is the additive sigma. A range of
    // [0, 0] disables the corresponding term.
    double shot_min = 1e-4;
    double shot_max = 1e-2;
    double read_min = 1e-3;
    double read_max = 3e-2;

    bool use_crf = true;  // false: treat images as already linear (identity curves)
    bool use_k = true;    // false: skip mean-matching, record k = 1
    bool use_lab = true;  // model-input color space for streamed samples
    // Default inserts noise into the linearized image before darkening;
    // enabling this flips the two stages (noise on the darkened signal).
    bool noise_after_gamma = false;

    int size = 256;         // training crop, pixels
    std::string crf_source; // curve file path; empty selects the built-in family
    std::string ablation = "proposed";
};

/// Throws ContractError on inconsistent ranges or sizes.
void validate_config(const PipelineConfig& config);

std::vector<std::string> ablation_names();

/// Disables exactly one pipeline stage of `base`:
///   no_epsilon -> epsilon range [0, 0]      no_noise -> zero noise ranges
///   no_crf     -> identity curves           no_k     -> k forced to 1
///   no_lab     -> streamed samples stay RGB proposed  -> base unchanged
/// Unknown names raise ContractError listing the valid tags.
PipelineConfig apply_ablation(PipelineConfig base, const std::string& name);

/// apply_ablation over the default config.
PipelineConfig ablation_config(const std::string& name);

/// The full random draw for one synthesized pair. Together with the source
/// image this replays the pair bit-exactly: the noise stream is derived from
/// `seed` alone, independent of the parameter draws.
struct DegradeParams {
    double epsilon = 0.0;
    double gamma = 0.0;
    std::string crf_inv_id;
    std::string crf_fwd_id;
    double shot_strength = 0.0;
    double read_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Manifest entry binding a bright image, its dark counterpart, the scale k,
/// and the draw that produced them.
struct PairRecord {
    std::string bright_path;
    std::string dark_path;
    double k = 1.0;
    DegradeParams params;
};

/// Heteroscedastic Gaussian sensor noise in the linear domain: per sample x,
/// out = clamp(x + n, 0, 1) with Var(n) = shot_strength * x + read_sigma^2.
/// Samples whose variance is zero are passed through untouched (and consume
/// no draws). Negative strengths are contract errors.
ImageF add_noise(const ImageF& img, double shot_strength, double read_sigma,
                 Rng& rng);

/// The low-light model: linearize through g_inv's inverse, inject sensor
/// noise, darken by gamma, and re-render through f. Requires gamma in (0, 1].
ImageF low_light(const ImageF& img, double gamma, const ResponseCurve& g_inv,
                 const ResponseCurve& f, double shot_strength,
                 double read_sigma, Rng& noise_rng,
                 bool noise_after_gamma = false);

/// k = mean(bright) / mean(dark). Throws DegenerateImageError when
/// mean(dark) <= 1e-8.
double compute_k(const ImageF& bright, const ImageF& dark);

struct SynthesizedPair {
    ImageF bright;          // H = clamp((1 + eps) * img)
    ImageF dark;            // L = clamp(k * low)
    double low_mean = 0.0;  // mean of the low image before k-scaling
    PairRecord record;
};

/// Runs the full synthesis for one prepared image. Parameter draws come from
/// the stream derive_seed(seed, 0) in a fixed order (epsilon, gamma, inverse
/// curve, forward curve, shot, read); noise comes from derive_seed(seed, 1).
/// The record's paths are left empty; callers that persist images fill them.
SynthesizedPair synthesize_pair(const ImageF& img, const CrfDatabase& db,
                                const PipelineConfig& config,
                                std::uint64_t seed);

// Config (de)serialization: a single human-readable JSON document holding
// every field of PipelineConfig, floats printed with 17 significant digits.
std::string config_to_json(const PipelineConfig& config, int indent = 2);
PipelineConfig config_from_json(const std::string& text);

} // namespace lowlight
