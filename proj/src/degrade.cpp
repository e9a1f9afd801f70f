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

#include "lowlight/degrade.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lowlight/json_util.hpp"

namespace lowlight {

namespace {

constexpr double kDegenerateMeanThreshold = 1e-8;

void check_strength_range(double lo, double hi, const char* name) {
    if (!(lo >= 0.0) || !(hi >= 0.0) || lo > hi)
        throw ContractError(std::string("PipelineConfig: invalid ") + name +
                            " range");
    // A positive range must stay strictly positive: strengths are drawn
    // log-uniformly, so the lower bound cannot touch zero.
    if (hi > 0.0 && lo <= 0.0)
        throw ContractError(std::string("PipelineConfig: ") + name +
                            " range with positive max needs positive min");
}

double sample_strength(Rng& rng, double lo, double hi) {
    if (hi <= 0.0) return 0.0;
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

} // namespace

void validate_config(const PipelineConfig& config) {
    if (config.epsilon_min > config.epsilon_max)
        throw ContractError("PipelineConfig: epsilon range inverted");
    if (config.epsilon_min <= -1.0)
        throw ContractError("PipelineConfig: epsilon must stay above -1");
    if (config.gamma_min > config.gamma_max)
        throw ContractError("PipelineConfig: gamma range inverted");
    if (!(config.gamma_min > 0.0) || config.gamma_max > 1.0)
        throw ContractError("PipelineConfig: gamma range must lie in (0, 1]");
    check_strength_range(config.shot_min, config.shot_max, "shot");
    check_strength_range(config.read_min, config.read_max, "read");
    if (config.size <= 0)
        throw ContractError("PipelineConfig: size must be positive");
}

std::vector<std::string> ablation_names() {
    return {"proposed", "no_epsilon", "no_noise", "no_crf", "no_k", "no_lab"};
}

PipelineConfig apply_ablation(PipelineConfig base, const std::string& name) {
    if (name == "proposed") {
        // all stages enabled
    } else if (name == "no_epsilon") {
        base.epsilon_min = 0.0;
        base.epsilon_max = 0.0;
    } else if (name == "no_noise") {
        base.shot_min = base.shot_max = 0.0;
        base.read_min = base.read_max = 0.0;
    } else if (name == "no_crf") {
        base.use_crf = false;
    } else if (name == "no_k") {
        base.use_k = false;
    } else if (name == "no_lab") {
        base.use_lab = false;
    } else {
        std::string valid;
        for (const auto& n : ablation_names())
            valid += (valid.empty() ? "" : ", ") + n;
        throw ContractError("unknown ablation '" + name + "', valid tags: " +
                            valid);
    }
    base.ablation = name;
    return base;
}

PipelineConfig ablation_config(const std::string& name) {
    return apply_ablation(PipelineConfig{}, name);
}

ImageF add_noise(const ImageF& img, double shot_strength, double read_sigma,
                 Rng& rng) {
    require_colorspace(img, ColorSpace::kLinearRgb, "add_noise");
    require_range(img, Range::kUnit, "add_noise");
    if (shot_strength < 0.0 || read_sigma < 0.0)
        throw ContractError("add_noise: strengths must be nonnegative");

    ImageF out = img;
    const double read_var = read_sigma * read_sigma;
    for (double& v : out.samples()) {
        const double var = shot_strength * std::max(v, 0.0) + read_var;
        if (var > 0.0)
            v = std::clamp(v + std::sqrt(var) * rng.normal(), 0.0, 1.0);
    }
    return out;
}

ImageF low_light(const ImageF& img, double gamma, const ResponseCurve& g_inv,
                 const ResponseCurve& f, double shot_strength,
                 double read_sigma, Rng& noise_rng, bool noise_after_gamma) {
    require_range(img, Range::kUnit, "low_light");
    if (!(gamma > 0.0) || gamma > 1.0)
        throw ContractError("low_light: gamma must lie in (0, 1]");

    ImageF linear = invert(g_inv, img);
    ImageF dark =
        noise_after_gamma
            ? add_noise(scaled(linear, gamma), shot_strength, read_sigma,
                        noise_rng)
            : scaled(add_noise(linear, shot_strength, read_sigma, noise_rng),
                     gamma);
    return apply(f, dark);
}

double compute_k(const ImageF& bright, const ImageF& dark) {
    require_same_shape(bright, dark, "compute_k");
    const double dark_mean = dark.mean();
    if (dark_mean <= kDegenerateMeanThreshold)
        throw DegenerateImageError(
            "compute_k: dark image mean " + std::to_string(dark_mean) +
            " below threshold; source too dark for a stable scale");
    return bright.mean() / dark_mean;
}

SynthesizedPair synthesize_pair(const ImageF& img, const CrfDatabase& db,
                                const PipelineConfig& config,
                                std::uint64_t seed) {
    require_colorspace(img, ColorSpace::kSrgb, "synthesize_pair");
    require_range(img, Range::kUnit, "synthesize_pair");
    validate_config(config);
    if (config.use_crf && db.curves.empty())
        throw ContractError("synthesize_pair: empty curve database");

    Rng param_rng(Rng::derive_seed(seed, 0));
    Rng noise_rng(Rng::derive_seed(seed, 1));

    DegradeParams params;
    params.seed = seed;
    params.epsilon = param_rng.uniform(config.epsilon_min, config.epsilon_max);
    params.gamma = param_rng.uniform(config.gamma_min, config.gamma_max);

    static const ResponseCurve identity = identity_curve();
    const ResponseCurve* g_inv = &identity;
    const ResponseCurve* f = &identity;
    if (config.use_crf) {
        g_inv = &sample_curve(db, param_rng);
        f = &sample_curve(db, param_rng);
    }
    params.crf_inv_id = g_inv->id;
    params.crf_fwd_id = f->id;
    params.shot_strength =
        sample_strength(param_rng, config.shot_min, config.shot_max);
    params.read_sigma =
        sample_strength(param_rng, config.read_min, config.read_max);

    SynthesizedPair pair;
    pair.bright = clamped01(scaled(img, 1.0 + params.epsilon));
    pair.bright.set_tags(ColorSpace::kSrgb, Range::kUnit);
    if (pair.bright.mean() <= kDegenerateMeanThreshold)
        throw DegenerateImageError(
            "synthesize_pair: source too dark for a stable pair");

    ImageF low = low_light(pair.bright, params.gamma, *g_inv, *f,
                           params.shot_strength, params.read_sigma, noise_rng,
                           config.noise_after_gamma);
    pair.low_mean = low.mean();

    pair.record.k = config.use_k ? compute_k(pair.bright, low) : 1.0;
    pair.record.params = std::move(params);
    pair.dark = clamped01(scaled(low, pair.record.k));
    return pair;
}

std::string config_to_json(const PipelineConfig& config, int indent) {
    JsonWriter w(indent);
    w.begin_object();
    w.field("epsilon_min", config.epsilon_min);
    w.field("epsilon_max", config.epsilon_max);
    w.field("gamma_min", config.gamma_min);
    w.field("gamma_max", config.gamma_max);
    w.field("shot_min", config.shot_min);
    w.field("shot_max", config.shot_max);
    w.field("read_min", config.read_min);
    w.field("read_max", config.read_max);
    w.field("use_crf", config.use_crf);
    w.field("use_k", config.use_k);
    w.field("use_lab", config.use_lab);
    w.field("noise_after_gamma", config.noise_after_gamma);
    w.field("size", static_cast<std::int64_t>(config.size));
    w.field("crf_source", config.crf_source);
    w.field("ablation", config.ablation);
    w.end_object();
    return w.str();
}

PipelineConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: expected a JSON object");

    PipelineConfig config;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "epsilon_min") config.epsilon_min = value.get<double>();
            else if (key == "epsilon_max") config.epsilon_max = value.get<double>();
            else if (key == "gamma_min") config.gamma_min = value.get<double>();
            else if (key == "gamma_max") config.gamma_max = value.get<double>();
            else if (key == "shot_min") config.shot_min = value.get<double>();
            else if (key == "shot_max") config.shot_max = value.get<double>();
            else if (key == "read_min") config.read_min = value.get<double>();
            else if (key == "read_max") config.read_max = value.get<double>();
            else if (key == "use_crf") config.use_crf = value.get<bool>();
            else if (key == "use_k") config.use_k = value.get<bool>();
            else if (key == "use_lab") config.use_lab = value.get<bool>();
            else if (key == "noise_after_gamma")
                config.noise_after_gamma = value.get<bool>();
            else if (key == "size") config.size = value.get<int>();
            else if (key == "crf_source")
                config.crf_source = value.get<std::string>();
            else if (key == "ablation")
                config.ablation = value.get<std::string>();
            else
                throw ParseError("config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: bad field type: ") + e.what());
    }
    validate_config(config);
    return config;
}

} // namespace lowlight
