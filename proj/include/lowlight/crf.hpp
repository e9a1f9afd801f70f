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

#include <iosfwd>
#include <string>
#include <vector>

#include "lowlight/image.hpp"
#include "lowlight/rng.hpp"

namespace lowlight {

inline constexpr int kCurveSamples = 1024;

/// A sampled camera response function: a monotone map from scene irradiance
/// to recorded brightness, invertible by construction.
///
/// Invariants: irradiance has kCurveSamples strictly increasing entries with
/// endpoints 0 and 1 (within 1e-6); brightness is nondecreasing with
/// brightness.front() <= 1e-3 and brightness.back() >= 1 - 1e-3.
struct ResponseCurve {
    std::string id;
    std::vector<double> irradiance;
    std::vector<double> brightness;
};

struct CurveRepair {
    std::string id;
    double max_violation = 0.0; // largest adjacent inversion before projection
};

struct CrfLoadReport {
    std::size_t curves_loaded = 0;
    std::vector<CurveRepair> repaired;
};

struct CrfDatabase {
    std::vector<ResponseCurve> curves;
    std::string source; // file path or "synthetic"

    const ResponseCurve* find(const std::string& id) const;
};

/// Throws ContractError if the curve violates the ResponseCurve invariants.
void validate_curve(const ResponseCurve& curve);

/// Parses a text stream of curve records. Each record is four non-empty
/// lines: a name, an auxiliary info line, "I = <1024 floats>", and
/// "B = <1024 floats>". Brightness columns with small non-monotonic noise
/// are projected to nondecreasing via running maximum and flagged in the
/// report; harder violations of the invariants are parse errors naming the
/// record index.
CrfDatabase load_dorf(std::istream& in, const std::string& source_name = {},
                      CrfLoadReport* report = nullptr);

/// Power-law curve brightness = irradiance^(1/gc) on a uniform grid.
/// Requires gc in (0.1, 10).
ResponseCurve gamma_curve(double gc);

/// The curve brightness = irradiance (gamma_curve(1) with id "identity").
ResponseCurve identity_curve();

/// Built-in family of plausible response shapes (power laws and s-curves);
/// the fallback database when no curve file is configured.
CrfDatabase synthetic_database();

// Scalar lookups. apply_scalar clamps x into [0, 1] and interpolates
// brightness over irradiance; invert_scalar performs the inverse lookup and
// resolves flat (non-strict) segments to the segment's left endpoint.
double apply_scalar(const ResponseCurve& curve, double x);
double invert_scalar(const ResponseCurve& curve, double y);

/// Renders a linear image through the curve. Output tagged [SRGB, UNIT].
ImageF apply(const ResponseCurve& curve, const ImageF& img);

/// Linearizes a rendered image through the curve's inverse. Output tagged
/// [LINEAR_RGB, UNIT].
ImageF invert(const ResponseCurve& curve, const ImageF& img);

/// Uniform draw over the database's curves; deterministic given the rng.
const ResponseCurve& sample_curve(const CrfDatabase& db, Rng& rng);

} // namespace lowlight
