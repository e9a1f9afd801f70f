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

#include "lowlight/crf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>

namespace lowlight {

namespace {

constexpr double kEndpointTol = 1e-3;
constexpr double kGridTol = 1e-6;
// Inversions no larger than this are treated as benign float noise; anything
// bigger is still repaired but gets flagged in the load report.
constexpr double kRepairReportTol = 1e-6;

std::string record_label(std::size_t record_index, const std::string& id) {
    std::string label = "record " + std::to_string(record_index);
    if (!id.empty()) label += " (" + id + ")";
    return label;
}

// Parses exactly kCurveSamples floats following the "X =" marker.
std::vector<double> parse_curve_line(const std::string& line, char marker,
                                     std::size_t record_index,
                                     const std::string& id) {
    const std::string prefix(1, marker);
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] != marker)
        throw ParseError("load_dorf: " + record_label(record_index, id) +
                         ": expected line starting with \"" + prefix + " =\"");
    pos = line.find('=', pos);
    if (pos == std::string::npos)
        throw ParseError("load_dorf: " + record_label(record_index, id) +
                         ": expected '=' on the " + prefix + " line");

    std::vector<double> values;
    values.reserve(kCurveSamples);
    const char* p = line.c_str() + pos + 1;
    char* end = nullptr;
    for (;;) {
        const double v = std::strtod(p, &end);
        if (end == p) break;
        values.push_back(v);
        p = end;
    }
    // Anything left over beyond whitespace is an unparseable token.
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0')
        throw ParseError("load_dorf: " + record_label(record_index, id) +
                         ": unparseable value on the " + prefix + " line");
    if (values.size() != static_cast<std::size_t>(kCurveSamples))
        throw ParseError("load_dorf: " + record_label(record_index, id) + ": " +
                         prefix + " line has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(kCurveSamples));
    return values;
}

bool next_nonempty_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
}

} // namespace

const ResponseCurve* CrfDatabase::find(const std::string& id) const {
    for (const auto& c : curves)
        if (c.id == id) return &c;
    return nullptr;
}

void validate_curve(const ResponseCurve& curve) {
    const auto n = static_cast<std::size_t>(kCurveSamples);
    if (curve.irradiance.size() != n || curve.brightness.size() != n)
        throw ContractError("ResponseCurve '" + curve.id + "': expected " +
                            std::to_string(kCurveSamples) + " samples");
    if (std::abs(curve.irradiance.front()) > kGridTol ||
        std::abs(curve.irradiance.back() - 1.0) > kGridTol)
        throw ContractError("ResponseCurve '" + curve.id +
                            "': irradiance endpoints must be 0 and 1");
    for (std::size_t i = 1; i < n; ++i)
        if (curve.irradiance[i] <= curve.irradiance[i - 1])
            throw ContractError("ResponseCurve '" + curve.id +
                                "': irradiance not strictly increasing at index " +
                                std::to_string(i));
    for (std::size_t i = 1; i < n; ++i)
        if (curve.brightness[i] < curve.brightness[i - 1])
            throw ContractError("ResponseCurve '" + curve.id +
                                "': brightness decreases at index " +
                                std::to_string(i));
    if (curve.brightness.front() > kEndpointTol ||
        curve.brightness.back() < 1.0 - kEndpointTol)
        throw ContractError("ResponseCurve '" + curve.id +
                            "': brightness endpoints out of tolerance");
}

CrfDatabase load_dorf(std::istream& in, const std::string& source_name,
                      CrfLoadReport* report) {
    CrfDatabase db;
    db.source = source_name.empty() ? "stream" : source_name;
    CrfLoadReport local;

    std::string name, info, iline, bline;
    std::size_t record_index = 0;
    while (next_nonempty_line(in, name)) {
        // Trim the name line; it doubles as the curve id.
        const auto first = name.find_first_not_of(" \t");
        const auto last = name.find_last_not_of(" \t");
        const std::string id = name.substr(first, last - first + 1);

        if (!next_nonempty_line(in, info))
            throw ParseError("load_dorf: " + record_label(record_index, id) +
                             ": truncated record (missing info line)");
        if (!next_nonempty_line(in, iline))
            throw ParseError("load_dorf: " + record_label(record_index, id) +
                             ": truncated record (missing I line)");
        if (!next_nonempty_line(in, bline))
            throw ParseError("load_dorf: " + record_label(record_index, id) +
                             ": truncated record (missing B line)");

        ResponseCurve curve;
        curve.id = id;
        curve.irradiance = parse_curve_line(iline, 'I', record_index, id);
        curve.brightness = parse_curve_line(bline, 'B', record_index, id);

        // Measured curves carry small non-monotonic noise; project brightness
        // to nondecreasing via running maximum and report notable repairs.
        double max_violation = 0.0;
        double running = curve.brightness.front();
        for (double& b : curve.brightness) {
            if (b < running) {
                max_violation = std::max(max_violation, running - b);
                b = running;
            } else {
                running = b;
            }
        }
        if (max_violation > kRepairReportTol)
            local.repaired.push_back({id, max_violation});

        try {
            validate_curve(curve);
        } catch (const ContractError& e) {
            throw ParseError("load_dorf: " + record_label(record_index, id) +
                             ": " + e.what());
        }
        db.curves.push_back(std::move(curve));
        ++record_index;
    }

    if (db.curves.empty())
        throw ParseError("load_dorf: no curve records found");

    // Ids must be unique to be usable as replay references.
    for (std::size_t i = 0; i < db.curves.size(); ++i)
        for (std::size_t j = i + 1; j < db.curves.size(); ++j)
            if (db.curves[i].id == db.curves[j].id)
                throw ParseError("load_dorf: duplicate curve id '" +
                                 db.curves[i].id + "'");

    local.curves_loaded = db.curves.size();
    if (report) *report = local;
    return db;
}

ResponseCurve gamma_curve(double gc) {
    if (!(gc > 0.1 && gc < 10.0))
        throw ContractError("gamma_curve: exponent " + std::to_string(gc) +
                            " outside (0.1, 10)");
    ResponseCurve curve;
    {
        std::ostringstream id;
        id << "gamma_" << gc;
        curve.id = id.str();
    }
    curve.irradiance.resize(kCurveSamples);
    curve.brightness.resize(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) {
        const double x = static_cast<double>(i) / (kCurveSamples - 1);
        curve.irradiance[i] = x;
        curve.brightness[i] = std::pow(x, 1.0 / gc);
    }
    return curve;
}

ResponseCurve identity_curve() {
    ResponseCurve curve = gamma_curve(1.0);
    curve.id = "identity";
    return curve;
}

CrfDatabase synthetic_database() {
    CrfDatabase db;
    db.source = "synthetic";
    for (double gc : {0.45, 0.55, 0.7, 0.85, 1.0, 1.4, 1.8, 2.2})
        db.curves.push_back(gamma_curve(gc));

    // S-shaped responses: smoothstep raised to a mild power, endpoints exact.
    for (double gc : {0.8, 1.0, 1.25}) {
        ResponseCurve curve;
        {
            std::ostringstream id;
            id << "scurve_" << gc;
            curve.id = id.str();
        }
        curve.irradiance.resize(kCurveSamples);
        curve.brightness.resize(kCurveSamples);
        for (int i = 0; i < kCurveSamples; ++i) {
            const double x = static_cast<double>(i) / (kCurveSamples - 1);
            const double s = x * x * (3.0 - 2.0 * x);
            curve.irradiance[i] = x;
            curve.brightness[i] = std::pow(s, 1.0 / gc);
        }
        db.curves.push_back(std::move(curve));
    }
    for (auto& c : db.curves) validate_curve(c);
    return db;
}

double apply_scalar(const ResponseCurve& curve, double x) {
    x = std::clamp(x, 0.0, 1.0);
    const auto& xs = curve.irradiance;
    const auto& ys = curve.brightness;
    // First grid point >= x.
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double invert_scalar(const ResponseCurve& curve, double y) {
    y = std::clamp(y, 0.0, 1.0);
    const auto& xs = curve.irradiance;
    const auto& ys = curve.brightness;
    // First brightness >= y; on a flat run this lands on its left endpoint.
    const auto it = std::lower_bound(ys.begin(), ys.end(), y);
    if (it == ys.end()) return xs.back();
    const std::size_t j = static_cast<std::size_t>(it - ys.begin());
    if (j == 0 || ys[j] == y) return xs[j];
    const double t = (y - ys[j - 1]) / (ys[j] - ys[j - 1]);
    return xs[j - 1] + t * (xs[j] - xs[j - 1]);
}

ImageF apply(const ResponseCurve& curve, const ImageF& img) {
    require_range(img, Range::kUnit, "crf apply");
    ImageF out = img;
    for (double& v : out.samples()) v = apply_scalar(curve, v);
    out.set_tags(ColorSpace::kSrgb, Range::kUnit);
    return out;
}

ImageF invert(const ResponseCurve& curve, const ImageF& img) {
    require_range(img, Range::kUnit, "crf invert");
    ImageF out = img;
    for (double& v : out.samples()) v = invert_scalar(curve, v);
    out.set_tags(ColorSpace::kLinearRgb, Range::kUnit);
    return out;
}

const ResponseCurve& sample_curve(const CrfDatabase& db, Rng& rng) {
    if (db.curves.empty())
        throw ContractError("sample_curve: empty database");
    return db.curves[rng.bounded(db.curves.size())];
}

} // namespace lowlight
