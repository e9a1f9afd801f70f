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

#include <cmath>
#include <map>
#include <sstream>

#include <doctest.h>

#include "lowlight/crf.hpp"
#include "testutil.hpp"

using namespace lowlight;

namespace {

// Serializes curves in the four-line record layout the loader expects.
std::string make_record(const std::string& name,
                        const std::vector<double>& irradiance,
                        const std::vector<double>& brightness) {
    std::ostringstream out;
    out << name << "\n";
    out << "graph type: test\n";
    out << "I = ";
    out.precision(9);
    for (double v : irradiance) out << " " << v;
    out << "\nB = ";
    for (double v : brightness) out << " " << v;
    out << "\n";
    return out.str();
}

std::vector<double> uniform_grid() {
    std::vector<double> g(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) g[i] = i / 1023.0;
    return g;
}

} // namespace

TEST_CASE("load_dorf parses a well-formed record") {
    const auto grid = uniform_grid();
    std::istringstream in(make_record("test_curve", grid, grid));
    CrfLoadReport report;
    const auto db = load_dorf(in, "mem", &report);
    REQUIRE(db.curves.size() == 1);
    CHECK(db.curves[0].id == "test_curve");
    CHECK(report.curves_loaded == 1);
    CHECK(report.repaired.empty());
    CHECK(db.find("test_curve") != nullptr);
    CHECK(db.find("missing") == nullptr);
}

TEST_CASE("load_dorf repairs an inverted pair via running maximum") {
    const auto grid = uniform_grid();
    auto brightness = grid;
    // One adjacent inversion mid-curve.
    brightness[500] = 0.500;
    brightness[501] = 0.499;
    brightness[502] = 0.502;

    // Independent oracle: running maximum of the perturbed column. The
    // projection also flattens the grid points after 0.502 until the ramp
    // catches up, so the largest violation is against that plateau.
    auto expected = brightness;
    double max_violation = 0.0;
    double running = expected[0];
    for (double& b : expected) {
        if (b < running) {
            max_violation = std::max(max_violation, running - b);
            b = running;
        } else {
            running = b;
        }
    }

    std::istringstream in(make_record("bent", grid, brightness));
    CrfLoadReport report;
    const auto db = load_dorf(in, "mem", &report);
    REQUIRE(db.curves.size() == 1);
    REQUIRE(report.repaired.size() == 1);
    CHECK(report.repaired[0].id == "bent");
    CHECK(report.repaired[0].max_violation ==
          doctest::Approx(max_violation).epsilon(1e-9));
    for (int i = 0; i < kCurveSamples; ++i)
        CHECK(db.curves[0].brightness[i] == doctest::Approx(expected[i]));
}

TEST_CASE("load_dorf rejects short records") {
    const auto grid = uniform_grid();
    auto short_b = grid;
    short_b.pop_back();
    std::istringstream in(make_record("short", grid, short_b));
    CHECK_THROWS_WITH_AS(load_dorf(in), doctest::Contains("record 0"),
                         ParseError);
}

TEST_CASE("load_dorf rejects empty streams and junk values") {
    std::istringstream empty("");
    CHECK_THROWS_AS(load_dorf(empty), ParseError);

    const auto grid = uniform_grid();
    std::string text = make_record("junk", grid, grid);
    text.insert(text.size() - 1, " banana");
    std::istringstream in(text);
    CHECK_THROWS_AS(load_dorf(in), ParseError);
}

TEST_CASE("load_dorf is deterministic per byte stream") {
    const auto grid = uniform_grid();
    std::string two = make_record("a", grid, grid) + make_record("b", grid, grid);
    std::istringstream in1(two), in2(two);
    const auto db1 = load_dorf(in1);
    const auto db2 = load_dorf(in2);
    REQUIRE(db1.curves.size() == db2.curves.size());
    for (std::size_t i = 0; i < db1.curves.size(); ++i) {
        CHECK(db1.curves[i].id == db2.curves[i].id);
        CHECK(db1.curves[i].brightness == db2.curves[i].brightness);
        CHECK(db1.curves[i].irradiance == db2.curves[i].irradiance);
    }
}

TEST_CASE("gamma_curve basics") {
    CHECK_THROWS_AS(gamma_curve(0.05), ContractError);
    CHECK_THROWS_AS(gamma_curve(10.0), ContractError);

    const auto identity = gamma_curve(1.0);
    CHECK(apply_scalar(identity, 0.37) == doctest::Approx(0.37).epsilon(1e-12));

    const auto g2 = gamma_curve(2.0);
    CHECK(apply_scalar(g2, 0.25) == doctest::Approx(0.5).epsilon(1e-3));

    // 0.5^(1/2.2) evaluated directly.
    const double expected = std::pow(0.5, 1.0 / 2.2);
    CHECK(expected == doctest::Approx(0.7297400528407231).epsilon(1e-12));
    const auto g22 = gamma_curve(2.2);
    CHECK(apply_scalar(g22, 0.5) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("apply on images") {
    const auto identity = identity_curve();
    const auto img = testutil::make_random_image(9, 7, 21);
    const auto out = apply(identity, img);
    for (std::size_t i = 0; i < img.samples().size(); ++i)
        CHECK(out.samples()[i] ==
              doctest::Approx(img.samples()[i]).epsilon(1e-12));

    const auto zeros =
        ImageF::constant(5, 5, 3, 0.0, ColorSpace::kLinearRgb, Range::kUnit);
    for (const auto& curve : synthetic_database().curves) {
        const auto rendered = apply(curve, zeros);
        for (double v : rendered.samples()) CHECK(v <= 1e-3);
    }

    const auto quarter =
        ImageF::constant(4, 4, 3, 0.25, ColorSpace::kLinearRgb, Range::kUnit);
    const auto half = apply(gamma_curve(2.0), quarter);
    for (double v : half.samples())
        CHECK(v == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("invert basics") {
    const auto identity = identity_curve();
    const auto img = testutil::make_random_image(6, 6, 33);
    const auto out = invert(identity, img);
    CHECK(out.colorspace() == ColorSpace::kLinearRgb);
    for (std::size_t i = 0; i < img.samples().size(); ++i)
        CHECK(out.samples()[i] ==
              doctest::Approx(img.samples()[i]).epsilon(1e-12));

    CHECK(invert_scalar(gamma_curve(2.0), 0.5) ==
          doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("invert resolves flat segments to the left endpoint") {
    ResponseCurve curve = identity_curve();
    // Flatten brightness over a run of the grid.
    for (int i = 300; i < 340; ++i) curve.brightness[i] = curve.brightness[300];
    const double flat_value = curve.brightness[300];
    CHECK(invert_scalar(curve, flat_value) ==
          doctest::Approx(curve.irradiance[300]).epsilon(1e-12));
}

TEST_CASE("round-trip error stays below 1e-3 for every synthetic curve") {
    for (const auto& curve : synthetic_database().curves) {
        double fwd_err = 0.0, inv_err = 0.0;
        for (int i = 0; i < kCurveSamples; ++i) {
            const double x = i / 1023.0;
            fwd_err = std::max(
                fwd_err, std::abs(apply_scalar(curve, invert_scalar(curve, x)) - x));
            inv_err = std::max(
                inv_err, std::abs(invert_scalar(curve, apply_scalar(curve, x)) - x));
        }
        INFO(curve.id);
        CHECK(fwd_err <= 1e-3);
        CHECK(inv_err <= 1e-3);
    }
}

TEST_CASE("apply and invert are monotone and stay in range") {
    Rng rng(17);
    for (const auto& curve : synthetic_database().curves) {
        double prev_a = -1.0, prev_i = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            const double a = apply_scalar(curve, x);
            const double v = invert_scalar(curve, x);
            CHECK(a >= prev_a);
            CHECK(v >= prev_i);
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev_a = a;
            prev_i = v;
        }
    }
    (void)rng;
}

TEST_CASE("sample_curve is deterministic and roughly uniform") {
    CrfDatabase one;
    one.curves.push_back(identity_curve());
    Rng r1(5);
    CHECK(sample_curve(one, r1).id == "identity");

    CrfDatabase four;
    four.curves.push_back(gamma_curve(0.5));
    four.curves.push_back(gamma_curve(1.0));
    four.curves.push_back(gamma_curve(2.0));
    four.curves.push_back(gamma_curve(3.0));

    Rng a(42), b(42);
    for (int i = 0; i < 32; ++i)
        CHECK(sample_curve(four, a).id == sample_curve(four, b).id);

    std::map<std::string, int> counts;
    Rng r(7);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[sample_curve(four, r).id];
    for (const auto& [id, count] : counts) {
        INFO(id);
        const double freq = static_cast<double>(count) / draws;
        CHECK(freq >= 0.22);
        CHECK(freq <= 0.28);
    }

    CrfDatabase empty;
    Rng r2(1);
    CHECK_THROWS_AS(sample_curve(empty, r2), ContractError);
}
