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

#include "lowlight/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lowlight {

namespace {

// sRGB -> XYZ, D65 white, 2 degree observer.
constexpr double kSrgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// The white point is taken as the forward matrix's row sums so that the gray
// axis maps to a = b = 0 to machine precision.
constexpr double kWhiteX = kSrgbToXyz[0][0] + kSrgbToXyz[0][1] + kSrgbToXyz[0][2];
constexpr double kWhiteY = kSrgbToXyz[1][0] + kSrgbToXyz[1][1] + kSrgbToXyz[1][2];
constexpr double kWhiteZ = kSrgbToXyz[2][0] + kSrgbToXyz[2][1] + kSrgbToXyz[2][2];

struct Mat3 {
    double m[3][3];
};

// Exact adjugate inverse keeps the Lab round-trip at machine precision
// instead of the ~1e-7 residue of the usual truncated published inverse.
constexpr Mat3 inverse3(const double a[3][3]) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    Mat3 r{};
    r.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    r.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    r.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    r.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    r.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    r.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    r.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    r.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    r.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return r;
}

constexpr Mat3 kXyzToSrgb = inverse3(kSrgbToXyz);

constexpr double kLabDelta = 6.0 / 29.0;
constexpr double kLabDelta3 = kLabDelta * kLabDelta * kLabDelta;

double lab_f(double t) {
    return t > kLabDelta3 ? std::cbrt(t)
                          : t / (3.0 * kLabDelta * kLabDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    return t > kLabDelta ? t * t * t
                         : 3.0 * kLabDelta * kLabDelta * (t - 4.0 / 29.0);
}

} // namespace

double srgb_to_linear_scalar(double s) {
    return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

double linear_to_srgb_scalar(double l) {
    return l <= 0.0031308 ? 12.92 * l
                          : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

ImageF srgb_to_linear(const ImageF& img) {
    require_colorspace(img, ColorSpace::kSrgb, "srgb_to_linear");
    require_range(img, Range::kUnit, "srgb_to_linear");
    ImageF out = img;
    for (double& v : out.samples()) v = srgb_to_linear_scalar(v);
    out.set_tags(ColorSpace::kLinearRgb, Range::kUnit);
    return out;
}

ImageF linear_to_srgb(const ImageF& img) {
    require_colorspace(img, ColorSpace::kLinearRgb, "linear_to_srgb");
    require_range(img, Range::kUnit, "linear_to_srgb");
    ImageF out = img;
    for (double& v : out.samples()) v = linear_to_srgb_scalar(v);
    out.set_tags(ColorSpace::kSrgb, Range::kUnit);
    return out;
}

ImageF rgb_to_lab(const ImageF& img) {
    require_colorspace(img, ColorSpace::kSrgb, "rgb_to_lab");
    require_range(img, Range::kUnit, "rgb_to_lab");
    if (img.channels() != 3)
        throw ContractError("rgb_to_lab: requires a 3-channel image");

    ImageF out(img.width(), img.height(), 3, ColorSpace::kLab, Range::kLabNative);
    const auto& in = img.samples();
    auto& dst = out.samples();
    for (std::size_t i = 0; i < in.size(); i += 3) {
        const double r = srgb_to_linear_scalar(in[i]);
        const double g = srgb_to_linear_scalar(in[i + 1]);
        const double b = srgb_to_linear_scalar(in[i + 2]);
        const double x = kSrgbToXyz[0][0] * r + kSrgbToXyz[0][1] * g + kSrgbToXyz[0][2] * b;
        const double y = kSrgbToXyz[1][0] * r + kSrgbToXyz[1][1] * g + kSrgbToXyz[1][2] * b;
        const double z = kSrgbToXyz[2][0] * r + kSrgbToXyz[2][1] * g + kSrgbToXyz[2][2] * b;
        const double fx = lab_f(x / kWhiteX);
        const double fy = lab_f(y / kWhiteY);
        const double fz = lab_f(z / kWhiteZ);
        dst[i] = 116.0 * fy - 16.0;
        dst[i + 1] = 500.0 * (fx - fy);
        dst[i + 2] = 200.0 * (fy - fz);
    }
    return out;
}

ImageF lab_to_rgb(const ImageF& img) {
    require_colorspace(img, ColorSpace::kLab, "lab_to_rgb");
    require_range(img, Range::kLabNative, "lab_to_rgb");
    if (img.channels() != 3)
        throw ContractError("lab_to_rgb: requires a 3-channel image");

    ImageF out(img.width(), img.height(), 3, ColorSpace::kSrgb, Range::kUnit);
    const auto& in = img.samples();
    auto& dst = out.samples();
    for (std::size_t i = 0; i < in.size(); i += 3) {
        const double fy = (in[i] + 16.0) / 116.0;
        const double fx = fy + in[i + 1] / 500.0;
        const double fz = fy - in[i + 2] / 200.0;
        const double x = kWhiteX * lab_f_inv(fx);
        const double y = kWhiteY * lab_f_inv(fy);
        const double z = kWhiteZ * lab_f_inv(fz);
        for (int c = 0; c < 3; ++c) {
            const double lin = kXyzToSrgb.m[c][0] * x + kXyzToSrgb.m[c][1] * y +
                               kXyzToSrgb.m[c][2] * z;
            dst[i + c] = std::clamp(linear_to_srgb_scalar(lin), 0.0, 1.0);
        }
    }
    return out;
}

ImageF normalize_pm1(const ImageF& img) {
    if (img.range() == Range::kPm1)
        throw ContractError("normalize_pm1: input is already PM1");
    ImageF out = img;
    auto& v = out.samples();
    if (img.range() == Range::kUnit) {
        for (double& s : v) s = 2.0 * s - 1.0;
    } else { // LAB_NATIVE
        if (img.channels() != 3)
            throw ContractError("normalize_pm1: LAB_NATIVE requires 3 channels");
        for (std::size_t i = 0; i < v.size(); i += 3) {
            v[i] = v[i] / 50.0 - 1.0;
            v[i + 1] = v[i + 1] / 110.0;
            v[i + 2] = v[i + 2] / 110.0;
        }
    }
    out.set_tags(img.colorspace(), Range::kPm1);
    return out;
}

ImageF denormalize_pm1(const ImageF& img) {
    require_range(img, Range::kPm1, "denormalize_pm1");
    ImageF out = img;
    auto& v = out.samples();
    if (img.colorspace() == ColorSpace::kLab) {
        if (img.channels() != 3)
            throw ContractError("denormalize_pm1: LAB requires 3 channels");
        for (std::size_t i = 0; i < v.size(); i += 3) {
            v[i] = (v[i] + 1.0) * 50.0;
            v[i + 1] = v[i + 1] * 110.0;
            v[i + 2] = v[i + 2] * 110.0;
        }
        out.set_tags(ColorSpace::kLab, Range::kLabNative);
    } else {
        for (double& s : v) s = (s + 1.0) / 2.0;
        out.set_tags(img.colorspace(), Range::kUnit);
    }
    return out;
}

} // namespace lowlight
