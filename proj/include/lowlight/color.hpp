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

#include "lowlight/image.hpp"

namespace lowlight {

// Scalar sRGB transfer function and its inverse (IEC 61966-2-1 piecewise
// curve: linear segment below 0.04045 / 0.0031308, power 2.4 above).
double srgb_to_linear_scalar(double s);
double linear_to_srgb_scalar(double l);

/// [SRGB, UNIT] -> [LINEAR_RGB, UNIT], per channel.
ImageF srgb_to_linear(const ImageF& img);

/// [LINEAR_RGB, UNIT] -> [SRGB, UNIT], per channel.
ImageF linear_to_srgb(const ImageF& img);

/// 3-channel [SRGB, UNIT] -> CIE 1976 L*a*b* under D65 (2 degree observer),
/// via sRGB -> linear -> XYZ -> Lab. L in [0, 100].
ImageF rgb_to_lab(const ImageF& img);

/// Inverse of rgb_to_lab; out-of-gamut results are clamped per channel into
/// [0, 1]. Round-trips in-gamut pixels within 1e-4 RMS.
ImageF lab_to_rgb(const ImageF& img);

/// Affine map onto [-1, 1]. UNIT images map x -> 2x - 1. LAB_NATIVE images
/// map per channel: L/50 - 1, a/110, b/110 (110 covers the sRGB gamut's
/// chroma extent). PM1 inputs are rejected.
ImageF normalize_pm1(const ImageF& img);

/// Exact inverse of normalize_pm1; the colorspace tag selects whether the
/// result is UNIT or LAB_NATIVE.
ImageF denormalize_pm1(const ImageF& img);

} // namespace lowlight
