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

#include "lowlight/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lowlight {

namespace {
constexpr double kRangeTol = 1e-6;
} // namespace

const char* to_string(ColorSpace cs) {
    switch (cs) {
    case ColorSpace::kSrgb: return "SRGB";
    case ColorSpace::kLinearRgb: return "LINEAR_RGB";
    case ColorSpace::kLab: return "LAB";
    }
    return "?";
}

const char* to_string(Range r) {
    switch (r) {
    case Range::kUnit: return "UNIT";
    case Range::kPm1: return "PM1";
    case Range::kLabNative: return "LAB_NATIVE";
    }
    return "?";
}

ImageF::ImageF(int width, int height, int channels, ColorSpace cs, Range range)
    : width_(width), height_(height), channels_(channels), colorspace_(cs),
      range_(range) {
    if (width <= 0 || height <= 0)
        throw ContractError("ImageF: dimensions must be positive, got " +
                            std::to_string(width) + "x" + std::to_string(height));
    if (channels != 1 && channels != 3)
        throw ContractError("ImageF: channels must be 1 or 3, got " +
                            std::to_string(channels));
    data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

ImageF ImageF::constant(int width, int height, int channels, double value,
                        ColorSpace cs, Range range) {
    ImageF img(width, height, channels, cs, range);
    std::fill(img.data_.begin(), img.data_.end(), value);
    return img;
}

double ImageF::mean() const {
    if (data_.empty())
        throw ContractError("ImageF::mean: empty image");
    double sum = 0.0;
    for (double v : data_) sum += v;
    return sum / static_cast<double>(data_.size());
}

void ImageF::validate() const {
    double lo = 0.0, hi = 0.0;
    switch (range_) {
    case Range::kUnit: lo = -kRangeTol; hi = 1.0 + kRangeTol; break;
    case Range::kPm1: lo = -1.0 - kRangeTol; hi = 1.0 + kRangeTol; break;
    case Range::kLabNative: lo = 0.0; hi = 0.0; break; // per-channel below
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const double v = data_[i];
        if (!std::isfinite(v))
            throw ContractError("ImageF::validate: non-finite sample at index " +
                                std::to_string(i));
        if (range_ == Range::kLabNative) {
            // Only L (channel 0) is bounded.
            if (channels_ == 3 && i % 3 == 0 &&
                (v < -kRangeTol || v > 100.0 + kRangeTol))
                throw ContractError("ImageF::validate: L sample " +
                                    std::to_string(v) + " outside [0, 100]");
        } else if (v < lo || v > hi) {
            throw ContractError("ImageF::validate: sample " + std::to_string(v) +
                                " outside declared range " + to_string(range_));
        }
    }
}

void require_colorspace(const ImageF& img, ColorSpace cs, const char* op) {
    if (img.colorspace() != cs)
        throw ContractError(std::string(op) + ": expected colorspace " +
                            to_string(cs) + ", got " + to_string(img.colorspace()));
}

void require_range(const ImageF& img, Range r, const char* op) {
    if (img.range() != r)
        throw ContractError(std::string(op) + ": expected range " + to_string(r) +
                            ", got " + to_string(img.range()));
}

void require_same_shape(const ImageF& a, const ImageF& b, const char* op) {
    if (!a.same_shape(b))
        throw ContractError(std::string(op) + ": shape mismatch, " +
                            std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                            "x" + std::to_string(a.channels()) + " vs " +
                            std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                            "x" + std::to_string(b.channels()));
}

ImageF scaled(const ImageF& img, double factor) {
    ImageF out = img;
    for (double& v : out.samples()) v *= factor;
    return out;
}

ImageF clamped01(const ImageF& img) {
    ImageF out = img;
    for (double& v : out.samples()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

ImageF expand_to_rgb(const ImageF& img) {
    if (img.channels() == 3) return img;
    ImageF out(img.width(), img.height(), 3, img.colorspace(), img.range());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double v = img.at(x, y, 0);
            out.at(x, y, 0) = v;
            out.at(x, y, 1) = v;
            out.at(x, y, 2) = v;
        }
    return out;
}

} // namespace lowlight
