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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lowlight/error.hpp"

namespace lowlight {

enum class ColorSpace { kSrgb, kLinearRgb, kLab };

// kUnit:      samples in [0, 1]
// kPm1:       samples in [-1, 1]
// kLabNative: channel 0 (L) in [0, 100]; channels 1-2 (a, b) unbounded
enum class Range { kUnit, kPm1, kLabNative };

const char* to_string(ColorSpace cs);
const char* to_string(Range r);

/// Floating-point image carrying explicit color-space and value-range tags.
///
/// Storage is interleaved, row-major:
///   at(x, y, c) == samples()[(y * width + x) * channels + c]
/// This layout is the project-wide convention; every module assumes it.
///
/// Value semantics throughout: pipeline operations take const references and
/// return fresh images. Shared images are never mutated in place; mutate only
/// instances you exclusively own. Under that discipline all operations are
/// safe to call from many threads at once.
class ImageF {
public:
    ImageF() = default;
    ImageF(int width, int height, int channels, ColorSpace cs, Range range);

    static ImageF constant(int width, int height, int channels, double value,
                           ColorSpace cs, Range range);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    ColorSpace colorspace() const { return colorspace_; }
    Range range() const { return range_; }

    std::size_t sample_count() const { return data_.size(); }
    bool same_shape(const ImageF& other) const {
        return width_ == other.width_ && height_ == other.height_ &&
               channels_ == other.channels_;
    }

    double at(int x, int y, int c) const { return data_[index(x, y, c)]; }
    double& at(int x, int y, int c) { return data_[index(x, y, c)]; }

    const std::vector<double>& samples() const { return data_; }
    std::vector<double>& samples() { return data_; }

    /// Retag without touching samples. The caller asserts the new tags hold.
    void set_tags(ColorSpace cs, Range range) {
        colorspace_ = cs;
        range_ = range;
    }

    /// Arithmetic mean over all samples (left-to-right accumulation).
    double mean() const;

    /// Throws ContractError if any sample is non-finite or falls outside the
    /// declared range by more than 1e-6.
    void validate() const;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    ColorSpace colorspace_ = ColorSpace::kSrgb;
    Range range_ = Range::kUnit;
    std::vector<double> data_;
};

void require_colorspace(const ImageF& img, ColorSpace cs, const char* op);
void require_range(const ImageF& img, Range r, const char* op);
void require_same_shape(const ImageF& a, const ImageF& b, const char* op);

/// Per-sample multiply; tags are preserved and no clamping is applied, so the
/// result may transiently violate its range tag until clamped01() is called.
ImageF scaled(const ImageF& img, double factor);

/// Per-sample clamp into [0, 1].
ImageF clamped01(const ImageF& img);

/// Replicate a 1-channel image into 3 identical channels. 3-channel inputs
/// pass through unchanged.
ImageF expand_to_rgb(const ImageF& img);

} // namespace lowlight
