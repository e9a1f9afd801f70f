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
#include <filesystem>
#include <vector>

#include "lowlight/image.hpp"

namespace lowlight {

/// round(clamp(x, 0, 1) * 255) per sample, in storage order.
std::vector<std::uint8_t> quantize8(const ImageF& img);

/// Encodes an 8-bit PNG (grayscale for 1 channel, RGB for 3). The encoder is
/// deliberately boring: filter type 0 everywhere, one IDAT, fixed compression
/// level, so identical images always produce identical bytes.
std::vector<std::uint8_t> encode_png(const ImageF& img);

/// Decodes an 8-bit, non-interlaced PNG (gray, gray+alpha, RGB, RGBA; alpha
/// is dropped). Palette, 16-bit, and interlaced files raise ParseError.
/// Output tagged [SRGB, UNIT].
ImageF decode_png(const std::uint8_t* data, std::size_t size);

/// Decodes binary PPM/PGM (P6/P5) with maxval <= 255.
ImageF decode_ppm(const std::uint8_t* data, std::size_t size);

void save_png(const ImageF& img, const std::filesystem::path& path);

/// Reads and decodes a PNG or PPM/PGM file, dispatching on magic bytes.
/// IoError when the file cannot be read, ParseError when it cannot be
/// decoded.
ImageF load_image(const std::filesystem::path& path);

} // namespace lowlight
