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

#include "lowlight/png_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

#include <zlib.h>

namespace lowlight {

namespace {

constexpr std::uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
constexpr int kZlibLevel = 6;
// Sanity bound against corrupt headers; generous for this toolkit's use.
constexpr std::uint32_t kMaxDimension = 1u << 20;
constexpr std::uint64_t kMaxPixels = 1ull << 28;

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) |
           (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) |
           static_cast<std::uint32_t>(p[3]);
}

void write_chunk(std::vector<std::uint8_t>& out, const char type[4],
                 const std::uint8_t* data, std::size_t size) {
    put_be32(out, static_cast<std::uint32_t>(size));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    if (size) out.insert(out.end(), data, data + size);
    const auto crc = crc32(crc32(0L, Z_NULL, 0), out.data() + type_at,
                           static_cast<uInt>(4 + size));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

int paeth_predictor(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

std::vector<std::uint8_t> quantize8(const ImageF& img) {
    std::vector<std::uint8_t> out;
    out.reserve(img.sample_count());
    for (double v : img.samples()) {
        const double c = std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const ImageF& img) {
    const int channels = img.channels();
    const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * channels;
    const std::vector<std::uint8_t> pixels = quantize8(img);

    // Raw stream: each scanline prefixed with filter type 0.
    std::vector<std::uint8_t> raw;
    raw.reserve((row_bytes + 1) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        raw.push_back(0);
        const std::uint8_t* row = pixels.data() + static_cast<std::size_t>(y) * row_bytes;
        raw.insert(raw.end(), row, row + row_bytes);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(),
                  static_cast<uLong>(raw.size()), kZlibLevel) != Z_OK)
        throw Error("encode_png: deflate failed");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out(kPngSignature, kPngSignature + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(img.width() >> 24);
    ihdr[1] = static_cast<std::uint8_t>(img.width() >> 16);
    ihdr[2] = static_cast<std::uint8_t>(img.width() >> 8);
    ihdr[3] = static_cast<std::uint8_t>(img.width());
    ihdr[4] = static_cast<std::uint8_t>(img.height() >> 24);
    ihdr[5] = static_cast<std::uint8_t>(img.height() >> 16);
    ihdr[6] = static_cast<std::uint8_t>(img.height() >> 8);
    ihdr[7] = static_cast<std::uint8_t>(img.height());
    ihdr[8] = 8;                                  // bit depth
    ihdr[9] = channels == 1 ? 0 : 2;              // gray / truecolor
    ihdr[10] = 0;                                 // compression
    ihdr[11] = 0;                                 // filter method
    ihdr[12] = 0;                                 // no interlace
    write_chunk(out, "IHDR", ihdr, sizeof ihdr);
    write_chunk(out, "IDAT", compressed.data(), compressed.size());
    write_chunk(out, "IEND", nullptr, 0);
    return out;
}

ImageF decode_png(const std::uint8_t* data, std::size_t size) {
    if (size < 8 || std::memcmp(data, kPngSignature, 8) != 0)
        throw ParseError("decode_png: bad signature");

    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = -1, interlace = 0;
    bool saw_ihdr = false, saw_iend = false;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    while (pos + 12 <= size && !saw_iend) {
        const std::uint32_t len = get_be32(data + pos);
        if (pos + 12 + static_cast<std::size_t>(len) > size)
            throw ParseError("decode_png: truncated chunk");
        const char* type = reinterpret_cast<const char*>(data + pos + 4);
        const std::uint8_t* payload = data + pos + 8;

        const auto crc_expect = get_be32(data + pos + 8 + len);
        const auto crc_actual = crc32(crc32(0L, Z_NULL, 0), data + pos + 4,
                                      static_cast<uInt>(4 + len));
        if (crc_expect != static_cast<std::uint32_t>(crc_actual))
            throw ParseError(std::string("decode_png: CRC mismatch in ") +
                             std::string(type, 4) + " chunk");

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw ParseError("decode_png: bad IHDR length");
            width = get_be32(payload);
            height = get_be32(payload + 4);
            bit_depth = payload[8];
            color_type = payload[9];
            interlace = payload[12];
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        // Ancillary chunks are skipped.
        pos += 12 + len;
    }

    if (!saw_ihdr) throw ParseError("decode_png: missing IHDR");
    if (!saw_iend) throw ParseError("decode_png: missing IEND");
    if (width == 0 || height == 0 || width > kMaxDimension ||
        height > kMaxDimension ||
        static_cast<std::uint64_t>(width) * height > kMaxPixels)
        throw ParseError("decode_png: unreasonable dimensions");
    if (bit_depth != 8)
        throw ParseError("decode_png: only 8-bit images are supported");
    if (interlace != 0)
        throw ParseError("decode_png: interlaced images are not supported");

    int src_channels = 0;
    switch (color_type) {
    case 0: src_channels = 1; break; // gray
    case 2: src_channels = 3; break; // rgb
    case 4: src_channels = 2; break; // gray + alpha
    case 6: src_channels = 4; break; // rgba
    case 3: throw ParseError("decode_png: palette images are not supported");
    default: throw ParseError("decode_png: unknown color type");
    }

    if (idat.empty()) throw ParseError("decode_png: missing pixel data");

    const std::size_t row_bytes = static_cast<std::size_t>(width) * src_channels;
    const std::size_t raw_size = (row_bytes + 1) * height;
    std::vector<std::uint8_t> raw(raw_size);
    uLongf dest_len = static_cast<uLongf>(raw_size);
    const int zrc = uncompress(raw.data(), &dest_len, idat.data(),
                               static_cast<uLong>(idat.size()));
    if (zrc != Z_OK || dest_len != raw_size)
        throw ParseError("decode_png: corrupt pixel data");

    // Reconstruct scanlines in place (filters 0-4).
    std::vector<std::uint8_t> prev_row(row_bytes, 0);
    ImageF img(static_cast<int>(width), static_cast<int>(height),
               src_channels >= 3 ? 3 : 1, ColorSpace::kSrgb, Range::kUnit);
    const int bpp = src_channels;
    for (std::uint32_t y = 0; y < height; ++y) {
        std::uint8_t* row = raw.data() + static_cast<std::size_t>(y) * (row_bytes + 1);
        const int filter = row[0];
        std::uint8_t* px = row + 1;
        switch (filter) {
        case 0:
            break;
        case 1: // sub
            for (std::size_t i = bpp; i < row_bytes; ++i) px[i] += px[i - bpp];
            break;
        case 2: // up
            for (std::size_t i = 0; i < row_bytes; ++i) px[i] += prev_row[i];
            break;
        case 3: // average
            for (std::size_t i = 0; i < row_bytes; ++i) {
                const int left = i >= static_cast<std::size_t>(bpp) ? px[i - bpp] : 0;
                px[i] = static_cast<std::uint8_t>(px[i] + ((left + prev_row[i]) >> 1));
            }
            break;
        case 4: // paeth
            for (std::size_t i = 0; i < row_bytes; ++i) {
                const int left = i >= static_cast<std::size_t>(bpp) ? px[i - bpp] : 0;
                const int upleft =
                    i >= static_cast<std::size_t>(bpp) ? prev_row[i - bpp] : 0;
                px[i] = static_cast<std::uint8_t>(
                    px[i] + paeth_predictor(left, prev_row[i], upleft));
            }
            break;
        default:
            throw ParseError("decode_png: unknown filter type " +
                             std::to_string(filter));
        }
        std::memcpy(prev_row.data(), px, row_bytes);

        const int out_channels = img.channels();
        for (std::uint32_t x = 0; x < width; ++x)
            for (int c = 0; c < out_channels; ++c)
                img.at(static_cast<int>(x), static_cast<int>(y), c) =
                    px[x * src_channels + c] / 255.0;
    }
    return img;
}

ImageF decode_ppm(const std::uint8_t* data, std::size_t size) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < size) {
            if (std::isspace(data[pos])) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < size && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_space();
        long v = 0;
        bool any = false;
        while (pos < size && data[pos] >= '0' && data[pos] <= '9') {
            v = v * 10 + (data[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) throw ParseError("decode_ppm: missing header integer");
        return v;
    };

    if (size < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
        throw ParseError("decode_ppm: bad magic");
    const int channels = data[1] == '6' ? 3 : 1;
    pos = 2;
    const long width = read_int();
    const long height = read_int();
    const long maxval = read_int();
    if (width <= 0 || height <= 0 || width > static_cast<long>(kMaxDimension) ||
        height > static_cast<long>(kMaxDimension))
        throw ParseError("decode_ppm: unreasonable dimensions");
    if (maxval <= 0 || maxval > 255)
        throw ParseError("decode_ppm: only maxval <= 255 is supported");
    if (pos >= size || !std::isspace(data[pos]))
        throw ParseError("decode_ppm: malformed header");
    ++pos; // single whitespace before raster

    const std::size_t need =
        static_cast<std::size_t>(width) * height * channels;
    if (size - pos < need) throw ParseError("decode_ppm: truncated raster");

    ImageF img(static_cast<int>(width), static_cast<int>(height), channels,
               ColorSpace::kSrgb, Range::kUnit);
    auto& samples = img.samples();
    for (std::size_t i = 0; i < need; ++i)
        samples[i] = data[pos + i] / static_cast<double>(maxval);
    return img;
}

void save_png(const ImageF& img, const std::filesystem::path& path) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("save_png: cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("save_png: write failed for '" + path.string() + "'");
}

ImageF load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_image: cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("load_image: read failed for '" + path.string() + "'");

    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0)
        return decode_png(bytes.data(), bytes.size());
    if (bytes.size() >= 2 && bytes[0] == 'P' &&
        (bytes[1] == '5' || bytes[1] == '6'))
        return decode_ppm(bytes.data(), bytes.size());
    throw ParseError("load_image: '" + path.string() +
                     "' is not a supported image format");
}

} // namespace lowlight
