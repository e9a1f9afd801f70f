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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lowlight {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Deterministic pseudo-random generator (xoshiro256++ seeded via splitmix64).
///
/// The standard library distributions are not pinned across implementations,
/// so everything that must replay bit-exactly draws from this class instead.
/// All methods consume a fixed, documented number of raw draws, which keeps
/// independently configured runs stream-aligned.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = detail::splitmix64(s);
    }

    /// Stable sub-stream seed for (base, salt) pairs; used to give every
    /// corpus image and every pipeline stage its own independent stream.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
        std::uint64_t s = base;
        const std::uint64_t h = detail::splitmix64(s);
        s += (salt + 1) * 0x9E3779B97F4A7C15ULL;
        return h ^ detail::splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (a, b); returns exactly a when a == b.
    /// Always consumes at least one draw even in the degenerate case, so runs
    /// that differ only in ranges stay stream-aligned.
    double uniform(double a, double b) {
        double u;
        do {
            u = next_double();
        } while (u == 0.0);
        if (a == b) return a;
        double r = a + u * (b - a);
        // Rounding at the extremes must not leak an endpoint.
        if (r <= a) r = std::nextafter(a, b);
        if (r >= b) r = std::nextafter(b, a);
        return r;
    }

    /// Standard normal via Box-Muller. Always consumes exactly two draws; no
    /// cached spare, so stream position stays a pure function of call count.
    double normal() {
        const double u1 = 1.0 - next_double(); // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n); rejection-sampled, exactly unbiased.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

private:
    std::uint64_t state_[4];
};

} // namespace lowlight
