// Copyright 2026 The qkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file random.hpp
 * Portable seeded randomness. The standard distributions are implementation
 * defined, so everything that feeds a checkpoint or metrics file goes
 * through these helpers instead.
 */
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace qkd::util {

using Engine = std::mt19937_64;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t mix(std::uint64_t a,
                                          std::uint64_t b) noexcept {
    return splitmix64(a ^ splitmix64(b));
}

/// FNV-1a, used to derive stable per-string seeds and content fingerprints.
[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view s,
                                            std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derive an independent sub-seed for a named purpose.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                                  std::string_view purpose) noexcept {
    return mix(seed, fnv1a(purpose));
}

/// Uniform double in [0, 1) from the top 53 bits.
[[nodiscard]] inline double unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

[[nodiscard]] inline double uniform(Engine &rng, double lo, double hi) {
    return lo + (hi - lo) * unit(rng());
}

/// Unbiased integer in [0, bound) by rejection.
[[nodiscard]] inline std::uint64_t below(Engine &rng, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % bound;
}

template <class T> void shuffle(std::vector<T> &items, Engine &rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace qkd::util
