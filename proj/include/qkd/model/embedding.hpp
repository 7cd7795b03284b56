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
 * @file embedding.hpp
 * Frozen token embedding table. Rows are generated on demand from a seeded
 * hash, entry ~ uniform(-1, 1), unless an explicit row was supplied.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/util/random.hpp"

namespace qkd::model {

using TokenId = std::uint32_t;

class EmbeddingTable {
  public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t dim, std::uint64_t seed) : dim_{dim}, seed_{seed} {
        if (dim == 0) {
            throw ConfigError("embedding dimension must be positive");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const std::map<TokenId, std::vector<double>> &overrides() const noexcept {
        return overrides_;
    }

    void set_row(TokenId token, std::vector<double> row) {
        if (row.size() != dim_) {
            throw ConfigError("embedding row has dimension " +
                              std::to_string(row.size()) + ", expected " +
                              std::to_string(dim_));
        }
        overrides_[token] = std::move(row);
    }

    [[nodiscard]] double entry(TokenId token, std::size_t j) const {
        if (auto it = overrides_.find(token); it != overrides_.end()) {
            return it->second[j];
        }
        const std::uint64_t h = util::mix(util::mix(seed_, token), j);
        return 2.0 * util::unit(h) - 1.0;
    }

    [[nodiscard]] std::vector<double> row(TokenId token) const {
        std::vector<double> out(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            out[j] = entry(token, j);
        }
        return out;
    }

    /// Arithmetic mean of the token rows.
    [[nodiscard]] std::vector<double> pooled(std::span<const TokenId> tokens) const {
        if (tokens.empty()) {
            throw InputError("cannot embed an empty token sequence");
        }
        std::vector<double> acc(dim_, 0.0);
        for (TokenId t : tokens) {
            for (std::size_t j = 0; j < dim_; ++j) {
                acc[j] += entry(t, j);
            }
        }
        const double inv = 1.0 / static_cast<double>(tokens.size());
        for (double &v : acc) {
            v *= inv;
        }
        return acc;
    }

    friend bool operator==(const EmbeddingTable &, const EmbeddingTable &) = default;

  private:
    std::size_t dim_{0};
    std::uint64_t seed_{0};
    std::map<TokenId, std::vector<double>> overrides_{};
};

} // namespace qkd::model
