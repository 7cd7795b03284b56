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
 * @file prob_dist.hpp
 * Class probability distribution (teacher output, student output or a
 * one-hot label).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"

namespace qkd {

class ProbDist {
  public:
    static constexpr double kSumTolerance = 1e-9;

    ProbDist() = default;
    ProbDist(std::initializer_list<double> values) : ProbDist(std::vector<double>(values)) {}
    /// Throws ArgumentError unless entries are finite, non-negative and sum
    /// to one within kSumTolerance.
    explicit ProbDist(std::vector<double> values) : values_{std::move(values)} {
        check(values_, kSumTolerance);
    }

    [[nodiscard]] static ProbDist one_hot(std::size_t n_classes, std::size_t label) {
        if (label >= n_classes) {
            throw ArgumentError("label " + std::to_string(label) +
                                " out of range for " + std::to_string(n_classes) +
                                " classes");
        }
        std::vector<double> v(n_classes, 0.0);
        v[label] = 1.0;
        return ProbDist(std::move(v));
    }

    [[nodiscard]] static ProbDist uniform(std::size_t n_classes) {
        return ProbDist(std::vector<double>(n_classes, 1.0 / static_cast<double>(n_classes)));
    }

    /// Rescales to unit sum when the deviation is at most `tolerance`.
    [[nodiscard]] static ProbDist renormalized(std::vector<double> values,
                                               double tolerance) {
        check(values, tolerance);
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        if (sum != 1.0) {
            for (double &v : values) {
                v /= sum;
            }
        }
        return ProbDist(std::move(values));
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

    /// Lowest index among maximal entries.
    [[nodiscard]] std::size_t argmax() const noexcept {
        return static_cast<std::size_t>(
            std::max_element(values_.begin(), values_.end()) - values_.begin());
    }

    friend bool operator==(const ProbDist &, const ProbDist &) = default;

  private:
    static void check(const std::vector<double> &values, double tolerance) {
        if (values.empty()) {
            throw ArgumentError("probability distribution is empty");
        }
        double sum = 0.0;
        for (double v : values) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ArgumentError("probability entries must be finite and non-negative");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerance) {
            throw ArgumentError("probabilities sum to " + std::to_string(sum) +
                                ", not 1");
        }
    }

    std::vector<double> values_{};
};

} // namespace qkd
