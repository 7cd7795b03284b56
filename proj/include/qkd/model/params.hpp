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
 * @file params.hpp
 * Student model configuration and the flat layout of its trainable values.
 *
 * Flattened order: projection weight (row-major, n x m), projection bias (n),
 * then per layer: UY angles (n x 3, qubit-major), RZZ angles (n - 1,
 * adjacent pairs), UZ angles (n x 3).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/sim/state_vector.hpp"

namespace qkd::model {

struct ModelConfig {
    std::size_t n_qubits{11};
    std::size_t embed_dim{16};
    std::size_t depth{2};
    std::size_t n_classes{2};
    /// Qubits whose Z expectations feed the softmax. Empty means 0..C-1.
    std::vector<std::size_t> readout{};

    [[nodiscard]] std::vector<std::size_t> readout_qubits() const {
        if (!readout.empty()) {
            return readout;
        }
        std::vector<std::size_t> r(n_classes);
        std::iota(r.begin(), r.end(), std::size_t{0});
        return r;
    }

    void validate() const {
        if (n_qubits < 1 || n_qubits > sim::kMaxQubits) {
            throw ConfigError("qubits must be in [1, " +
                              std::to_string(sim::kMaxQubits) + "], got " +
                              std::to_string(n_qubits));
        }
        if (embed_dim < 1) {
            throw ConfigError("embed-dim must be at least 1");
        }
        if (n_classes < 2) {
            throw ConfigError("classes must be at least 2");
        }
        if (n_classes > n_qubits) {
            throw ConfigError("classes (" + std::to_string(n_classes) +
                              ") cannot exceed qubits (" +
                              std::to_string(n_qubits) + ")");
        }
        const auto r = readout_qubits();
        if (r.size() != n_classes) {
            throw ConfigError("readout must list exactly one qubit per class");
        }
        auto sorted = r;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("readout qubits must be distinct");
        }
        if (sorted.back() >= n_qubits) {
            throw ConfigError("readout qubit out of range");
        }
    }
};

/// Trainable values per ansatz layer: 3n (UY) + (n-1) (RZZ) + 3n (UZ).
[[nodiscard]] constexpr std::size_t layer_param_count(std::size_t n) noexcept {
    return 6 * n + (n - 1);
}

[[nodiscard]] constexpr std::size_t param_count(std::size_t n, std::size_t m,
                                                std::size_t p) noexcept {
    return n * m + n + p * layer_param_count(n);
}

[[nodiscard]] inline std::size_t param_count(const ModelConfig &cfg) {
    return param_count(cfg.n_qubits, cfg.embed_dim, cfg.depth);
}

/// Index arithmetic into the flat parameter vector.
class ParamLayout {
  public:
    ParamLayout() = default;
    ParamLayout(std::size_t n, std::size_t m, std::size_t p)
        : n_{n}, m_{m}, p_{p} {}
    explicit ParamLayout(const ModelConfig &cfg)
        : ParamLayout(cfg.n_qubits, cfg.embed_dim, cfg.depth) {}

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t embed_dim() const noexcept { return m_; }
    [[nodiscard]] std::size_t depth() const noexcept { return p_; }
    [[nodiscard]] std::size_t size() const noexcept {
        return param_count(n_, m_, p_);
    }

    [[nodiscard]] std::size_t weight(std::size_t q, std::size_t j) const noexcept {
        return q * m_ + j;
    }
    [[nodiscard]] std::size_t bias(std::size_t q) const noexcept {
        return n_ * m_ + q;
    }
    [[nodiscard]] std::size_t layer_offset(std::size_t layer) const noexcept {
        return n_ * m_ + n_ + layer * layer_param_count(n_);
    }
    [[nodiscard]] std::size_t uy(std::size_t layer, std::size_t q,
                                 std::size_t k) const noexcept {
        return layer_offset(layer) + 3 * q + k;
    }
    [[nodiscard]] std::size_t zz(std::size_t layer, std::size_t pair) const noexcept {
        return layer_offset(layer) + 3 * n_ + pair;
    }
    [[nodiscard]] std::size_t uz(std::size_t layer, std::size_t q,
                                 std::size_t k) const noexcept {
        return layer_offset(layer) + 3 * n_ + (n_ - 1) + 3 * q + k;
    }

    friend bool operator==(const ParamLayout &, const ParamLayout &) = default;

  private:
    std::size_t n_{0};
    std::size_t m_{0};
    std::size_t p_{0};
};

/// Flat real vector shaped by a ParamLayout. The tag keeps parameters and
/// gradients from being mixed up.
template <class Tag> class ParamVector {
  public:
    ParamVector() = default;
    explicit ParamVector(const ParamLayout &layout)
        : layout_{layout}, values_(layout.size(), 0.0) {}
    ParamVector(const ParamLayout &layout, std::vector<double> values)
        : layout_{layout}, values_{std::move(values)} {
        if (values_.size() != layout_.size()) {
            throw ArgumentError("parameter payload has " +
                                std::to_string(values_.size()) +
                                " values, layout expects " +
                                std::to_string(layout_.size()));
        }
    }

    [[nodiscard]] const ParamLayout &layout() const noexcept { return layout_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> flat() const noexcept { return values_; }
    [[nodiscard]] std::span<double> flat() noexcept { return values_; }
    [[nodiscard]] double &operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] double &weight(std::size_t q, std::size_t j) {
        return values_[layout_.weight(q, j)];
    }
    [[nodiscard]] double weight(std::size_t q, std::size_t j) const {
        return values_[layout_.weight(q, j)];
    }
    [[nodiscard]] double &bias(std::size_t q) { return values_[layout_.bias(q)]; }
    [[nodiscard]] double bias(std::size_t q) const {
        return values_[layout_.bias(q)];
    }
    [[nodiscard]] double &uy(std::size_t l, std::size_t q, std::size_t k) {
        return values_[layout_.uy(l, q, k)];
    }
    [[nodiscard]] double &zz(std::size_t l, std::size_t pair) {
        return values_[layout_.zz(l, pair)];
    }
    [[nodiscard]] double &uz(std::size_t l, std::size_t q, std::size_t k) {
        return values_[layout_.uz(l, q, k)];
    }

    [[nodiscard]] bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(),
                           [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const ParamVector &, const ParamVector &) = default;

  private:
    ParamLayout layout_{};
    std::vector<double> values_{};
};

using StudentParams = ParamVector<struct StudentParamsTag>;
using GradientVector = ParamVector<struct GradientVectorTag>;

} // namespace qkd::model
