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
 * @file adam.hpp
 * Bias-corrected Adam over flat parameter vectors.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/model/params.hpp"

namespace qkd::optim {

struct AdamHyper {
    double lr{0.06};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};

    friend bool operator==(const AdamHyper &, const AdamHyper &) = default;
};

struct AdamState {
    AdamHyper hyper{};
    std::uint64_t step{0};
    std::vector<double> first_moment{};
    std::vector<double> second_moment{};

    AdamState() = default;
    AdamState(std::size_t n_params, AdamHyper h)
        : hyper{h}, first_moment(n_params, 0.0), second_moment(n_params, 0.0) {}

    friend bool operator==(const AdamState &, const AdamState &) = default;
};

/// In-place update of `params` and `state`.
inline void adam_update(std::span<double> params, std::span<const double> grads,
                        AdamState &state) {
    if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size()) {
        throw ArgumentError("Adam: parameter, gradient and moment sizes differ");
    }
    for (double g : grads) {
        if (!std::isfinite(g)) {
            throw NumericalError("Adam: non-finite gradient");
        }
    }
    const auto &h = state.hyper;
    ++state.step;
    const auto t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(h.beta1, t);
    const double c2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        double &m = state.first_moment[i];
        double &v = state.second_moment[i];
        m = h.beta1 * m + (1.0 - h.beta1) * grads[i];
        v = h.beta2 * v + (1.0 - h.beta2) * grads[i] * grads[i];
        const double m_hat = m / c1;
        const double v_hat = v / c2;
        params[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

struct AdamResult {
    model::StudentParams params;
    AdamState state;
};

[[nodiscard]] inline AdamResult adam_step(model::StudentParams params,
                                          const model::GradientVector &grads, AdamState state) {
    if (!(params.layout() == grads.layout())) {
        throw ArgumentError("Adam: gradient shape differs from parameter shape");
    }
    adam_update(params.flat(), grads.flat(), state);
    return {std::move(params), std::move(state)};
}

} // namespace qkd::optim
