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
 * @file circuit.hpp
 * The student circuit: linear projection of the pooled embedding, RX angle
 * encoding, p ansatz layers, Z readout and softmax.
 *
 * Each ansatz layer applies, in order: three RY on every qubit, RZZ on every
 * adjacent pair (i, i+1), three RZ on every qubit, CNOT(i -> i+1) on every
 * adjacent pair.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/model/embedding.hpp"
#include "qkd/model/params.hpp"
#include "qkd/prob_dist.hpp"
#include "qkd/sim/state_vector.hpp"

namespace qkd::model {

/// Where a scheduled gate takes its angle from.
enum class AngleSource {
    Fixed,     ///< no angle (CNOT)
    Encoding,  ///< encoding angle z[index]
    Trainable, ///< flat parameter index
};

struct ScheduledGate {
    sim::GateOp op;
    AngleSource source{AngleSource::Fixed};
    std::size_t index{0};
};

using Schedule = std::vector<ScheduledGate>;

/// z = W E + b.
[[nodiscard]] inline std::vector<double> encoding_angles(std::span<const double> pooled,
                                                         const StudentParams &params) {
    const auto &layout = params.layout();
    if (pooled.size() != layout.embed_dim()) {
        throw ConfigError("embedding dimension " + std::to_string(pooled.size()) +
                          " does not match model embed-dim " +
                          std::to_string(layout.embed_dim()));
    }
    std::vector<double> z(layout.n_qubits());
    for (std::size_t q = 0; q < z.size(); ++q) {
        double acc = params.bias(q);
        for (std::size_t j = 0; j < pooled.size(); ++j) {
            acc += params.weight(q, j) * pooled[j];
        }
        z[q] = acc;
    }
    return z;
}

[[nodiscard]] inline Schedule encoding_schedule(std::span<const double> z) {
    Schedule s;
    s.reserve(z.size());
    for (std::size_t q = 0; q < z.size(); ++q) {
        s.push_back({sim::GateOp::single(sim::GateKind::RX, q, z[q]),
                     AngleSource::Encoding, q});
    }
    return s;
}

[[nodiscard]] inline Schedule ansatz_schedule(const StudentParams &params) {
    using sim::GateKind;
    using sim::GateOp;
    const auto &L = params.layout();
    const std::size_t n = L.n_qubits();
    Schedule s;
    s.reserve(L.depth() * (7 * n));
    for (std::size_t l = 0; l < L.depth(); ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t k = 0; k < 3; ++k) {
                const auto idx = L.uy(l, q, k);
                s.push_back({GateOp::single(GateKind::RY, q, params[idx]),
                             AngleSource::Trainable, idx});
            }
        }
        for (std::size_t q = 0; q + 1 < n; ++q) {
            const auto idx = L.zz(l, q);
            s.push_back({GateOp::pair(GateKind::RZZ, q, q + 1, params[idx]),
                         AngleSource::Trainable, idx});
        }
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t k = 0; k < 3; ++k) {
                const auto idx = L.uz(l, q, k);
                s.push_back({GateOp::single(GateKind::RZ, q, params[idx]),
                             AngleSource::Trainable, idx});
            }
        }
        for (std::size_t q = 0; q + 1 < n; ++q) {
            s.push_back({GateOp::pair(GateKind::CNOT, q, q + 1), AngleSource::Fixed, 0});
        }
    }
    return s;
}

[[nodiscard]] inline Schedule full_schedule(std::span<const double> z,
                                            const StudentParams &params) {
    Schedule s = encoding_schedule(z);
    Schedule a = ansatz_schedule(params);
    s.insert(s.end(), a.begin(), a.end());
    return s;
}

inline sim::StateVector &run(sim::StateVector &state, const Schedule &schedule) {
    for (const auto &g : schedule) {
        state.apply(g.op);
    }
    return state;
}

/// prod_i RX(z_i) |0>^n with z = W * mean(embedding rows) + b.
[[nodiscard]] inline sim::StateVector encode(std::span<const TokenId> tokens,
                                             const EmbeddingTable &embedding,
                                             const StudentParams &params) {
    if (embedding.dim() != params.layout().embed_dim()) {
        throw ConfigError("embedding table dimension does not match model embed-dim");
    }
    const auto z = encoding_angles(embedding.pooled(tokens), params);
    sim::StateVector state(params.layout().n_qubits());
    return std::move(run(state, encoding_schedule(z)));
}

[[nodiscard]] inline sim::StateVector apply_ansatz(sim::StateVector state,
                                                   const StudentParams &params) {
    if (state.n_qubits() != params.layout().n_qubits()) {
        throw ArgumentError("state has " + std::to_string(state.n_qubits()) +
                            " qubits, model expects " +
                            std::to_string(params.layout().n_qubits()));
    }
    run(state, ansatz_schedule(params));
    return state;
}

/// Numerically stable softmax.
[[nodiscard]] inline std::vector<double> softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        sum += out[i];
    }
    for (double &v : out) {
        v /= sum;
    }
    return out;
}

[[nodiscard]] inline std::vector<double> readout(const sim::StateVector &state,
                                                 const ModelConfig &config) {
    const auto z = state.z_expectations();
    const auto qubits = config.readout_qubits();
    std::vector<double> out(qubits.size());
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        out[k] = z[qubits[k]];
    }
    return out;
}

/// Forward pass from precomputed pooled embedding; returns the readout
/// expectations alongside the distribution.
struct ForwardResult {
    std::vector<double> expectations;
    ProbDist probs;
};

[[nodiscard]] inline ForwardResult forward_pooled(std::span<const double> pooled,
                                                  const StudentParams &params,
                                                  const ModelConfig &config) {
    if (config.n_qubits != params.layout().n_qubits()) {
        throw ConfigError("parameters were built for a different qubit count");
    }
    sim::StateVector state(config.n_qubits);
    run(state, full_schedule(encoding_angles(pooled, params), params));
    auto e = readout(state, config);
    auto q = softmax(e);
    return {std::move(e), ProbDist(std::move(q))};
}

[[nodiscard]] inline ProbDist forward(std::span<const TokenId> tokens,
                                      const EmbeddingTable &embedding,
                                      const StudentParams &params,
                                      const ModelConfig &config) {
    if (embedding.dim() != config.embed_dim) {
        throw ConfigError("embedding table dimension does not match model embed-dim");
    }
    return forward_pooled(embedding.pooled(tokens), params, config).probs;
}

} // namespace qkd::model
