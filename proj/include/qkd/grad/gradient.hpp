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
 * @file gradient.hpp
 * Gradients of the batch distillation loss with respect to every student
 * parameter.
 *
 * loss_gradient uses the adjoint method: one forward sweep, then a reverse
 * sweep that uncomputes the state and a co-state together. With
 * U_k = exp(-i theta_k/2 P_k) and observable H = sum_c (dL/de_c) Z_{r_c},
 *
 *   dL/dtheta_k = Im <lambda_k| P_k |phi_k>,
 *
 * where phi_k is the state just after gate k and lambda_k is H|psi> pulled
 * back through the gates after k. Encoding-angle gradients are chained into
 * the projection weight and bias.
 *
 * parameter_shift_gradient and finite_diff_gradient are independent oracles.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/loss/distillation_loss.hpp"
#include "qkd/model/circuit.hpp"
#include "qkd/model/params.hpp"
#include "qkd/prob_dist.hpp"
#include "qkd/util/parallel.hpp"

namespace qkd::grad {

using model::GradientVector;
using model::StudentParams;

/// An example reduced to what the loss needs: pooled embedding, label and
/// (optionally) the teacher distribution.
struct Example {
    std::string id;
    std::vector<double> pooled;
    std::size_t label{0};
    std::optional<ProbDist> teacher;
};

struct LossAndGradient {
    double loss{0.0};
    GradientVector gradient;
    /// Total simulator gate kernels run for the whole batch.
    std::size_t gate_applications{0};
};

namespace detail {

inline loss::LossSample make_sample(const Example &ex, ProbDist q,
                                    const model::ModelConfig &config) {
    return {ex.teacher, std::move(q), ProbDist::one_hot(config.n_classes, ex.label)};
}

inline void check_batch(std::span<const Example> batch, const loss::LossSpec &spec) {
    if (batch.empty()) {
        throw ArgumentError("gradient of an empty batch");
    }
    if (loss::needs_teacher(spec.mode())) {
        for (const auto &ex : batch) {
            if (!ex.teacher) {
                throw DataError("example '" + ex.id + "' has no teacher distribution");
            }
        }
    }
}

/// dL/de for readout expectations e, given dL/dq and q = softmax(e).
inline std::vector<double> softmax_backward(const ProbDist &q, std::span<const double> dq) {
    double dot = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        dot += q[j] * dq[j];
    }
    std::vector<double> de(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        de[k] = q[k] * (dq[k] - dot);
    }
    return de;
}

/// Adds dz into the weight/bias blocks and dtheta into the ansatz block.
inline void scatter(GradientVector &out, const Example &ex, std::span<const double> dz) {
    const auto &L = out.layout();
    for (std::size_t q = 0; q < L.n_qubits(); ++q) {
        for (std::size_t j = 0; j < L.embed_dim(); ++j) {
            out.weight(q, j) += dz[q] * ex.pooled[j];
        }
        out.bias(q) += dz[q];
    }
}

inline double sample_loss_checked(const Example &ex, const loss::LossSample &s,
                                  const loss::LossSpec &spec) {
    const double l = loss::combined_loss(std::span<const loss::LossSample>(&s, 1), spec);
    if (!std::isfinite(l)) {
        throw NumericalError("non-finite loss on example '" + ex.id + "'");
    }
    return l;
}

struct PerExample {
    GradientVector grad;
    loss::LossSample sample;
    std::size_t gates{0};
};

inline PerExample adjoint_one(const Example &ex, const StudentParams &params,
                              const model::ModelConfig &config, const loss::LossSpec &spec,
                              double scale) {
    const auto z = model::encoding_angles(ex.pooled, params);
    const auto schedule = model::full_schedule(z, params);

    sim::StateVector phi(config.n_qubits);
    model::run(phi, schedule);
    const auto e = model::readout(phi, config);
    ProbDist q(model::softmax(e));
    auto sample = make_sample(ex, std::move(q), config);
    sample_loss_checked(ex, sample, spec);

    auto dq = loss::student_gradient(sample, spec);
    for (double &v : dq) {
        v *= scale;
    }
    const auto de = softmax_backward(sample.student, dq);

    // lambda = H |psi>, H diagonal in the computational basis.
    sim::StateVector lambda = phi;
    const std::size_t lambda_base = lambda.gate_applications();
    std::size_t generator_gates = 0;
    const auto qubits = config.readout_qubits();
    auto amps = lambda.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        double h = 0.0;
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            h += ((i >> qubits[k]) & 1U) ? -de[k] : de[k];
        }
        amps[i] *= h;
    }

    GradientVector grad(params.layout());
    std::vector<double> dz(config.n_qubits, 0.0);
    sim::StateVector scratch(config.n_qubits);
    for (std::size_t k = schedule.size(); k-- > 0;) {
        const auto &g = schedule[k];
        if (g.source != model::AngleSource::Fixed) {
            scratch = phi;
            scratch.apply_generator(g.op);
            generator_gates += scratch.gate_applications() - phi.gate_applications();
            std::complex<double> overlap{0.0, 0.0};
            const auto l = lambda.amplitudes();
            const auto s = scratch.amplitudes();
            for (std::size_t i = 0; i < l.size(); ++i) {
                overlap += std::conj(l[i]) * s[i];
            }
            if (g.source == model::AngleSource::Encoding) {
                dz[g.index] += overlap.imag();
            } else {
                grad[g.index] += overlap.imag();
            }
        }
        if (k > 0) {
            phi.apply_adjoint(g.op);
            lambda.apply_adjoint(g.op);
        }
    }
    scatter(grad, ex, dz);
    const std::size_t gates =
        phi.gate_applications() + (lambda.gate_applications() - lambda_base) + generator_gates;
    return {std::move(grad), std::move(sample), gates};
}

} // namespace detail

/// Student output samples for a batch (no gradient).
[[nodiscard]] inline std::vector<loss::LossSample>
predict_samples(std::span<const Example> batch, const StudentParams &params,
                const model::ModelConfig &config, std::size_t threads = 1) {
    std::vector<std::optional<loss::LossSample>> slots(batch.size());
    util::parallel_for(batch.size(), threads, [&](std::size_t i) {
        auto q = model::forward_pooled(batch[i].pooled, params, config).probs;
        slots[i] = detail::make_sample(batch[i], std::move(q), config);
    });
    std::vector<loss::LossSample> out;
    out.reserve(batch.size());
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

[[nodiscard]] inline double batch_loss(std::span<const Example> batch,
                                       const StudentParams &params,
                                       const model::ModelConfig &config,
                                       const loss::LossSpec &spec, std::size_t threads = 1) {
    detail::check_batch(batch, spec);
    const auto samples = predict_samples(batch, params, config, threads);
    return loss::combined_loss(samples, spec);
}

/// Batch-mean loss and its adjoint gradient. Per-example work may run on
/// `threads` workers; the reduction is always in example order.
[[nodiscard]] inline LossAndGradient loss_gradient(std::span<const Example> batch,
                                                   const StudentParams &params,
                                                   const model::ModelConfig &config,
                                                   const loss::LossSpec &spec,
                                                   std::size_t threads = 1) {
    detail::check_batch(batch, spec);
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<std::optional<detail::PerExample>> parts(batch.size());
    util::parallel_for(batch.size(), threads, [&](std::size_t i) {
        parts[i] = detail::adjoint_one(batch[i], params, config, spec, scale);
    });

    LossAndGradient out{0.0, GradientVector(params.layout()), 0};
    std::vector<loss::LossSample> samples;
    samples.reserve(batch.size());
    auto acc = out.gradient.flat();
    for (auto &p : parts) {
        const auto g = p->grad.flat();
        for (std::size_t j = 0; j < acc.size(); ++j) {
            acc[j] += g[j];
        }
        out.gate_applications += p->gates;
        samples.push_back(std::move(p->sample));
    }
    out.loss = loss::combined_loss(samples, spec);
    if (!std::isfinite(out.loss)) {
        throw NumericalError("non-finite batch loss");
    }
    if (!out.gradient.all_finite()) {
        throw NumericalError("non-finite gradient");
    }
    return out;
}

/// Parameter-shift oracle: de_c/dtheta = [e_c(theta + pi/2) - e_c(theta - pi/2)] / 2
/// per rotation, chained through softmax and the loss.
[[nodiscard]] inline GradientVector parameter_shift_gradient(std::span<const Example> batch,
                                                             const StudentParams &params,
                                                             const model::ModelConfig &config,
                                                             const loss::LossSpec &spec) {
    detail::check_batch(batch, spec);
    constexpr double shift = std::numbers::pi / 2;
    const double scale = 1.0 / static_cast<double>(batch.size());
    GradientVector total(params.layout());
    for (const auto &ex : batch) {
        const auto z = model::encoding_angles(ex.pooled, params);
        const auto schedule = model::full_schedule(z, params);
        const auto expect = [&](const model::Schedule &s) {
            sim::StateVector st(config.n_qubits);
            model::run(st, s);
            return model::readout(st, config);
        };
        const auto e = expect(schedule);
        auto sample = detail::make_sample(ex, ProbDist(model::softmax(e)), config);
        auto dq = loss::student_gradient(sample, spec);
        for (double &v : dq) {
            v *= scale;
        }
        const auto de = detail::softmax_backward(sample.student, dq);

        GradientVector grad(params.layout());
        std::vector<double> dz(config.n_qubits, 0.0);
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            if (schedule[k].source == model::AngleSource::Fixed) {
                continue;
            }
            auto plus = schedule;
            auto minus = schedule;
            plus[k].op.angle += shift;
            minus[k].op.angle -= shift;
            const auto ep = expect(plus);
            const auto em = expect(minus);
            double d = 0.0;
            for (std::size_t c = 0; c < de.size(); ++c) {
                d += de[c] * 0.5 * (ep[c] - em[c]);
            }
            if (schedule[k].source == model::AngleSource::Encoding) {
                dz[schedule[k].index] += d;
            } else {
                grad[schedule[k].index] += d;
            }
        }
        detail::scatter(grad, ex, dz);
        auto acc = total.flat();
        const auto g = grad.flat();
        for (std::size_t j = 0; j < acc.size(); ++j) {
            acc[j] += g[j];
        }
    }
    return total;
}

/// Central differences of batch_loss, one coordinate at a time.
[[nodiscard]] inline GradientVector finite_diff_gradient(std::span<const Example> batch,
                                                         const StudentParams &params,
                                                         const model::ModelConfig &config,
                                                         const loss::LossSpec &spec, double h) {
    if (!(h > 0.0 && h <= 1e-2)) {
        throw ArgumentError("finite-difference step must lie in (0, 1e-2]");
    }
    GradientVector out(params.layout());
    StudentParams probe = params;
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double saved = probe[j];
        probe[j] = saved + h;
        const double up = batch_loss(batch, probe, config, spec);
        probe[j] = saved - h;
        const double down = batch_loss(batch, probe, config, spec);
        probe[j] = saved;
        out[j] = (up - down) / (2 * h);
    }
    return out;
}

} // namespace qkd::grad
