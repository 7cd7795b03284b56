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
 * @file distillation_loss.hpp
 * KL, JS and cross-entropy terms and the weighted distillation objective
 *
 *   L = lambda1 * mean(KL(f||q) + JS(f, q)) + lambda2 * mean(CE(y, q)),
 *   lambda1 = 1 - lambda2,
 *
 * plus the single-term ablation modes. Natural logarithms; every log argument
 * is floored at kLogFloor.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/prob_dist.hpp"

namespace qkd::loss {

inline constexpr double kLogFloor = 1e-12;

enum class LossMode { CE, KL, JS, Combined };

[[nodiscard]] constexpr std::string_view mode_name(LossMode m) noexcept {
    switch (m) {
    case LossMode::CE: return "CE";
    case LossMode::KL: return "KL";
    case LossMode::JS: return "JS";
    case LossMode::Combined: return "KL+JS+CE";
    }
    return "?";
}

/// Accepts "CE", "KL", "JS", "COMBINED" or "KL+JS+CE" (case-insensitive).
[[nodiscard]] inline LossMode parse_mode(std::string_view text) {
    std::string up(text);
    std::transform(up.begin(), up.end(), up.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (up == "CE") return LossMode::CE;
    if (up == "KL") return LossMode::KL;
    if (up == "JS") return LossMode::JS;
    if (up == "COMBINED" || up == "KL+JS+CE") return LossMode::Combined;
    throw ConfigError("unknown loss mode '" + std::string(text) +
                      "' (expected CE, KL, JS or COMBINED)");
}

[[nodiscard]] constexpr bool needs_teacher(LossMode m) noexcept {
    return m != LossMode::CE;
}

class LossSpec {
  public:
    LossSpec() = default;
    LossSpec(LossMode mode, double lambda2) : mode_{mode}, lambda2_{lambda2} {
        if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) {
            throw ConfigError("lambda2 must lie in [0, 1]");
        }
    }

    [[nodiscard]] LossMode mode() const noexcept { return mode_; }
    /// CE weight.
    [[nodiscard]] double lambda2() const noexcept { return lambda2_; }
    /// Teacher-matching weight.
    [[nodiscard]] double lambda1() const noexcept { return 1.0 - lambda2_; }

    friend bool operator==(const LossSpec &, const LossSpec &) = default;

  private:
    LossMode mode_{LossMode::Combined};
    double lambda2_{0.1};
};

namespace detail {
inline double flog(double x) { return std::log(std::max(x, kLogFloor)); }

inline void same_length(const ProbDist &a, const ProbDist &b) {
    if (a.size() != b.size()) {
        throw ArgumentError("distribution lengths differ (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
    }
}
} // namespace detail

/// sum_i f_i log(f_i / q_i); zero-probability terms of f contribute 0.
[[nodiscard]] inline double kl_divergence(const ProbDist &f, const ProbDist &q) {
    detail::same_length(f, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] > 0.0) {
            acc += f[i] * (detail::flog(f[i]) - detail::flog(q[i]));
        }
    }
    return acc;
}

/// 1/2 [KL(f||m) + KL(q||m)], m = (f + q) / 2.
[[nodiscard]] inline double js_divergence(const ProbDist &f, const ProbDist &q) {
    detail::same_length(f, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double lm = detail::flog(0.5 * (f[i] + q[i]));
        if (f[i] > 0.0) {
            acc += f[i] * (detail::flog(f[i]) - lm);
        }
        if (q[i] > 0.0) {
            acc += q[i] * (detail::flog(q[i]) - lm);
        }
    }
    return 0.5 * acc;
}

[[nodiscard]] inline std::size_t one_hot_index(const ProbDist &y) {
    std::size_t hot = y.size();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1.0) {
            if (hot != y.size()) {
                throw ArgumentError("target is not one-hot");
            }
            hot = i;
        } else if (y[i] != 0.0) {
            throw ArgumentError("target is not one-hot");
        }
    }
    if (hot == y.size()) {
        throw ArgumentError("target is not one-hot");
    }
    return hot;
}

/// -sum_i y_i log q_i for one-hot y.
[[nodiscard]] inline double cross_entropy(const ProbDist &y, const ProbDist &q) {
    detail::same_length(y, q);
    return -detail::flog(q[one_hot_index(y)]);
}

/// One (teacher f, student q, target y) triple. The teacher may be absent in
/// CE mode.
struct LossSample {
    std::optional<ProbDist> teacher;
    ProbDist student;
    ProbDist target;
};

namespace detail {
inline const ProbDist &teacher_of(const LossSample &s) {
    if (!s.teacher) {
        throw ArgumentError("loss mode requires a teacher distribution");
    }
    return *s.teacher;
}
} // namespace detail

/// Batch objective. COMBINED returns lambda1 * mean(KL + JS) +
/// lambda2 * mean(CE); the other modes return the mean of their own term.
[[nodiscard]] inline double combined_loss(std::span<const LossSample> batch,
                                          const LossSpec &spec) {
    if (batch.empty()) {
        throw ArgumentError("loss of an empty batch");
    }
    const std::size_t c = batch.front().student.size();
    double divergence = 0.0;
    double ce = 0.0;
    for (const auto &s : batch) {
        if (s.student.size() != c || s.target.size() != c ||
            (s.teacher && s.teacher->size() != c)) {
            throw ArgumentError("batch mixes class counts");
        }
        switch (spec.mode()) {
        case LossMode::CE: ce += cross_entropy(s.target, s.student); break;
        case LossMode::KL: divergence += kl_divergence(detail::teacher_of(s), s.student); break;
        case LossMode::JS: divergence += js_divergence(detail::teacher_of(s), s.student); break;
        case LossMode::Combined: {
            const auto &f = detail::teacher_of(s);
            divergence += kl_divergence(f, s.student) + js_divergence(f, s.student);
            ce += cross_entropy(s.target, s.student);
            break;
        }
        }
    }
    const auto n = static_cast<double>(batch.size());
    switch (spec.mode()) {
    case LossMode::CE: return ce / n;
    case LossMode::KL:
    case LossMode::JS: return divergence / n;
    case LossMode::Combined: return spec.lambda1() * (divergence / n) + spec.lambda2() * (ce / n);
    }
    return 0.0;
}

/// d(loss contribution of one sample)/dq, unscaled by the batch size.
/// Assumes q entries exceed kLogFloor, which holds for softmax outputs of
/// bounded logits.
[[nodiscard]] inline std::vector<double> student_gradient(const LossSample &s,
                                                          const LossSpec &spec) {
    const std::size_t c = s.student.size();
    std::vector<double> g(c, 0.0);
    const auto &q = s.student;
    const auto add_kl = [&](double w) {
        const auto &f = detail::teacher_of(s);
        for (std::size_t i = 0; i < c; ++i) {
            if (f[i] > 0.0) {
                g[i] -= w * f[i] / std::max(q[i], kLogFloor);
            }
        }
    };
    const auto add_js = [&](double w) {
        const auto &f = detail::teacher_of(s);
        for (std::size_t i = 0; i < c; ++i) {
            g[i] += w * 0.5 * (detail::flog(q[i]) - detail::flog(0.5 * (f[i] + q[i])));
        }
    };
    const auto add_ce = [&](double w) {
        const auto t = one_hot_index(s.target);
        g[t] -= w / std::max(q[t], kLogFloor);
    };
    switch (spec.mode()) {
    case LossMode::CE: add_ce(1.0); break;
    case LossMode::KL: add_kl(1.0); break;
    case LossMode::JS: add_js(1.0); break;
    case LossMode::Combined:
        add_kl(spec.lambda1());
        add_js(spec.lambda1());
        add_ce(spec.lambda2());
        break;
    }
    return g;
}

} // namespace qkd::loss
