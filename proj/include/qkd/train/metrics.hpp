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
 * @file metrics.hpp
 * Confusion-matrix metrics. Binary tasks report precision/recall/F1 for
 * class 1 as the positive class; multi-class tasks report macro averages.
 * A ratio with a zero denominator is reported as 0.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qkd/error.hpp"

namespace qkd::train {

struct BinaryCounts {
    std::size_t tp{0};
    std::size_t tn{0};
    std::size_t fp{0};
    std::size_t fn{0};
};

class ConfusionMatrix {
  public:
    explicit ConfusionMatrix(std::size_t n_classes)
        : n_{n_classes}, counts_(n_classes * n_classes, 0) {}

    void add(std::size_t truth, std::size_t predicted) {
        if (truth >= n_ || predicted >= n_) {
            throw ArgumentError("confusion entry out of range");
        }
        ++counts_[truth * n_ + predicted];
    }

    [[nodiscard]] std::size_t n_classes() const noexcept { return n_; }
    [[nodiscard]] std::size_t at(std::size_t truth, std::size_t predicted) const {
        return counts_[truth * n_ + predicted];
    }
    [[nodiscard]] std::size_t total() const noexcept {
        std::size_t t = 0;
        for (auto c : counts_) {
            t += c;
        }
        return t;
    }

    /// One-vs-rest counts for class c.
    [[nodiscard]] BinaryCounts one_vs_rest(std::size_t c) const {
        BinaryCounts b;
        for (std::size_t t = 0; t < n_; ++t) {
            for (std::size_t p = 0; p < n_; ++p) {
                const auto k = at(t, p);
                if (t == c && p == c) b.tp += k;
                else if (t == c) b.fn += k;
                else if (p == c) b.fp += k;
                else b.tn += k;
            }
        }
        return b;
    }

    friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;

  private:
    std::size_t n_;
    std::vector<std::size_t> counts_;
};

struct MetricsReport {
    std::size_t n_examples{0};
    double accuracy{0.0};
    double precision{0.0};
    double recall{0.0};
    double f1{0.0};
    std::optional<double> acc_per_param{};
    std::optional<double> acc_per_tkd{};

    friend bool operator==(const MetricsReport &, const MetricsReport &) = default;
};

namespace detail {
inline double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
} // namespace detail

[[nodiscard]] inline MetricsReport metrics_from_counts(const BinaryCounts &b) {
    const auto tp = static_cast<double>(b.tp);
    const auto tn = static_cast<double>(b.tn);
    const auto fp = static_cast<double>(b.fp);
    const auto fn = static_cast<double>(b.fn);
    MetricsReport m;
    m.n_examples = b.tp + b.tn + b.fp + b.fn;
    m.accuracy = detail::ratio(tp + tn, tp + tn + fp + fn);
    m.precision = detail::ratio(tp, tp + fp);
    m.recall = detail::ratio(tp, tp + fn);
    m.f1 = detail::ratio(2 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

[[nodiscard]] inline MetricsReport metrics_from_confusion(const ConfusionMatrix &cm) {
    if (cm.total() == 0) {
        throw ArgumentError("metrics of an empty example set");
    }
    MetricsReport m;
    if (cm.n_classes() == 2) {
        m = metrics_from_counts(cm.one_vs_rest(1));
    } else {
        for (std::size_t c = 0; c < cm.n_classes(); ++c) {
            const auto per = metrics_from_counts(cm.one_vs_rest(c));
            m.precision += per.precision;
            m.recall += per.recall;
            m.f1 += per.f1;
        }
        const auto k = static_cast<double>(cm.n_classes());
        m.precision /= k;
        m.recall /= k;
        m.f1 /= k;
        std::size_t correct = 0;
        for (std::size_t c = 0; c < cm.n_classes(); ++c) {
            correct += cm.at(c, c);
        }
        m.accuracy = static_cast<double>(correct) / static_cast<double>(cm.total());
    }
    m.n_examples = cm.total();
    return m;
}

[[nodiscard]] inline double acc_per_param(double accuracy, std::size_t n_params) {
    return detail::ratio(accuracy, static_cast<double>(n_params));
}

[[nodiscard]] inline double acc_per_tkd(double accuracy, double seconds) {
    return detail::ratio(accuracy, seconds);
}

} // namespace qkd::train
