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
 * @file teacher.hpp
 * Teacher distribution providers. The teacher is read-only from the
 * student's point of view; providers count every read and write so that
 * tests can audit access.
 *
 * Teacher file line: {"id": "...", "probs": [p_0, ..., p_{C-1}]}
 */
#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkd/data/corpus.hpp"
#include "qkd/error.hpp"
#include "qkd/prob_dist.hpp"
#include "qkd/util/random.hpp"

namespace qkd::data {

/// Largest |sum - 1| a teacher row may show before it is rejected. Rows
/// within this band are rescaled; the small slack admits 0.999999 written in
/// decimal.
inline constexpr double kTeacherSumTolerance = 1e-6 + 1e-12;

class TeacherProvider {
  public:
    TeacherProvider() = default;
    TeacherProvider(const TeacherProvider &) = delete;
    TeacherProvider &operator=(const TeacherProvider &) = delete;
    virtual ~TeacherProvider() = default;

    /// Distribution for an example, or nullopt when the provider has none.
    [[nodiscard]] std::optional<ProbDist> lookup(const LabeledExample &ex) const {
        reads_.fetch_add(1, std::memory_order_relaxed);
        return do_lookup(ex);
    }

    [[nodiscard]] std::size_t reads() const noexcept { return reads_.load(); }
    [[nodiscard]] std::size_t writes() const noexcept { return writes_.load(); }

  protected:
    [[nodiscard]] virtual std::optional<ProbDist> do_lookup(const LabeledExample &ex) const = 0;
    void count_write() noexcept { writes_.fetch_add(1, std::memory_order_relaxed); }

  private:
    mutable std::atomic<std::size_t> reads_{0};
    std::atomic<std::size_t> writes_{0};
};

/// id -> distribution table, usually loaded from a teacher file.
class FileTeacher final : public TeacherProvider {
  public:
    FileTeacher() = default;

    /// Loads a teacher file; rows must have n_classes entries.
    FileTeacher(const std::filesystem::path &path, std::size_t n_classes) {
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open teacher file " + path.string());
        }
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            const auto where = path.string() + ":" + std::to_string(lineno);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception &e) {
                throw DataError(where + ": " + e.what());
            }
            if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
                !j.contains("probs") || !j["probs"].is_array()) {
                throw DataError(where + ": expected {id: string, probs: [numbers]}");
            }
            std::vector<double> probs;
            for (const auto &v : j["probs"]) {
                if (!v.is_number()) {
                    throw DataError(where + ": probs must be numbers");
                }
                probs.push_back(v.get<double>());
            }
            if (probs.size() != n_classes) {
                throw DataError(where + ": expected " + std::to_string(n_classes) +
                                " probabilities, got " + std::to_string(probs.size()));
            }
            const auto id = j["id"].get<std::string>();
            if (table_.contains(id)) {
                throw DataError(where + ": duplicate teacher id '" + id + "'");
            }
            try {
                table_.emplace(id, normalize_row(std::move(probs)));
            } catch (const ArgumentError &e) {
                throw DataError(where + ": " + e.what());
            }
        }
    }

    /// Applies the teacher-row rule: as-is when already a distribution,
    /// rescaled when |sum - 1| <= kTeacherSumTolerance, rejected otherwise.
    [[nodiscard]] static ProbDist normalize_row(std::vector<double> probs) {
        double sum = 0.0;
        for (double p : probs) {
            sum += p;
        }
        if (std::abs(sum - 1.0) <= ProbDist::kSumTolerance) {
            return ProbDist(std::move(probs));
        }
        return ProbDist::renormalized(std::move(probs), kTeacherSumTolerance);
    }

    void set(const std::string &id, ProbDist dist) {
        count_write();
        table_.insert_or_assign(id, std::move(dist));
    }

    [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }

  protected:
    [[nodiscard]] std::optional<ProbDist> do_lookup(const LabeledExample &ex) const override {
        if (auto it = table_.find(ex.id); it != table_.end()) {
            return it->second;
        }
        return std::nullopt;
    }

  private:
    std::map<std::string, ProbDist, std::less<>> table_;
};

/// Seeded noisy one-hot teacher. With probability `accuracy` the teacher's
/// top class is the true label, otherwise a uniformly chosen wrong class;
/// `smoothing` mass is spread uniformly over all classes. Each example's
/// draw depends only on (seed, id).
class SyntheticTeacher final : public TeacherProvider {
  public:
    SyntheticTeacher(std::size_t n_classes, double accuracy, double smoothing,
                     std::uint64_t seed)
        : n_classes_{n_classes}, accuracy_{accuracy}, smoothing_{smoothing}, seed_{seed} {
        if (n_classes < 2) {
            throw ConfigError("synthetic teacher needs at least 2 classes");
        }
        if (!(accuracy >= 0.0 && accuracy <= 1.0) || !(smoothing >= 0.0 && smoothing <= 1.0)) {
            throw ConfigError("teacher accuracy and smoothing must lie in [0, 1]");
        }
    }

  protected:
    [[nodiscard]] std::optional<ProbDist> do_lookup(const LabeledExample &ex) const override {
        if (ex.label >= n_classes_) {
            return std::nullopt;
        }
        util::Engine rng(util::mix(seed_, util::fnv1a(ex.id)));
        std::size_t top = ex.label;
        if (!(util::unit(rng()) < accuracy_)) {
            top = (ex.label + 1 + util::below(rng, n_classes_ - 1)) % n_classes_;
        }
        std::vector<double> p(n_classes_, smoothing_ / static_cast<double>(n_classes_));
        p[top] += 1.0 - smoothing_;
        return ProbDist::renormalized(std::move(p), 1e-12);
    }

  private:
    std::size_t n_classes_;
    double accuracy_;
    double smoothing_;
    std::uint64_t seed_;
};

/// Attaches a teacher distribution to every example. Labels and texts are
/// left untouched.
inline void attach_teacher(std::vector<LabeledExample> &examples,
                           const TeacherProvider &provider) {
    std::vector<std::string> missing;
    std::vector<std::optional<ProbDist>> found;
    found.reserve(examples.size());
    for (const auto &ex : examples) {
        found.push_back(provider.lookup(ex));
        if (!found.back()) {
            missing.push_back(ex.id);
        }
    }
    if (!missing.empty()) {
        std::string msg = "teacher distribution missing for " +
                          std::to_string(missing.size()) + " example(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
            msg += " " + missing[i];
        }
        if (missing.size() > 10) {
            msg += " ...";
        }
        throw DataError(msg);
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
        examples[i].teacher = std::move(found[i]);
    }
}

inline void attach_teacher(SplitCorpus &corpus, const TeacherProvider &provider) {
    attach_teacher(corpus.train, provider);
    attach_teacher(corpus.validation, provider);
    attach_teacher(corpus.test, provider);
}

/// Writes the attached teacher distributions of `examples`.
inline void write_teacher_file(const std::filesystem::path &path,
                               const std::vector<LabeledExample> &examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write teacher file " + path.string());
    }
    for (const auto &ex : examples) {
        if (!ex.teacher) {
            throw DataError("example '" + ex.id + "' has no teacher distribution");
        }
        nlohmann::ordered_json j;
        j["id"] = ex.id;
        j["probs"] = std::vector<double>(ex.teacher->begin(), ex.teacher->end());
        out << j.dump() << '\n';
    }
}

} // namespace qkd::data
