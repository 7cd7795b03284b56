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
 * @file corpus.hpp
 * Labeled examples, line-delimited JSON corpus files and the seeded
 * stratified 6:2:2 split.
 *
 * Corpus line: {"id": "...", "text": "...", "label": 0}
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkd/data/tokenizer.hpp"
#include "qkd/error.hpp"
#include "qkd/prob_dist.hpp"
#include "qkd/util/random.hpp"

namespace qkd::data {

struct LabeledExample {
    std::string id;
    std::string text;
    std::vector<TokenId> tokens;
    std::size_t label{0};
    std::optional<ProbDist> teacher;

    friend bool operator==(const LabeledExample &, const LabeledExample &) = default;
};

struct SplitCorpus {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> validation;
    std::vector<LabeledExample> test;
    std::uint64_t seed{0};
};

/// Reads a corpus file. Labels must be < n_classes.
[[nodiscard]] inline std::vector<LabeledExample> read_corpus(const std::filesystem::path &path,
                                                             std::size_t n_classes) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus file " + path.string());
    }
    std::vector<LabeledExample> out;
    std::set<std::string> seen;
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
            !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
            !j["label"].is_number_integer()) {
            throw DataError(where + ": expected {id: string, text: string, label: integer}");
        }
        const auto label = j["label"].get<std::int64_t>();
        if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
            throw DataError(where + ": label " + std::to_string(label) + " outside [0, " +
                            std::to_string(n_classes) + ")");
        }
        LabeledExample ex;
        ex.id = j["id"].get<std::string>();
        ex.text = j["text"].get<std::string>();
        ex.label = static_cast<std::size_t>(label);
        if (!seen.insert(ex.id).second) {
            throw DataError(where + ": duplicate id '" + ex.id + "'");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

inline void write_corpus(const std::filesystem::path &path,
                         const std::vector<LabeledExample> &examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write corpus file " + path.string());
    }
    for (const auto &ex : examples) {
        nlohmann::ordered_json j;
        j["id"] = ex.id;
        j["text"] = ex.text;
        j["label"] = ex.label;
        out << j.dump() << '\n';
    }
}

/// Split sizes for n items in ratio 6:2:2 by largest remainder; ties favor
/// train, then validation.
[[nodiscard]] inline std::array<std::size_t, 3> split_sizes(std::size_t n) {
    constexpr std::array<std::size_t, 3> weights{6, 2, 2};
    std::array<std::size_t, 3> sizes{};
    std::array<std::size_t, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        sizes[k] = n * weights[k] / 10;
        rem[k] = n * weights[k] % 10;
        assigned += sizes[k];
    }
    for (std::size_t left = n - assigned; left > 0; --left) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 3; ++k) {
            if (rem[k] > rem[best]) {
                best = k;
            }
        }
        ++sizes[best];
        rem[best] = 0;
    }
    return sizes;
}

/// Seeded stratified split. Each class is shuffled, classes are dealt
/// round-robin into one sequence, and contiguous slices of that sequence form
/// train / validation / test, so every class lands in each split within one
/// example of its proportional share.
[[nodiscard]] inline SplitCorpus split_corpus(std::vector<LabeledExample> examples,
                                              std::uint64_t seed) {
    if (examples.size() < 5) {
        throw InputError("need at least 5 examples to split, got " +
                         std::to_string(examples.size()));
    }
    util::Engine rng(util::derive_seed(seed, "split"));
    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        by_class[examples[i].label].push_back(i);
    }
    for (auto &[label, idx] : by_class) {
        util::shuffle(idx, rng);
    }
    std::vector<std::size_t> order;
    order.reserve(examples.size());
    for (std::size_t round = 0; order.size() < examples.size(); ++round) {
        for (auto &[label, idx] : by_class) {
            if (round < idx.size()) {
                order.push_back(idx[round]);
            }
        }
    }
    const auto sizes = split_sizes(examples.size());
    SplitCorpus out;
    out.seed = seed;
    for (std::size_t k = 0; k < order.size(); ++k) {
        auto &dst = k < sizes[0]              ? out.train
                    : k < sizes[0] + sizes[1] ? out.validation
                                              : out.test;
        dst.push_back(std::move(examples[order[k]]));
    }
    return out;
}

/// Builds the vocabulary from the training split only and tokenizes all
/// three splits with it.
[[nodiscard]] inline Vocabulary tokenize_corpus(SplitCorpus &corpus) {
    std::vector<std::string> texts;
    texts.reserve(corpus.train.size());
    for (const auto &ex : corpus.train) {
        texts.push_back(ex.text);
    }
    auto vocab = Vocabulary::build(texts);
    for (auto *split : {&corpus.train, &corpus.validation, &corpus.test}) {
        for (auto &ex : *split) {
            ex.tokens = vocab.tokenize(ex.text);
        }
    }
    return vocab;
}

} // namespace qkd::data
