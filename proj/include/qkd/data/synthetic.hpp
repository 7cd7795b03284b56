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
 * @file synthetic.hpp
 * Class-balanced synthetic text corpora with a tunable degree of separability.
 *
 * Class c owns the words c<c>w0 .. c<c>w<k-1>; a shared pool sh0 .. sh<s-1>
 * belongs to no class. Every token of an example is drawn from the shared
 * pool with probability `overlap`, otherwise from its class block.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qkd/data/corpus.hpp"
#include "qkd/error.hpp"
#include "qkd/util/random.hpp"

namespace qkd::data {

struct SyntheticCorpusOptions {
    std::size_t n_examples{400};
    std::size_t n_classes{2};
    std::uint64_t seed{0};
    double overlap{0.0};
    std::size_t words_per_class{8};
    std::size_t shared_words{16};
    std::size_t min_length{12};
    std::size_t max_length{20};
};

[[nodiscard]] inline std::vector<LabeledExample>
make_synthetic_corpus(const SyntheticCorpusOptions &opt) {
    if (opt.n_classes < 2) {
        throw ConfigError("synthetic corpus needs at least 2 classes");
    }
    if (opt.n_examples < opt.n_classes) {
        throw ConfigError("synthetic corpus needs at least one example per class");
    }
    if (!(opt.overlap >= 0.0 && opt.overlap <= 1.0)) {
        throw ConfigError("overlap must lie in [0, 1]");
    }
    if (opt.words_per_class == 0 || opt.min_length == 0 || opt.min_length > opt.max_length ||
        (opt.overlap > 0.0 && opt.shared_words == 0)) {
        throw ConfigError("invalid synthetic vocabulary or length settings");
    }
    util::Engine rng(util::derive_seed(opt.seed, "synthetic-corpus"));
    std::vector<LabeledExample> out;
    out.reserve(opt.n_examples);
    for (std::size_t i = 0; i < opt.n_examples; ++i) {
        LabeledExample ex;
        char id[32];
        std::snprintf(id, sizeof id, "syn%06zu", i);
        ex.id = id;
        ex.label = i % opt.n_classes;
        const std::size_t len =
            opt.min_length + util::below(rng, opt.max_length - opt.min_length + 1);
        for (std::size_t t = 0; t < len; ++t) {
            if (!ex.text.empty()) {
                ex.text += ' ';
            }
            const bool shared = opt.overlap > 0.0 && util::unit(rng()) < opt.overlap;
            if (shared) {
                ex.text += "sh" + std::to_string(util::below(rng, opt.shared_words));
            } else {
                ex.text += "c" + std::to_string(ex.label) + "w" +
                           std::to_string(util::below(rng, opt.words_per_class));
            }
        }
        out.push_back(std::move(ex));
    }
    return out;
}

[[nodiscard]] inline std::vector<LabeledExample>
make_synthetic_corpus(std::size_t n_examples, std::size_t n_classes, std::uint64_t seed) {
    SyntheticCorpusOptions opt;
    opt.n_examples = n_examples;
    opt.n_classes = n_classes;
    opt.seed = seed;
    return make_synthetic_corpus(opt);
}

} // namespace qkd::data
