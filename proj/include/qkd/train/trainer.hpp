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
 * @file trainer.hpp
 * Distillation loop, model selection, evaluation, ablation and inference.
 */
#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qkd/data/corpus.hpp"
#include "qkd/data/embedding_file.hpp"
#include "qkd/data/tokenizer.hpp"
#include "qkd/error.hpp"
#include "qkd/grad/gradient.hpp"
#include "qkd/model/circuit.hpp"
#include "qkd/model/embedding.hpp"
#include "qkd/model/params.hpp"
#include "qkd/optim/adam.hpp"
#include "qkd/train/checkpoint.hpp"
#include "qkd/train/config.hpp"
#include "qkd/train/metrics.hpp"
#include "qkd/util/random.hpp"

namespace qkd::train {

struct EpochRecord {
    std::size_t epoch{0};
    /// Mean of the batch losses seen during the epoch.
    double mean_batch_loss{0.0};
    /// Full pass over the training split after the epoch.
    double train_loss{0.0};
    MetricsReport validation{};
    double epoch_seconds{0.0};
    double cumulative_seconds{0.0};
};

struct RunReport {
    std::uint64_t seed{0};
    std::size_t param_count{0};
    std::uint64_t initial_params_hash{0};
    double initial_train_loss{0.0};
    std::vector<EpochRecord> epochs{};
    std::size_t best_epoch{0};
    MetricsReport test{};
    double distillation_seconds{0.0};
    double inference_seconds{0.0};
};

struct TrainResult {
    Checkpoint checkpoint;
    RunReport report;
};

/// Fingerprint of a parameter vector's exact bit patterns.
[[nodiscard]] inline std::uint64_t params_hash(const model::StudentParams &p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : p.flat()) {
        h = util::mix(h, std::bit_cast<std::uint64_t>(v));
    }
    return h;
}

/// Angles ~ U(-0.1, 0.1), weight ~ U(-sqrt(1/m), sqrt(1/m)), bias = 0.
[[nodiscard]] inline model::StudentParams init_params(const model::ModelConfig &cfg,
                                                      std::uint64_t seed) {
    const model::ParamLayout layout(cfg);
    model::StudentParams p(layout);
    util::Engine rng(util::derive_seed(seed, "init"));
    const double w = std::sqrt(1.0 / static_cast<double>(cfg.embed_dim));
    for (std::size_t q = 0; q < cfg.n_qubits; ++q) {
        for (std::size_t j = 0; j < cfg.embed_dim; ++j) {
            p.weight(q, j) = util::uniform(rng, -w, w);
        }
    }
    for (std::size_t i = layout.layer_offset(0); i < p.size(); ++i) {
        p[i] = util::uniform(rng, -0.1, 0.1);
    }
    return p;
}

[[nodiscard]] inline model::EmbeddingTable make_embedding(const TrainConfig &cfg,
                                                          const data::Vocabulary &vocab) {
    model::EmbeddingTable table(cfg.model.embed_dim, util::derive_seed(cfg.seed, "embedding"));
    if (!cfg.embedding_path.empty()) {
        data::load_embedding_rows(cfg.embedding_path, vocab, table);
    }
    return table;
}

[[nodiscard]] inline std::vector<grad::Example>
featurize(const std::vector<data::LabeledExample> &examples, const data::Vocabulary &vocab,
          const model::EmbeddingTable &embedding, bool with_teacher) {
    std::vector<grad::Example> out;
    out.reserve(examples.size());
    for (const auto &ex : examples) {
        const auto tokens = ex.tokens.empty() ? vocab.tokenize(ex.text) : ex.tokens;
        out.push_back({ex.id, embedding.pooled(tokens), ex.label,
                       with_teacher ? ex.teacher : std::nullopt});
    }
    return out;
}

[[nodiscard]] inline std::vector<ProbDist> predict(std::span<const grad::Example> examples,
                                                   const model::StudentParams &params,
                                                   const model::ModelConfig &config,
                                                   std::size_t threads) {
    std::vector<std::optional<ProbDist>> slots(examples.size());
    util::parallel_for(examples.size(), threads, [&](std::size_t i) {
        slots[i] = model::forward_pooled(examples[i].pooled, params, config).probs;
    });
    std::vector<ProbDist> out;
    out.reserve(slots.size());
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

[[nodiscard]] inline MetricsReport score(std::span<const grad::Example> examples,
                                         const model::StudentParams &params,
                                         const model::ModelConfig &config, std::size_t threads) {
    if (examples.empty()) {
        throw ArgumentError("cannot evaluate an empty example list");
    }
    const auto probs = predict(examples, params, config, threads);
    ConfusionMatrix cm(config.n_classes);
    for (std::size_t i = 0; i < examples.size(); ++i) {
        cm.add(examples[i].label, probs[i].argmax());
    }
    auto m = metrics_from_confusion(cm);
    m.acc_per_param = acc_per_param(m.accuracy, params.size());
    return m;
}

namespace detail {
inline std::string engine_state(const util::Engine &rng) {
    std::ostringstream ss;
    ss << rng;
    return ss.str();
}
} // namespace detail

/// Called after every epoch with the record just appended.
using EpochObserver = std::function<void(const EpochRecord &)>;

/// Trains a student on `corpus` (teacher distributions attached). The
/// vocabulary is built from the training split. Returns the checkpoint of
/// the epoch with the best validation accuracy (ties go to the later epoch).
[[nodiscard]] inline TrainResult train_run(data::SplitCorpus corpus, const TrainConfig &config,
                                           const EpochObserver &observer = {}) {
    using Clock = std::chrono::steady_clock;
    config.validate();
    if (corpus.train.empty() || corpus.validation.empty() || corpus.test.empty()) {
        throw InputError("train, validation and test splits must all be non-empty");
    }
    const bool teacher = loss::needs_teacher(config.loss.mode());
    if (teacher) {
        for (const auto &ex : corpus.train) {
            if (!ex.teacher) {
                throw DataError("training example '" + ex.id + "' has no teacher distribution");
            }
        }
    }
    for (const auto *split : {&corpus.train, &corpus.validation, &corpus.test}) {
        for (const auto &ex : *split) {
            if (ex.label >= config.model.n_classes) {
                throw DataError("example '" + ex.id + "' has label outside the class range");
            }
        }
    }

    const auto vocab = data::tokenize_corpus(corpus);
    const auto embedding = make_embedding(config, vocab);
    const auto train_set = featurize(corpus.train, vocab, embedding, teacher);
    const auto val_set = featurize(corpus.validation, vocab, embedding, false);
    const auto test_set = featurize(corpus.test, vocab, embedding, false);
    const auto &mc = config.model;

    auto params = init_params(mc, config.seed);
    optim::AdamState adam(params.size(), config.adam);
    util::Engine rng(util::derive_seed(config.seed, "shuffle"));

    RunReport report;
    report.seed = config.seed;
    report.param_count = params.size();
    report.initial_params_hash = params_hash(params);
    report.initial_train_loss = grad::batch_loss(train_set, params, mc, config.loss, config.threads);

    Checkpoint best{config, vocab, embedding, params, adam, 0, detail::engine_state(rng), 0.0};
    double best_acc = -1.0;
    double elapsed = 0.0;

    std::vector<std::size_t> order(train_set.size());
    std::vector<grad::Example> batch;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        util::shuffle(order, rng);

        const auto t0 = Clock::now();
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.clear();
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(train_set[order[k]]);
            }
            try {
                const auto lg = grad::loss_gradient(batch, params, mc, config.loss, config.threads);
                optim::adam_update(params.flat(), lg.gradient.flat(), adam);
                loss_sum += lg.loss * static_cast<double>(batch.size());
            } catch (const NumericalError &e) {
                throw NumericalError("epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batch_index) + ": " + e.what());
            }
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        elapsed += secs;

        EpochRecord rec;
        rec.epoch = epoch;
        rec.mean_batch_loss = loss_sum / static_cast<double>(train_set.size());
        rec.train_loss = grad::batch_loss(train_set, params, mc, config.loss, config.threads);
        rec.validation = score(val_set, params, mc, config.threads);
        rec.epoch_seconds = secs;
        rec.cumulative_seconds = elapsed;
        report.epochs.push_back(rec);
        if (observer) {
            observer(rec);
        }

        if (rec.validation.accuracy >= best_acc) {
            best_acc = rec.validation.accuracy;
            best.params = params;
            best.adam = adam;
            best.epoch = epoch;
            best.rng_state = detail::engine_state(rng);
        }
    }
    best.distill_seconds = elapsed;
    report.best_epoch = best.epoch;
    report.distillation_seconds = elapsed;

    const auto t0 = Clock::now();
    report.test = score(test_set, best.params, mc, config.threads);
    report.inference_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.test.acc_per_tkd = acc_per_tkd(report.test.accuracy, elapsed);
    return {std::move(best), std::move(report)};
}

/// Scores a checkpoint on labeled examples (tokenized with the checkpoint's
/// vocabulary). Acc/Tkd is filled in when the checkpoint carries timing.
[[nodiscard]] inline MetricsReport evaluate(const Checkpoint &ck,
                                            const std::vector<data::LabeledExample> &examples) {
    if (examples.empty()) {
        throw ArgumentError("cannot evaluate an empty example list");
    }
    std::vector<data::LabeledExample> retokenized = examples;
    for (auto &ex : retokenized) {
        if (ex.label >= ck.config.model.n_classes) {
            throw DataError("example '" + ex.id + "' has label outside the class range");
        }
        ex.tokens = ck.vocab.tokenize(ex.text);
    }
    const auto set = featurize(retokenized, ck.vocab, ck.embedding, false);
    auto m = score(set, ck.params, ck.config.model, ck.config.threads);
    if (ck.distill_seconds > 0.0) {
        m.acc_per_tkd = acc_per_tkd(m.accuracy, ck.distill_seconds);
    }
    return m;
}

struct Prediction {
    std::size_t label{0};
    ProbDist probs;
};

/// Student-only prediction for raw text.
[[nodiscard]] inline Prediction infer(const Checkpoint &ck, std::string_view text) {
    const auto tokens = ck.vocab.tokenize(text);
    auto probs = model::forward(tokens, ck.embedding, ck.params, ck.config.model);
    const auto label = probs.argmax();
    return {label, std::move(probs)};
}

inline constexpr std::array<loss::LossMode, 4> kAblationModes{
    loss::LossMode::CE, loss::LossMode::KL, loss::LossMode::JS, loss::LossMode::Combined};

struct AblationRow {
    loss::LossMode mode{loss::LossMode::Combined};
    /// Means over repeats.
    MetricsReport mean{};
    std::vector<RunReport> runs{};
};

struct AblationReport {
    std::vector<std::uint64_t> seeds{};
    std::vector<AblationRow> rows{};
};

/// Trains every loss mode once per repeat. Repeat r uses seed base + r for
/// all modes, so the modes of one repeat start from identical parameters.
[[nodiscard]] inline AblationReport ablation_run(const data::SplitCorpus &corpus,
                                                 const TrainConfig &base,
                                                 const std::function<void(loss::LossMode, const RunReport &)> &on_run = {}) {
    base.validate();
    AblationReport out;
    for (std::size_t r = 0; r < base.repeats; ++r) {
        out.seeds.push_back(base.seed + r);
    }
    for (auto mode : kAblationModes) {
        AblationRow row;
        row.mode = mode;
        for (auto seed : out.seeds) {
            TrainConfig cfg = base;
            cfg.seed = seed;
            cfg.loss = loss::LossSpec(mode, base.loss.lambda2());
            auto result = train_run(corpus, cfg);
            if (on_run) {
                on_run(mode, result.report);
            }
            row.runs.push_back(std::move(result.report));
        }
        const auto k = static_cast<double>(row.runs.size());
        for (const auto &run : row.runs) {
            row.mean.accuracy += run.test.accuracy / k;
            row.mean.precision += run.test.precision / k;
            row.mean.recall += run.test.recall / k;
            row.mean.f1 += run.test.f1 / k;
            row.mean.n_examples = run.test.n_examples;
        }
        row.mean.acc_per_param = acc_per_param(row.mean.accuracy, row.runs.front().param_count);
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace qkd::train
