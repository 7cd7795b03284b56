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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qkd/data/synthetic.hpp"
#include "qkd/data/teacher.hpp"
#include "qkd/train/report.hpp"
#include "qkd/train/trainer.hpp"

using namespace qkd;
using namespace qkd::train;
using Catch::Approx;

namespace {

data::SplitCorpus corpus(std::size_t n, std::size_t c, std::uint64_t seed) {
    auto s = data::split_corpus(data::make_synthetic_corpus(n, c, seed), seed);
    data::attach_teacher(s, data::SyntheticTeacher(c, 0.95, 0.1, seed));
    return s;
}

TrainConfig small_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.model = {4, 16, 2, 2, {}};
    cfg.seed = seed;
    cfg.epochs = 4;
    return cfg;
}

std::string metrics_text(const TrainConfig &c, const RunReport &r) { return run_metrics_json(c, r).dump(); }

} // namespace

TEST_CASE("metrics from counts", "[train]") {
    const auto m = metrics_from_counts({50, 30, 10, 10});
    CHECK(m.accuracy == Approx(0.8).margin(1e-15));
    CHECK(m.precision == Approx(5.0 / 6.0).margin(1e-15));
    CHECK(m.recall == Approx(5.0 / 6.0).margin(1e-15));
    CHECK(m.f1 == Approx(5.0 / 6.0).margin(1e-15));
    CHECK(m.n_examples == 100);

    const auto perfect = metrics_from_counts({7, 9, 0, 0});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    const auto none = metrics_from_counts({0, 5, 0, 5});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
}

TEST_CASE("metrics from a confusion matrix", "[train]") {
    SECTION("binary uses class 1 as positive") {
        ConfusionMatrix cm(2);
        for (int i = 0; i < 50; ++i) cm.add(1, 1);
        for (int i = 0; i < 30; ++i) cm.add(0, 0);
        for (int i = 0; i < 10; ++i) cm.add(0, 1);
        for (int i = 0; i < 10; ++i) cm.add(1, 0);
        const auto m = metrics_from_confusion(cm);
        CHECK(m.accuracy == Approx(0.8));
        CHECK(m.precision == Approx(5.0 / 6.0));
        CHECK(m.f1 == Approx(5.0 / 6.0));
    }
    SECTION("multi-class macro averages") {
        ConfusionMatrix cm(3);
        cm.add(0, 0); cm.add(0, 0); cm.add(0, 1);
        cm.add(1, 1); cm.add(1, 2);
        cm.add(2, 2); cm.add(2, 2); cm.add(2, 2);
        const auto m = metrics_from_confusion(cm);
        CHECK(m.accuracy == Approx(6.0 / 8.0));
        // per class precision 1, 1/2, 3/4; recall 2/3, 1/2, 1
        CHECK(m.precision == Approx((1.0 + 0.5 + 0.75) / 3));
        CHECK(m.recall == Approx((2.0 / 3 + 0.5 + 1.0) / 3));
        const double f0 = 2 * 1.0 * (2.0 / 3) / (1.0 + 2.0 / 3), f1 = 0.5, f2 = 2 * 0.75 / 1.75;
        CHECK(m.f1 == Approx((f0 + f1 + f2) / 3));
    }
    CHECK_THROWS_AS(ConfusionMatrix(2).add(2, 0), ArgumentError);
}

TEST_CASE("accuracy ratios", "[train]") {
    CHECK(acc_per_param(0.8012, 9275) == Approx(8.64e-5).epsilon(0.005));
    CHECK(acc_per_tkd(0.9, 3.0) == Approx(0.3));
}

TEST_CASE("config validation", "[train]") {
    auto cfg = small_config(1);
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config(1);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config(1);
    cfg.model.n_classes = 5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(train_run(corpus(40, 2, 1), [] { auto c = small_config(1); c.epochs = 0; return c; }()),
                    ConfigError);
}

TEST_CASE("training lowers the loss and is deterministic", "[train]") {
    const auto c = corpus(200, 2, 3);
    auto cfg = small_config(3);
    cfg.epochs = 6;
    std::vector<EpochRecord> seen;
    const auto a = train_run(c, cfg, [&](const EpochRecord &r) { seen.push_back(r); });
    REQUIRE(a.report.epochs.size() == 6);
    CHECK(seen.size() == 6);
    CHECK(a.report.epochs.back().train_loss < a.report.initial_train_loss);
    CHECK(a.report.param_count == model::param_count(4, 16, 2));

    double prev = 0.0;
    for (const auto &e : a.report.epochs) {
        CHECK(std::isfinite(e.train_loss));
        CHECK(std::isfinite(e.mean_batch_loss));
        CHECK(e.epoch_seconds >= 0.0);
        CHECK(e.cumulative_seconds >= prev);
        prev = e.cumulative_seconds;
    }
    CHECK(a.report.distillation_seconds == Approx(prev));

    // Best epoch: highest validation accuracy, ties to the later epoch.
    std::size_t best = 0;
    double acc = -1.0;
    for (const auto &e : a.report.epochs)
        if (e.validation.accuracy >= acc) {
            acc = e.validation.accuracy;
            best = e.epoch;
        }
    CHECK(a.report.best_epoch == best);
    CHECK(a.checkpoint.epoch == best);

    const auto b = train_run(c, cfg);
    CHECK(metrics_text(cfg, a.report) == metrics_text(cfg, b.report));
    CHECK(a.checkpoint.params == b.checkpoint.params);

    auto threaded = cfg;
    threaded.threads = 4;
    const auto t = train_run(c, threaded);
    CHECK(metrics_text(cfg, a.report) == metrics_text(cfg, t.report));

    // The stored checkpoint reproduces the reported test metrics.
    const auto m = evaluate(a.checkpoint, c.test);
    CHECK(m.accuracy == a.report.test.accuracy);
    CHECK(m.f1 == a.report.test.f1);
}

TEST_CASE("training requires teachers only for distillation modes", "[train]") {
    auto c = data::split_corpus(data::make_synthetic_corpus(40, 2, 4), 4);
    auto cfg = small_config(4);
    cfg.epochs = 1;
    CHECK_THROWS_AS(train_run(c, cfg), DataError);
    cfg.loss = loss::LossSpec(loss::LossMode::CE, 0.1);
    CHECK_NOTHROW(train_run(c, cfg));
}

TEST_CASE("teacher distributions are only read", "[train]") {
    auto c = data::split_corpus(data::make_synthetic_corpus(40, 2, 4), 4);
    data::SyntheticTeacher teacher(2, 0.9, 0.1, 1);
    data::attach_teacher(c, teacher);
    const auto before = c.train;
    const auto reads = teacher.reads();
    auto cfg = small_config(4);
    cfg.epochs = 2;
    const auto r = train_run(c, cfg);
    (void)infer(r.checkpoint, "c0w1 c0w2");
    CHECK(teacher.writes() == 0);
    CHECK(teacher.reads() == reads);
    CHECK(c.train == before);
}

TEST_CASE("checkpoint round trip", "[train]") {
    const auto c = corpus(40, 2, 5);
    auto cfg = small_config(5);
    cfg.epochs = 2;
    auto r = train_run(c, cfg);
    r.checkpoint.embedding.set_row(1, std::vector<double>(16, 0.25));
    const auto bytes = serialize_checkpoint(r.checkpoint);
    const auto back = deserialize_checkpoint(bytes);
    CHECK(serialize_checkpoint(back) == bytes);
    CHECK(back.params == r.checkpoint.params);
    CHECK(back.adam == r.checkpoint.adam);
    CHECK(back.vocab == r.checkpoint.vocab);
    CHECK(back.epoch == r.checkpoint.epoch);
    CHECK(back.rng_state == r.checkpoint.rng_state);
    CHECK(back.distill_seconds == r.checkpoint.distill_seconds);
    CHECK(back.embedding.overrides() == r.checkpoint.embedding.overrides());
    CHECK(back.config.loss.lambda2() == cfg.loss.lambda2());
    CHECK(back.params.size() == r.report.param_count);
    CHECK(evaluate(back, c.test).accuracy == evaluate(r.checkpoint, c.test).accuracy);

    const auto tmp = std::filesystem::temp_directory_path() / "qkd_train_ck.qkd";
    save_checkpoint(tmp, r.checkpoint);
    CHECK(serialize_checkpoint(load_checkpoint(tmp)) == bytes);
    std::filesystem::remove(tmp);
}

TEST_CASE("corrupt checkpoints are rejected", "[train]") {
    const auto c = corpus(40, 2, 6);
    auto cfg = small_config(6);
    cfg.epochs = 1;
    const auto bytes = serialize_checkpoint(train_run(c, cfg).checkpoint);
    CHECK_THROWS_AS(deserialize_checkpoint(""), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint("hello\n"), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() / 3)), FormatError);
    auto wrong = bytes;
    wrong.replace(wrong.find("n_qubits 4"), 10, "n_qubits 3");
    CHECK_THROWS_AS(deserialize_checkpoint(wrong), FormatError);
    auto bad_mode = bytes;
    bad_mode.replace(bad_mode.find("loss_mode "), 10, "loss_mode?");
    CHECK_THROWS_AS(deserialize_checkpoint(bad_mode), FormatError);
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/ck.qkd"), DataError);
}

TEST_CASE("inference", "[train]") {
    Checkpoint ck;
    ck.config = small_config(1);
    ck.config.model.n_classes = 3;
    ck.vocab = data::Vocabulary::build(std::vector<std::string>{"alpha beta"});
    ck.embedding = model::EmbeddingTable(16, 9);
    ck.params = model::StudentParams(model::ParamLayout(ck.config.model));
    const auto p = infer(ck, "alpha beta gamma");
    CHECK(p.label == 0);
    for (double v : p.probs) CHECK(v == Approx(1.0 / 3).margin(1e-15));

    const auto c = corpus(40, 2, 7);
    auto cfg = small_config(7);
    cfg.epochs = 2;
    const auto r = train_run(c, cfg);
    const auto &ex = c.train.front();
    const auto via_infer = infer(r.checkpoint, ex.text);
    auto copy = ex;
    copy.tokens = r.checkpoint.vocab.tokenize(ex.text);
    const auto fx = featurize({copy}, r.checkpoint.vocab, r.checkpoint.embedding, false);
    const auto direct = predict(fx, r.checkpoint.params, cfg.model, 1).front();
    CHECK(via_infer.probs == direct);
    CHECK(via_infer.label == direct.argmax());
    double s = 0.0;
    for (double v : via_infer.probs) s += v;
    CHECK(s == Approx(1.0).margin(1e-12));
}

TEST_CASE("ablation", "[train]") {
    const auto c = corpus(40, 2, 8);
    auto cfg = small_config(8);
    cfg.model = {3, 4, 1, 2, {}};
    cfg.epochs = 2;
    cfg.repeats = 2;
    std::size_t runs = 0;
    const auto a = ablation_run(c, cfg, [&](loss::LossMode, const RunReport &) { ++runs; });
    CHECK(runs == 8);
    REQUIRE(a.rows.size() == 4);
    CHECK(a.seeds == std::vector<std::uint64_t>{8, 9});
    CHECK(a.rows[0].mode == loss::LossMode::CE);
    CHECK(a.rows[3].mode == loss::LossMode::Combined);
    for (std::size_t r = 0; r < 2; ++r) {
        const auto h = a.rows[0].runs[r].initial_params_hash;
        for (const auto &row : a.rows) CHECK(row.runs[r].initial_params_hash == h);
    }
    CHECK(a.rows[0].runs[0].initial_params_hash != a.rows[0].runs[1].initial_params_hash);
    for (const auto &row : a.rows) {
        double mean = 0.0;
        for (const auto &run : row.runs) mean += run.test.accuracy / 2;
        CHECK(row.mean.accuracy == Approx(mean));
    }
    auto plain = cfg;
    plain.loss = loss::LossSpec(loss::LossMode::Combined, cfg.loss.lambda2());
    const auto direct = train_run(c, plain);
    CHECK(metrics_text(plain, direct.report) == metrics_text(plain, a.rows[3].runs[0]));
}
