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
 * @file report.hpp
 * Machine-readable run outputs. Metrics files hold only seed-determined
 * values; wall-clock timings go to a separate timing file so metrics stay
 * byte-identical across reruns.
 */
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "qkd/error.hpp"
#include "qkd/train/checkpoint.hpp"
#include "qkd/train/trainer.hpp"

namespace qkd::train {

using Json = nlohmann::ordered_json;

[[nodiscard]] inline Json config_json(const TrainConfig &c) {
    Json j;
    j["seed"] = c.seed;
    j["qubits"] = c.model.n_qubits;
    j["embed_dim"] = c.model.embed_dim;
    j["depth"] = c.model.depth;
    j["classes"] = c.model.n_classes;
    j["readout"] = c.model.readout_qubits();
    j["loss_mode"] = std::string(loss::mode_name(c.loss.mode()));
    j["lambda1"] = c.loss.lambda1();
    j["lambda2"] = c.loss.lambda2();
    j["lr"] = c.adam.lr;
    j["beta1"] = c.adam.beta1;
    j["beta2"] = c.adam.beta2;
    j["adam_epsilon"] = c.adam.epsilon;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["repeats"] = c.repeats;
    j["embedding"] = c.embedding_path.empty() ? "hashed" : c.embedding_path;
    return j;
}

[[nodiscard]] inline Json metrics_json(const MetricsReport &m, bool with_timing = false) {
    Json j;
    j["n_examples"] = m.n_examples;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    if (m.acc_per_param) {
        j["acc_per_param"] = *m.acc_per_param;
    }
    if (with_timing && m.acc_per_tkd) {
        j["acc_per_tkd"] = *m.acc_per_tkd;
    }
    return j;
}

[[nodiscard]] inline Json run_metrics_json(const TrainConfig &c, const RunReport &r) {
    Json j;
    j["config"] = config_json(c);
    j["param_count"] = r.param_count;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.initial_params_hash));
    j["initial_params_hash"] = hash;
    j["initial_train_loss"] = r.initial_train_loss;
    Json epochs = Json::array();
    for (const auto &e : r.epochs) {
        Json ej;
        ej["epoch"] = e.epoch;
        ej["mean_batch_loss"] = e.mean_batch_loss;
        ej["train_loss"] = e.train_loss;
        ej["validation"] = metrics_json(e.validation);
        epochs.push_back(ej);
    }
    j["epochs"] = epochs;
    j["best_epoch"] = r.best_epoch;
    j["test"] = metrics_json(r.test);
    return j;
}

[[nodiscard]] inline Json run_timing_json(const RunReport &r) {
    Json j;
    j["distillation_seconds"] = r.distillation_seconds;
    j["inference_seconds"] = r.inference_seconds;
    Json per = Json::array();
    for (const auto &e : r.epochs) {
        per.push_back({{"epoch", e.epoch},
                       {"seconds", e.epoch_seconds},
                       {"cumulative_seconds", e.cumulative_seconds}});
    }
    j["epochs"] = per;
    if (r.test.acc_per_tkd) {
        j["acc_per_tkd"] = *r.test.acc_per_tkd;
    }
    return j;
}

[[nodiscard]] inline Json ablation_json(const TrainConfig &base, const AblationReport &a) {
    Json j;
    j["config"] = config_json(base);
    j["seeds"] = a.seeds;
    Json rows = Json::array();
    for (const auto &row : a.rows) {
        Json rj;
        rj["mode"] = std::string(loss::mode_name(row.mode));
        rj["mean"] = metrics_json(row.mean);
        Json runs = Json::array();
        for (const auto &run : row.runs) {
            char hash[32];
            std::snprintf(hash, sizeof hash, "%016llx",
                          static_cast<unsigned long long>(run.initial_params_hash));
            runs.push_back({{"seed", run.seed},
                            {"initial_params_hash", hash},
                            {"best_epoch", run.best_epoch},
                            {"test", metrics_json(run.test)}});
        }
        rj["runs"] = runs;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j;
}

inline void write_json(const std::filesystem::path &path, const Json &j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

} // namespace qkd::train
