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
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "qkd/error.hpp"
#include "qkd/loss/distillation_loss.hpp"
#include "qkd/model/params.hpp"
#include "qkd/optim/adam.hpp"

namespace qkd::train {

struct TrainConfig {
    model::ModelConfig model{};
    loss::LossSpec loss{};
    std::size_t epochs{10};
    std::size_t batch_size{8};
    optim::AdamHyper adam{};
    std::uint64_t seed{0};
    std::size_t repeats{5};
    /// Workers for per-example forward/gradient work. Results do not depend
    /// on it.
    std::size_t threads{1};
    /// Optional "word v_1 ... v_m" file overriding hashed embedding rows.
    std::string embedding_path{};

    void validate() const {
        model.validate();
        if (epochs < 1) {
            throw ConfigError("epochs must be at least 1");
        }
        if (batch_size < 1) {
            throw ConfigError("batch-size must be at least 1");
        }
        if (repeats < 1) {
            throw ConfigError("repeats must be at least 1");
        }
        if (!(adam.lr > 0.0)) {
            throw ConfigError("lr must be positive");
        }
    }
};

} // namespace qkd::train
