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
 * @file qkd.hpp
 * Umbrella header.
 */
#pragma once

#include "qkd/data/corpus.hpp"
#include "qkd/data/embedding_file.hpp"
#include "qkd/data/synthetic.hpp"
#include "qkd/data/teacher.hpp"
#include "qkd/data/tokenizer.hpp"
#include "qkd/error.hpp"
#include "qkd/grad/gradient.hpp"
#include "qkd/loss/distillation_loss.hpp"
#include "qkd/model/circuit.hpp"
#include "qkd/model/embedding.hpp"
#include "qkd/model/params.hpp"
#include "qkd/optim/adam.hpp"
#include "qkd/prob_dist.hpp"
#include "qkd/sim/gate.hpp"
#include "qkd/sim/state_vector.hpp"
#include "qkd/train/checkpoint.hpp"
#include "qkd/train/config.hpp"
#include "qkd/train/metrics.hpp"
#include "qkd/train/report.hpp"
#include "qkd/train/trainer.hpp"
