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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qkd/data/tokenizer.hpp"
#include "qkd/error.hpp"
#include "qkd/model/embedding.hpp"

namespace qkd::data {

/// Loads whitespace-separated "word v_1 ... v_m" rows into `table` for words
/// present in `vocab`. Other words are skipped.
inline std::size_t load_embedding_rows(const std::filesystem::path &path,
                                       const Vocabulary &vocab, model::EmbeddingTable &table) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open embedding file " + path.string());
    }
    std::size_t loaded = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) {
            continue;
        }
        std::vector<double> row;
        double v = 0.0;
        while (ss >> v) {
            row.push_back(v);
        }
        if (!ss.eof()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": non-numeric embedding value");
        }
        if (row.size() != table.dim()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(table.dim()) + " values, got " +
                            std::to_string(row.size()));
        }
        const auto id = word == Vocabulary::kUnkToken ? Vocabulary::kUnk : vocab.id(word);
        if (id == Vocabulary::kUnk && word != Vocabulary::kUnkToken) {
            continue;
        }
        table.set_row(id, std::move(row));
        ++loaded;
    }
    return loaded;
}

} // namespace qkd::data
