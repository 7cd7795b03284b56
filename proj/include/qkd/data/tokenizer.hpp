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
 * @file tokenizer.hpp
 * Lowercasing word tokenizer and a vocabulary built from training text.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/model/embedding.hpp"

namespace qkd::data {

using model::TokenId;

/// Lowercases ASCII and splits on runs of non-alphanumeric bytes. Bytes of
/// multi-byte UTF-8 sequences count as word characters.
[[nodiscard]] inline std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool word = c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                          (c >= 'A' && c <= 'Z');
        if (word) {
            cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        words.push_back(std::move(cur));
    }
    return words;
}

class Vocabulary {
  public:
    static constexpr TokenId kUnk = 0;
    static constexpr std::string_view kUnkToken = "<unk>";

    Vocabulary() : tokens_{std::string(kUnkToken)} {}

    /// Id 0 is UNK; the remaining words are sorted so ids do not depend on
    /// document order.
    template <class Texts> [[nodiscard]] static Vocabulary build(const Texts &texts) {
        std::vector<std::string> words;
        for (const auto &t : texts) {
            auto w = split_words(t);
            words.insert(words.end(), std::make_move_iterator(w.begin()),
                         std::make_move_iterator(w.end()));
        }
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        return from_words(words);
    }

    /// Restores a vocabulary whose first entry must be the UNK token.
    [[nodiscard]] static Vocabulary from_tokens(std::vector<std::string> tokens) {
        if (tokens.empty() || tokens.front() != kUnkToken) {
            throw FormatError("vocabulary must start with " + std::string(kUnkToken));
        }
        Vocabulary v;
        v.tokens_ = std::move(tokens);
        v.reindex();
        return v;
    }

    [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
    [[nodiscard]] const std::vector<std::string> &tokens() const noexcept { return tokens_; }

    [[nodiscard]] TokenId id(std::string_view word) const {
        auto it = index_.find(word);
        return it == index_.end() ? kUnk : it->second;
    }

    /// Never empty: a text without known words yields a single UNK.
    [[nodiscard]] std::vector<TokenId> tokenize(std::string_view text) const {
        std::vector<TokenId> ids;
        for (const auto &w : split_words(text)) {
            ids.push_back(id(w));
        }
        if (ids.empty()) {
            ids.push_back(kUnk);
        }
        return ids;
    }

    friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
        return a.tokens_ == b.tokens_;
    }

  private:
    [[nodiscard]] static Vocabulary from_words(const std::vector<std::string> &words) {
        Vocabulary v;
        for (const auto &w : words) {
            if (w != kUnkToken) {
                v.tokens_.push_back(w);
            }
        }
        v.reindex();
        return v;
    }

    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            index_.emplace(tokens_[i], static_cast<TokenId>(i));
        }
    }

    std::vector<std::string> tokens_;
    std::map<std::string, TokenId, std::less<>> index_;
};

} // namespace qkd::data
