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
 * @file checkpoint.hpp
 * Single-file checkpoint: a text header of "key value" lines, the
 * vocabulary (one token per line), then a binary payload of little-endian
 * IEEE-754 doubles.
 *
 *   qkd-checkpoint 1
 *   <key> <value>            ... (reals as C99 hex floats, bit exact)
 *   vocab <count>
 *   <token>                  ... count lines
 *   payload <bytes>
 *   <params[P]> <adam m[P]> <adam v[P]> { <u32 token> <row[m]> } x embedding_rows
 */
#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qkd/data/tokenizer.hpp"
#include "qkd/error.hpp"
#include "qkd/model/embedding.hpp"
#include "qkd/model/params.hpp"
#include "qkd/optim/adam.hpp"
#include "qkd/train/config.hpp"
#include "qkd/util/random.hpp"

namespace qkd::train {

inline constexpr std::string_view kCheckpointMagic = "qkd-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    TrainConfig config{};
    data::Vocabulary vocab{};
    model::EmbeddingTable embedding{};
    model::StudentParams params{};
    optim::AdamState adam{};
    std::size_t epoch{0};
    std::string rng_state{};
    double distill_seconds{0.0};
};

namespace detail {

inline std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline double parse_real(const std::string &s, const std::string &key) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw FormatError("checkpoint field '" + key + "' is not a number");
    }
    return v;
}

inline std::uint64_t parse_uint(const std::string &s, const std::string &key) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw FormatError("checkpoint field '" + key + "' is not an unsigned integer");
    }
    return std::stoull(s);
}

inline void put_u64(std::string &out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
    }
}

inline void put_f64(std::string &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void put_u32(std::string &out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
    }
}

class Reader {
  public:
    explicit Reader(std::string_view bytes) : bytes_{bytes} {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + b])} << (8 * b);
        }
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            v |= std::uint32_t{static_cast<unsigned char>(bytes_[pos_ + b])} << (8 * b);
        }
        pos_ += 4;
        return v;
    }
    std::vector<double> doubles(std::size_t n) {
        std::vector<double> v(n);
        for (auto &x : v) {
            x = f64();
        }
        return v;
    }
    [[nodiscard]] bool done() const noexcept { return pos_ == bytes_.size(); }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw FormatError("checkpoint payload is truncated");
        }
    }
    std::string_view bytes_;
    std::size_t pos_{0};
};

inline std::string readout_text(const model::ModelConfig &m) {
    std::string s;
    for (auto q : m.readout_qubits()) {
        s += (s.empty() ? "" : ",") + std::to_string(q);
    }
    return s;
}

} // namespace detail

[[nodiscard]] inline std::string serialize_checkpoint(const Checkpoint &ck) {
    const auto &c = ck.config;
    const auto P = ck.params.size();
    if (P != model::param_count(c.model)) {
        throw ArgumentError("checkpoint parameter count does not match its config");
    }
    std::ostringstream h;
    h << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    h << "n_qubits " << c.model.n_qubits << '\n';
    h << "embed_dim " << c.model.embed_dim << '\n';
    h << "depth " << c.model.depth << '\n';
    h << "n_classes " << c.model.n_classes << '\n';
    h << "readout " << detail::readout_text(c.model) << '\n';
    h << "loss_mode " << loss::mode_name(c.loss.mode()) << '\n';
    h << "lambda2 " << detail::hex(c.loss.lambda2()) << '\n';
    h << "epochs " << c.epochs << '\n';
    h << "batch_size " << c.batch_size << '\n';
    h << "lr " << detail::hex(c.adam.lr) << '\n';
    h << "beta1 " << detail::hex(c.adam.beta1) << '\n';
    h << "beta2 " << detail::hex(c.adam.beta2) << '\n';
    h << "adam_epsilon " << detail::hex(c.adam.epsilon) << '\n';
    h << "seed " << c.seed << '\n';
    h << "repeats " << c.repeats << '\n';
    h << "embed_seed " << ck.embedding.seed() << '\n';
    h << "epoch " << ck.epoch << '\n';
    h << "adam_step " << ck.adam.step << '\n';
    h << "distill_seconds " << detail::hex(ck.distill_seconds) << '\n';
    h << "rng " << ck.rng_state << '\n';
    h << "param_count " << P << '\n';
    h << "embedding_rows " << ck.embedding.overrides().size() << '\n';
    h << "vocab " << ck.vocab.size() << '\n';
    for (const auto &t : ck.vocab.tokens()) {
        h << t << '\n';
    }

    std::string payload;
    for (double v : ck.params.flat()) detail::put_f64(payload, v);
    for (double v : ck.adam.first_moment) detail::put_f64(payload, v);
    for (double v : ck.adam.second_moment) detail::put_f64(payload, v);
    for (const auto &[token, row] : ck.embedding.overrides()) {
        detail::put_u32(payload, token);
        for (double v : row) detail::put_f64(payload, v);
    }
    h << "payload " << payload.size() << '\n';
    return h.str() + payload;
}

[[nodiscard]] inline Checkpoint deserialize_checkpoint(std::string_view bytes) {
    std::size_t pos = 0;
    const auto next_line = [&]() -> std::string {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw FormatError("checkpoint header is truncated");
        }
        std::string line(bytes.substr(pos, nl - pos));
        pos = nl + 1;
        return line;
    };
    const auto split = [](const std::string &line) {
        const auto sp = line.find(' ');
        if (sp == std::string::npos) {
            throw FormatError("malformed checkpoint header line '" + line + "'");
        }
        return std::pair{line.substr(0, sp), line.substr(sp + 1)};
    };

    const auto magic = next_line();
    if (magic != std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointVersion)) {
        throw FormatError("not a qkd checkpoint (or unsupported version)");
    }
    std::map<std::string, std::string> kv;
    std::size_t vocab_size = 0;
    for (;;) {
        auto [k, v] = split(next_line());
        if (k == "vocab") {
            vocab_size = detail::parse_uint(v, k);
            break;
        }
        kv[k] = v;
    }
    std::vector<std::string> tokens;
    tokens.reserve(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        tokens.push_back(next_line());
    }
    const auto [pk, pv] = split(next_line());
    if (pk != "payload") {
        throw FormatError("checkpoint payload marker missing");
    }
    const auto payload_bytes = detail::parse_uint(pv, pk);
    if (bytes.size() - pos != payload_bytes) {
        throw FormatError("checkpoint payload has " + std::to_string(bytes.size() - pos) +
                          " bytes, header says " + std::to_string(payload_bytes));
    }

    const auto get = [&](const std::string &k) -> const std::string & {
        auto it = kv.find(k);
        if (it == kv.end()) {
            throw FormatError("checkpoint is missing field '" + k + "'");
        }
        return it->second;
    };
    const auto u = [&](const std::string &k) { return detail::parse_uint(get(k), k); };
    const auto r = [&](const std::string &k) { return detail::parse_real(get(k), k); };

    Checkpoint ck;
    try {
        auto &c = ck.config;
        c.model.n_qubits = u("n_qubits");
        c.model.embed_dim = u("embed_dim");
        c.model.depth = u("depth");
        c.model.n_classes = u("n_classes");
        c.model.readout.clear();
        std::istringstream rs(get("readout"));
        for (std::string q; std::getline(rs, q, ',');) {
            c.model.readout.push_back(detail::parse_uint(q, "readout"));
        }
        c.loss = loss::LossSpec(loss::parse_mode(get("loss_mode")), r("lambda2"));
        c.epochs = u("epochs");
        c.batch_size = u("batch_size");
        c.adam = {r("lr"), r("beta1"), r("beta2"), r("adam_epsilon")};
        c.seed = u("seed");
        c.repeats = u("repeats");
        c.validate();
    } catch (const FormatError &) {
        throw;
    } catch (const Error &e) {
        throw FormatError(std::string("invalid checkpoint config: ") + e.what());
    }
    const auto P = model::param_count(ck.config.model);
    if (u("param_count") != P) {
        throw FormatError("checkpoint param_count does not match its config");
    }
    ck.epoch = u("epoch");
    ck.distill_seconds = r("distill_seconds");
    ck.rng_state = get("rng");
    ck.vocab = data::Vocabulary::from_tokens(std::move(tokens));
    ck.embedding = model::EmbeddingTable(ck.config.model.embed_dim, u("embed_seed"));

    detail::Reader rd(bytes.substr(pos));
    const model::ParamLayout layout(ck.config.model);
    ck.params = model::StudentParams(layout, rd.doubles(P));
    ck.adam = optim::AdamState(P, ck.config.adam);
    ck.adam.step = u("adam_step");
    ck.adam.first_moment = rd.doubles(P);
    ck.adam.second_moment = rd.doubles(P);
    const auto rows = u("embedding_rows");
    for (std::uint64_t i = 0; i < rows; ++i) {
        const auto token = rd.u32();
        if (token >= ck.vocab.size()) {
            throw FormatError("checkpoint embedding row for unknown token id");
        }
        ck.embedding.set_row(token, rd.doubles(ck.config.model.embed_dim));
    }
    if (!rd.done()) {
        throw FormatError("checkpoint payload has trailing bytes");
    }
    return ck;
}

inline void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ck) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write checkpoint " + path.string());
    }
    const auto bytes = serialize_checkpoint(ck);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

[[nodiscard]] inline Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open checkpoint " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_checkpoint(ss.str());
}

} // namespace qkd::train
