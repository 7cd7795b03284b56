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
 * @file app.hpp
 * Command-line front end. Settings resolve as defaults < config file < flags.
 * The config file is flat "key = value" text; '#' starts a comment.
 *
 * Exit codes: 0 success, 1 usage/configuration error, 2 data error,
 * 3 numerical error.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkd/data/corpus.hpp"
#include "qkd/data/synthetic.hpp"
#include "qkd/data/teacher.hpp"
#include "qkd/error.hpp"
#include "qkd/model/circuit.hpp"
#include "qkd/model/params.hpp"
#include "qkd/train/checkpoint.hpp"
#include "qkd/train/report.hpp"
#include "qkd/train/trainer.hpp"

namespace qkd::cli {

enum class Kind { UInt, Real, Text };

struct KeySpec {
    std::string name;
    std::string fallback;
    Kind kind;
    std::string help;
};

[[nodiscard]] inline const std::vector<KeySpec> &key_specs() {
    static const std::vector<KeySpec> specs{
        {"seed", "0", Kind::UInt, "top-level seed for every random choice"},
        {"qubits", "11", Kind::UInt, "qubit count n"},
        {"depth", "2", Kind::UInt, "ansatz layers p"},
        {"embed-dim", "32", Kind::UInt, "embedding dimension m"},
        {"classes", "2", Kind::UInt, "class count C"},
        {"readout", "", Kind::Text, "comma-separated readout qubits (default 0..C-1)"},
        {"loss-mode", "COMBINED", Kind::Text, "CE, KL, JS or COMBINED"},
        {"lambda2", "0.1", Kind::Real, "cross-entropy weight; teacher terms get 1 - lambda2"},
        {"lr", "0.06", Kind::Real, "Adam learning rate"},
        {"epochs", "10", Kind::UInt, "training epochs"},
        {"batch-size", "8", Kind::UInt, "examples per Adam step"},
        {"repeats", "5", Kind::UInt, "seeds per ablation mode (seed, seed+1, ...)"},
        {"threads", "1", Kind::UInt, "worker threads (results do not depend on it)"},
        {"examples", "400", Kind::UInt, "synthetic corpus size"},
        {"overlap", "0", Kind::Real, "probability a synthetic token comes from the shared pool"},
        {"words-per-class", "8", Kind::UInt, "synthetic words owned by each class"},
        {"shared-words", "16", Kind::UInt, "synthetic shared words"},
        {"min-length", "12", Kind::UInt, "minimum synthetic text length"},
        {"max-length", "20", Kind::UInt, "maximum synthetic text length"},
        {"teacher-accuracy", "0.95", Kind::Real, "probability the synthetic teacher favors the label"},
        {"smoothing", "0.1", Kind::Real, "synthetic teacher mass spread over all classes"},
        {"corpus", "", Kind::Text, "corpus file (JSON lines: id, text, label)"},
        {"teacher", "", Kind::Text, "teacher file (JSON lines: id, probs)"},
        {"embedding", "", Kind::Text, "optional embedding file (word v_1 ... v_m)"},
        {"checkpoint", "", Kind::Text, "checkpoint file"},
        {"split", "test", Kind::Text, "train, validation, test or all"},
        {"text", "", Kind::Text, "text to classify"},
        {"out", "", Kind::Text, "output file or directory"},
    };
    return specs;
}

[[nodiscard]] inline const KeySpec &key_spec(const std::string &name) {
    for (const auto &k : key_specs()) {
        if (k.name == name) {
            return k;
        }
    }
    throw ConfigError("unknown setting '" + name + "'");
}

/// Resolved settings for one invocation.
class Settings {
  public:
    explicit Settings(std::vector<std::string> keys) : keys_{std::move(keys)} {
        for (const auto &k : keys_) {
            values_[k] = key_spec(k).fallback;
        }
    }

    [[nodiscard]] bool accepts(const std::string &key) const {
        return values_.contains(key);
    }

    void set(const std::string &key, const std::string &value) {
        const auto &spec = key_spec(key);
        check(spec, value);
        values_.at(key) = value;
    }

    [[nodiscard]] const std::string &text(const std::string &key) const { return values_.at(key); }

    [[nodiscard]] std::uint64_t uint(const std::string &key) const {
        return std::stoull(values_.at(key));
    }
    [[nodiscard]] std::size_t size(const std::string &key) const {
        return static_cast<std::size_t>(uint(key));
    }
    [[nodiscard]] double real(const std::string &key) const { return std::stod(values_.at(key)); }

    [[nodiscard]] const std::string &required(const std::string &key) const {
        const auto &v = values_.at(key);
        if (v.empty()) {
            throw ConfigError("--" + key + " is required");
        }
        return v;
    }

    /// "key=value" pairs in declaration order.
    [[nodiscard]] std::string describe() const {
        std::string s;
        for (const auto &k : keys_) {
            if (!s.empty()) {
                s += ' ';
            }
            const auto &v = values_.at(k);
            s += k + "=" + (v.find(' ') != std::string::npos ? "\"" + v + "\"" : v);
        }
        return s;
    }

  private:
    static void check(const KeySpec &spec, const std::string &value) {
        const auto bad = [&] {
            return ConfigError("invalid value '" + value + "' for " + spec.name);
        };
        if (spec.kind == Kind::UInt) {
            if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos ||
                value.size() > 19) {
                throw bad();
            }
        } else if (spec.kind == Kind::Real) {
            char *end = nullptr;
            const double v = std::strtod(value.c_str(), &end);
            if (value.empty() || *end != '\0' || !std::isfinite(v)) {
                throw bad();
            }
        }
    }

    std::vector<std::string> keys_;
    std::map<std::string, std::string> values_;
};

/// Reads a flat key-value file. Keys may use '-' or '_'.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>>
read_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return std::string{};
        }
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        }
        auto key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

namespace detail {

inline const std::vector<std::string> kModelKeys{"qubits", "depth", "embed-dim", "classes",
                                                 "readout"};
inline const std::vector<std::string> kTrainKeys{
    "seed",       "qubits", "depth",   "embed-dim", "classes", "readout", "loss-mode",
    "lambda2",    "lr",     "epochs",  "batch-size", "threads", "corpus", "teacher",
    "embedding",  "out"};

inline model::ModelConfig model_config(const Settings &s) {
    model::ModelConfig m;
    m.n_qubits = s.size("qubits");
    m.depth = s.size("depth");
    m.embed_dim = s.size("embed-dim");
    m.n_classes = s.size("classes");
    std::istringstream rs(s.text("readout"));
    for (std::string q; std::getline(rs, q, ',');) {
        if (q.empty() || q.find_first_not_of("0123456789 ") != std::string::npos) {
            throw ConfigError("invalid readout list '" + s.text("readout") + "'");
        }
        m.readout.push_back(std::stoul(q));
    }
    m.validate();
    return m;
}

inline train::TrainConfig train_config(const Settings &s) {
    train::TrainConfig c;
    c.model = model_config(s);
    c.loss = loss::LossSpec(loss::parse_mode(s.text("loss-mode")), s.real("lambda2"));
    c.adam.lr = s.real("lr");
    c.epochs = s.size("epochs");
    c.batch_size = s.size("batch-size");
    c.seed = s.uint("seed");
    if (s.accepts("repeats")) {
        c.repeats = s.size("repeats");
    }
    c.threads = std::max<std::size_t>(1, s.size("threads"));
    c.embedding_path = s.text("embedding");
    c.validate();
    return c;
}

/// Reads, splits and (when a teacher file is given) attaches teachers.
inline data::SplitCorpus load_training_corpus(const Settings &s, const train::TrainConfig &c) {
    auto examples = data::read_corpus(s.required("corpus"), c.model.n_classes);
    auto split = data::split_corpus(std::move(examples), c.seed);
    const auto &teacher = s.text("teacher");
    if (!teacher.empty()) {
        const data::FileTeacher provider(teacher, c.model.n_classes);
        data::attach_teacher(split, provider);
    } else if (loss::needs_teacher(c.loss.mode())) {
        throw DataError("loss mode " + std::string(loss::mode_name(c.loss.mode())) +
                        " needs --teacher");
    }
    return split;
}

inline std::string fmt(double v, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

inline std::string metrics_line(const train::MetricsReport &m) {
    std::string s = "acc=" + fmt(m.accuracy) + " precision=" + fmt(m.precision) +
                    " recall=" + fmt(m.recall) + " f1=" + fmt(m.f1);
    if (m.acc_per_param) {
        std::ostringstream ss;
        ss << std::scientific << std::setprecision(3) << *m.acc_per_param;
        s += " acc/param=" + ss.str();
    }
    if (m.acc_per_tkd) {
        std::ostringstream ss;
        ss << std::scientific << std::setprecision(3) << *m.acc_per_tkd;
        s += " acc/tkd=" + ss.str();
    }
    return s;
}

inline int cmd_gen_data(const Settings &s, std::ostream &out) {
    data::SyntheticCorpusOptions opt;
    opt.n_examples = s.size("examples");
    opt.n_classes = s.size("classes");
    opt.seed = s.uint("seed");
    opt.overlap = s.real("overlap");
    opt.words_per_class = s.size("words-per-class");
    opt.shared_words = s.size("shared-words");
    opt.min_length = s.size("min-length");
    opt.max_length = s.size("max-length");
    const auto corpus = data::make_synthetic_corpus(opt);
    data::write_corpus(s.required("out"), corpus);
    out << "wrote " << corpus.size() << " examples to " << s.text("out") << '\n';
    return 0;
}

inline int cmd_gen_teacher(const Settings &s, std::ostream &out) {
    const auto classes = s.size("classes");
    auto examples = data::read_corpus(s.required("corpus"), classes);
    const data::SyntheticTeacher teacher(classes, s.real("teacher-accuracy"), s.real("smoothing"),
                                         util::derive_seed(s.uint("seed"), "teacher"));
    data::attach_teacher(examples, teacher);
    data::write_teacher_file(s.required("out"), examples);
    out << "wrote " << examples.size() << " teacher distributions to " << s.text("out") << '\n';
    return 0;
}

inline int cmd_train(const Settings &s, std::ostream &out) {
    const auto cfg = train_config(s);
    const std::filesystem::path dir = s.required("out");
    auto corpus = load_training_corpus(s, cfg);
    std::filesystem::create_directories(dir);

    std::ofstream log(dir / "train.log");
    const auto emit = [&](const std::string &line) {
        out << line << '\n';
        log << line << '\n';
    };
    emit("config " + s.describe());
    emit("split train=" + std::to_string(corpus.train.size()) +
         " validation=" + std::to_string(corpus.validation.size()) +
         " test=" + std::to_string(corpus.test.size()));
    emit("param_count " + std::to_string(model::param_count(cfg.model)));
    auto result = train::train_run(std::move(corpus), cfg, [&](const train::EpochRecord &e) {
        emit("epoch " + std::to_string(e.epoch) + " train_loss=" + fmt(e.train_loss, 6) +
             " val_" + metrics_line(e.validation) + " seconds=" + fmt(e.epoch_seconds, 3));
    });
    const auto &r = result.report;
    emit("initial_train_loss " + fmt(r.initial_train_loss, 6));
    emit("best_epoch " + std::to_string(r.best_epoch));
    emit("test " + metrics_line(r.test));
    emit("distillation_seconds " + fmt(r.distillation_seconds, 3) +
         " inference_seconds " + fmt(r.inference_seconds, 4));

    train::save_checkpoint(dir / "checkpoint.qkd", result.checkpoint);
    train::write_json(dir / "metrics.json", train::run_metrics_json(cfg, r));
    train::write_json(dir / "timing.json", train::run_timing_json(r));
    return 0;
}

inline int cmd_eval(const Settings &s, std::ostream &out) {
    const auto ck = train::load_checkpoint(s.required("checkpoint"));
    auto examples = data::read_corpus(s.required("corpus"), ck.config.model.n_classes);
    const auto &which = s.text("split");
    std::vector<data::LabeledExample> chosen;
    if (which == "all") {
        chosen = std::move(examples);
    } else {
        auto split = data::split_corpus(std::move(examples), ck.config.seed);
        if (which == "train") chosen = std::move(split.train);
        else if (which == "validation") chosen = std::move(split.validation);
        else if (which == "test") chosen = std::move(split.test);
        else throw ConfigError("split must be train, validation, test or all");
    }
    const auto m = train::evaluate(ck, chosen);
    out << "eval split=" << which << " n=" << m.n_examples << ' ' << metrics_line(m) << '\n';
    if (!s.text("out").empty()) {
        train::Json j;
        j["checkpoint_seed"] = ck.config.seed;
        j["split"] = which;
        j["param_count"] = ck.params.size();
        j["metrics"] = train::metrics_json(m, true);
        train::write_json(s.text("out"), j);
    }
    return 0;
}

inline int cmd_infer(const Settings &s, std::ostream &out) {
    const auto ck = train::load_checkpoint(s.required("checkpoint"));
    const auto p = train::infer(ck, s.text("text"));
    out << "class " << p.label << '\n' << "probs";
    for (double v : p.probs) {
        out << ' ' << std::setprecision(17) << v;
    }
    out << '\n';
    return 0;
}

inline int cmd_ablate(const Settings &s, std::ostream &out) {
    const auto cfg = train_config(s);
    const std::filesystem::path dir = s.required("out");
    const auto corpus = load_training_corpus(s, cfg);
    std::filesystem::create_directories(dir);
    std::ofstream log(dir / "ablation.log");
    const auto emit = [&](const std::string &line) {
        out << line << '\n';
        log << line << '\n';
    };
    emit("config " + s.describe());
    const auto report = train::ablation_run(corpus, cfg, [&](loss::LossMode m, const train::RunReport &r) {
        emit("run mode=" + std::string(loss::mode_name(m)) + " seed=" + std::to_string(r.seed) +
             " best_epoch=" + std::to_string(r.best_epoch) + " test_" + metrics_line(r.test));
    });
    emit("mode       acc     precision recall  f1");
    for (const auto &row : report.rows) {
        std::string name(loss::mode_name(row.mode));
        name.resize(10, ' ');
        emit(name + " " + fmt(row.mean.accuracy) + "  " + fmt(row.mean.precision) + "    " +
             fmt(row.mean.recall) + "  " + fmt(row.mean.f1));
    }
    train::write_json(dir / "ablation.json", train::ablation_json(cfg, report));
    return 0;
}

inline int cmd_describe(const Settings &s, std::ostream &out) {
    const auto mc = model_config(s);
    const auto n = mc.n_qubits;
    std::size_t uy = 0, zz = 0, uz = 0, cnot = 0;
    out << "encoding: z = W E + b (W " << n << "x" << mc.embed_dim << ", b " << n << ")\n";
    for (std::size_t q = 0; q < n; ++q) {
        out << "  RX(z[" << q << "]) q" << q << '\n';
    }
    for (std::size_t l = 0; l < mc.depth; ++l) {
        out << "layer " << l + 1 << ":\n";
        for (std::size_t q = 0; q < n; ++q) {
            out << "  UY q" << q << ": RY(phi[" << l << "][" << q << "][0]) RY(phi[" << l
                << "][" << q << "][1]) RY(phi[" << l << "][" << q << "][2])\n";
            uy += 3;
        }
        for (std::size_t q = 0; q + 1 < n; ++q) {
            out << "  RZZ q" << q << ",q" << q + 1 << ": delta[" << l << "][" << q << "]\n";
            ++zz;
        }
        for (std::size_t q = 0; q < n; ++q) {
            out << "  UZ q" << q << ": RZ(lambda[" << l << "][" << q << "][0]) RZ(lambda[" << l
                << "][" << q << "][1]) RZ(lambda[" << l << "][" << q << "][2])\n";
            uz += 3;
        }
        for (std::size_t q = 0; q + 1 < n; ++q) {
            out << "  CNOT q" << q << " -> q" << q + 1 << '\n';
            ++cnot;
        }
    }
    out << "readout: softmax(";
    const auto r = mc.readout_qubits();
    for (std::size_t k = 0; k < r.size(); ++k) {
        out << (k ? ", " : "") << "<Z q" << r[k] << ">";
    }
    out << ")\n";
    out << "totals: uy_angles=" << uy << " rzz=" << zz << " uz_angles=" << uz << " cnot=" << cnot
        << '\n';
    out << "param_count " << model::param_count(mc) << " (projection " << n * mc.embed_dim
        << ", bias " << n << ", ansatz " << mc.depth * model::layer_param_count(n) << ")\n";
    return 0;
}

struct Command {
    std::string name;
    std::string help;
    std::vector<std::string> keys;
    int (*run)(const Settings &, std::ostream &);
};

inline const std::vector<Command> &commands() {
    static const std::vector<Command> cmds{
        {"gen-data", "write a synthetic labeled corpus",
         {"seed", "classes", "examples", "overlap", "words-per-class", "shared-words",
          "min-length", "max-length", "out"},
         cmd_gen_data},
        {"gen-teacher", "write synthetic teacher distributions for a corpus",
         {"seed", "classes", "corpus", "teacher-accuracy", "smoothing", "out"},
         cmd_gen_teacher},
        {"train", "distill a student and write checkpoint, metrics and logs", kTrainKeys,
         cmd_train},
        {"eval", "score a checkpoint on a corpus split",
         {"checkpoint", "corpus", "split", "out"},
         cmd_eval},
        {"infer", "classify a text with a checkpoint", {"checkpoint", "text"}, cmd_infer},
        {"ablate", "train every loss mode over several seeds", [] {
             auto k = kTrainKeys;
             k.push_back("repeats");
             return k;
         }(),
         cmd_ablate},
        {"describe-circuit", "print the student circuit and its parameter count", kModelKeys,
         cmd_describe},
    };
    return cmds;
}

} // namespace detail

/// Entry point shared by the qkd binary and the tests.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
    CLI::App app{"qkd: distill teacher distributions into a variational quantum classifier"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    struct Bound {
        const detail::Command *cmd;
        CLI::App *sub;
        std::string config;
        std::map<std::string, std::string> flags;
        std::map<std::string, CLI::Option *> opts;
    };
    std::vector<Bound> bound(detail::commands().size());
    for (std::size_t i = 0; i < bound.size(); ++i) {
        auto &b = bound[i];
        b.cmd = &detail::commands()[i];
        b.sub = app.add_subcommand(b.cmd->name, b.cmd->help);
        b.sub->add_option("--config", b.config, "flat key = value settings file");
        for (const auto &k : b.cmd->keys) {
            const auto &spec = key_spec(k);
            std::string help = spec.help;
            if (!spec.fallback.empty()) {
                help += " [" + spec.fallback + "]";
            }
            b.opts[k] = b.sub->add_option("--" + k, b.flags[k], help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    for (auto &b : bound) {
        if (!b.sub->parsed()) {
            continue;
        }
        try {
            Settings s(b.cmd->keys);
            if (!b.config.empty()) {
                for (const auto &[k, v] : read_config_file(b.config)) {
                    (void)key_spec(k);
                    if (s.accepts(k)) {
                        s.set(k, v);
                    }
                }
            }
            for (const auto &k : b.cmd->keys) {
                if (b.opts[k]->count() > 0) {
                    s.set(k, b.flags[k]);
                }
            }
            if (b.cmd->name != "train" && b.cmd->name != "ablate") {
                out << "config " << s.describe() << '\n';
            }
            return b.cmd->run(s, out);
        } catch (const Error &e) {
            err << "error: " << e.what() << '\n';
            return e.exit_code();
        } catch (const std::filesystem::filesystem_error &e) {
            err << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception &e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 1;
}

} // namespace qkd::cli
