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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qkd/cli/app.hpp"
#include "qkd/qkd.hpp"

using namespace qkd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string &name, const std::function<Outcome()> &check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception &e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << std::endl;
}

// 1 -------------------------------------------------------------------------

Outcome simulator_oracle() {
    using sim::GateKind;
    using sim::GateOp;
    constexpr GateKind kinds[] = {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::RZZ, GateKind::CNOT,
                                  GateKind::CZ, GateKind::X,  GateKind::Y,  GateKind::Z,   GateKind::H};
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> ang(-2 * std::numbers::pi, 2 * std::numbers::pi);
    const auto t0 = Clock::now();
    std::size_t cases = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (auto kind : kinds) {
                if (sim::arity(kind) == 2 && n < 2) continue;
                const std::size_t a = rng() % n;
                std::size_t b = rng() % n;
                while (sim::arity(kind) == 2 && b == a) b = rng() % n;
                const auto op = sim::arity(kind) == 1 ? GateOp::single(kind, a, ang(rng))
                                                      : GateOp::pair(kind, a, b, ang(rng));
                sim::StateVector s(n);
                auto amps = s.amplitudes();
                double norm = 0.0;
                for (auto &z : amps) {
                    z = {g(rng), g(rng)};
                    norm += std::norm(z);
                }
                std::vector<oracle::C> v;
                for (auto &z : amps) v.push_back(z /= std::sqrt(norm));
                const auto want = oracle::apply(oracle::full_gate(n, op), v);
                const auto got = sim::apply_gate(s, op);
                for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
                ++cases;
            }
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = cases >= 500 && worst <= 1e-12 && secs < 10.0;
    return {ok, std::to_string(cases) + " cases, max |diff| " + sci(worst) + " (tol 1e-12), " + sci(secs) +
                    " s (limit 10 s)"};
}

// 2 -------------------------------------------------------------------------

Outcome gradient_oracles() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> w(-1.0, 1.0), ang(-3.14159, 3.14159), u(0.05, 1.0);
    const auto t0 = Clock::now();
    double ps_err = 0.0, fd_err = 0.0;
    std::size_t configs = 0, coords = 0;
    for (int t = 0; t < 24; ++t) {
        model::ModelConfig cfg;
        cfg.n_qubits = 2 + rng() % 3;
        cfg.depth = rng() % 3;
        cfg.embed_dim = 1 + rng() % 3;
        cfg.n_classes = 2 + rng() % (cfg.n_qubits - 1);
        model::StudentParams params{model::ParamLayout(cfg)};
        const auto L = params.layout();
        for (std::size_t i = 0; i < params.size(); ++i) params[i] = i < L.layer_offset(0) ? w(rng) : ang(rng);
        const loss::LossMode modes[] = {loss::LossMode::CE, loss::LossMode::KL, loss::LossMode::JS,
                                        loss::LossMode::Combined};
        const loss::LossSpec spec(modes[t % 4], 0.1 + 0.8 * u(rng));
        std::vector<grad::Example> batch;
        const std::size_t bs = 1 + rng() % 4;
        for (std::size_t b = 0; b < bs; ++b) {
            grad::Example ex;
            ex.id = "a" + std::to_string(b);
            for (std::size_t j = 0; j < cfg.embed_dim; ++j) ex.pooled.push_back(w(rng));
            ex.label = rng() % cfg.n_classes;
            std::vector<double> f(cfg.n_classes);
            double s = 0.0;
            for (auto &x : f) s += (x = u(rng));
            for (auto &x : f) x /= s;
            ex.teacher = ProbDist::renormalized(f, 1e-9);
            batch.push_back(std::move(ex));
        }
        const auto adj = grad::loss_gradient(batch, params, cfg, spec).gradient;
        const auto ps = grad::parameter_shift_gradient(batch, params, cfg, spec);
        const auto fd = grad::finite_diff_gradient(batch, params, cfg, spec, 1e-4);
        for (std::size_t i = 0; i < params.size(); ++i) {
            ps_err = std::max(ps_err, std::abs(adj[i] - ps[i]));
            fd_err = std::max({fd_err, std::abs(adj[i] - fd[i]), std::abs(ps[i] - fd[i])});
        }
        coords += params.size();
        ++configs;
    }
    const double secs = seconds_since(t0);
    const bool ok = configs >= 20 && ps_err <= 1e-8 && fd_err <= 1e-5 && secs < 60.0;
    return {ok, std::to_string(configs) + " configs, " + std::to_string(coords) + " coordinates, adjoint vs shift " +
                    sci(ps_err) + " (tol 1e-8), vs finite diff " + sci(fd_err) + " (tol 1e-5), " + sci(secs) +
                    " s (limit 60 s)"};
}

// 3 -------------------------------------------------------------------------

Outcome loss_identities() {
    using namespace loss;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto dist = [&](std::size_t c) {
        std::vector<double> v(c);
        double s = 0.0;
        for (auto &x : v) s += (x = u(rng) < 0.1 ? 0.0 : u(rng));
        if (s == 0.0) v[0] = s = 1.0;
        for (auto &x : v) x /= s;
        return ProbDist::renormalized(v, 1e-9);
    };
    bool props = true;
    for (int t = 0; t < 5000; ++t) {
        const std::size_t c = 2 + rng() % 4;
        const auto f = dist(c), q = dist(c);
        props &= kl_divergence(f, q) >= 0.0;
        const double js = js_divergence(f, q);
        props &= std::abs(js - js_divergence(q, f)) <= 1e-12 && js <= std::log(2.0) + 1e-12 && js >= 0.0;
        const std::vector<LossSample> b{{f, q, ProbDist::one_hot(c, t % c)}};
        props &= combined_loss(b, LossSpec(LossMode::Combined, 1.0)) == combined_loss(b, LossSpec(LossMode::CE, 1.0));
        props &= combined_loss(b, LossSpec(LossMode::Combined, 0.0)) == kl_divergence(f, q) + js_divergence(f, q);
    }
    const double kl = kl_divergence({1.0, 0.0}, {0.5, 0.5});
    const double js = js_divergence({1.0, 0.0}, {0.5, 0.5});
    const std::vector<LossSample> b{{ProbDist{1.0, 0.0}, ProbDist{0.5, 0.5}, ProbDist::one_hot(2, 0)}};
    const double comb = combined_loss(b, LossSpec(LossMode::Combined, 0.1));
    const double e1 = std::abs(kl - 0.693147), e2 = std::abs(js - 0.215762), e3 = std::abs(comb - 0.887333);
    const bool ok = props && e1 <= 1e-6 && e2 <= 1e-6 && e3 <= 1e-6;
    return {ok, std::string("5000 random property trials ") + (props ? "hold" : "VIOLATED") + "; KL " +
                    std::to_string(kl) + ", JS " + std::to_string(js) + ", combined " + std::to_string(comb) +
                    " (tol 1e-6)"};
}

// 4 -------------------------------------------------------------------------

Outcome metric_formulas() {
    const auto m = train::metrics_from_counts({50, 30, 10, 10});
    const double r = train::acc_per_param(0.8012, 9275);
    const bool exact = m.accuracy == 0.8 && std::abs(m.precision - 5.0 / 6) < 1e-15 &&
                       std::abs(m.recall - 5.0 / 6) < 1e-15 && std::abs(m.f1 - 5.0 / 6) < 1e-15;
    const double rel = std::abs(r - 8.64e-5) / 8.64e-5;
    return {exact && rel <= 0.005, "acc " + std::to_string(m.accuracy) + " P " + std::to_string(m.precision) +
                                       " R " + std::to_string(m.recall) + " F1 " + std::to_string(m.f1) +
                                       "; Acc/Param " + sci(r) + " vs 8.64e-5, rel err " + sci(rel) +
                                       " (tol 0.005)"};
}

// 5 -------------------------------------------------------------------------

data::SplitCorpus synthetic_task(std::uint64_t seed) {
    auto s = data::split_corpus(data::make_synthetic_corpus(400, 2, seed), seed);
    data::attach_teacher(s, data::SyntheticTeacher(2, 0.95, 0.1, util::derive_seed(seed, "teacher")));
    return s;
}

train::TrainConfig reference_config(std::uint64_t seed) {
    train::TrainConfig cfg;
    cfg.model = {4, 16, 2, 2, {}};
    cfg.seed = seed;
    return cfg;
}

// Logistic regression on pooled embeddings, full-batch gradient descent.
double logistic_oracle(const data::SplitCorpus &raw, std::uint64_t seed) {
    auto c = raw;
    const auto vocab = data::tokenize_corpus(c);
    const auto cfg = reference_config(seed);
    const auto emb = train::make_embedding(cfg, vocab);
    const auto tr = train::featurize(c.train, vocab, emb, false);
    const auto te = train::featurize(c.test, vocab, emb, false);
    const std::size_t m = cfg.model.embed_dim;
    std::vector<double> w(m + 1, 0.0);
    const auto logit = [&](const std::vector<double> &x) {
        double z = w[m];
        for (std::size_t j = 0; j < m; ++j) z += w[j] * x[j];
        return z;
    };
    for (int it = 0; it < 3000; ++it) {
        std::vector<double> gsum(m + 1, 0.0);
        for (const auto &ex : tr) {
            const double p = 1.0 / (1.0 + std::exp(-logit(ex.pooled)));
            const double d = p - static_cast<double>(ex.label);
            for (std::size_t j = 0; j < m; ++j) gsum[j] += d * ex.pooled[j];
            gsum[m] += d;
        }
        for (std::size_t j = 0; j <= m; ++j) w[j] -= 1.0 * gsum[j] / static_cast<double>(tr.size());
    }
    std::size_t right = 0;
    for (const auto &ex : te) right += (logit(ex.pooled) > 0.0 ? 1u : 0u) == ex.label;
    return static_cast<double>(right) / static_cast<double>(te.size());
}

Outcome synthetic_distillation() {
    const auto t0 = Clock::now();
    std::size_t good = 0;
    std::string accs, oracles;
    double worst_oracle = 1.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto corpus = synthetic_task(seed);
        const auto r = train::train_run(corpus, reference_config(seed));
        good += r.report.test.accuracy >= 0.90;
        accs += (seed ? "," : "") + std::to_string(r.report.test.accuracy).substr(0, 5);
        const double lo = logistic_oracle(corpus, seed);
        worst_oracle = std::min(worst_oracle, lo);
        oracles += (seed ? "," : "") + std::to_string(lo).substr(0, 5);
    }
    const double secs = seconds_since(t0);
    const bool ok = good >= 4 && worst_oracle > 0.95 && secs < 300.0;
    return {ok, "test acc [" + accs + "], " + std::to_string(good) + "/5 seeds >= 0.90 (need 4); logistic oracle [" +
                    oracles + "] (need > 0.95); " + sci(secs) + " s (limit 300 s)"};
}

// 6 -------------------------------------------------------------------------

Outcome ablation_direction() {
    auto cfg = reference_config(0);
    cfg.repeats = 5;
    const auto a = train::ablation_run(synthetic_task(0), cfg);
    const train::AblationRow *ce = nullptr, *comb = nullptr;
    bool shared_init = a.rows.size() == 4;
    for (const auto &row : a.rows) {
        if (row.mode == loss::LossMode::CE) ce = &row;
        if (row.mode == loss::LossMode::Combined) comb = &row;
        for (std::size_t r = 0; r < row.runs.size(); ++r)
            shared_init &= row.runs[r].initial_params_hash == a.rows.front().runs[r].initial_params_hash;
    }
    if (!ce || !comb) return {false, "missing CE or COMBINED row"};
    std::size_t at_least = 0, below = 0;
    for (std::size_t r = 0; r < 5; ++r) {
        at_least += comb->runs[r].test.accuracy >= ce->runs[r].test.accuracy;
        below += comb->runs[r].test.accuracy < ce->runs[r].test.accuracy;
    }
    std::string rows;
    for (const auto &row : a.rows)
        rows += std::string(rows.empty() ? "" : ", ") + std::string(loss::mode_name(row.mode)) + " " +
                std::to_string(row.mean.accuracy).substr(0, 5);
    const bool ok = shared_init && below < 5;
    return {ok, "mean acc {" + rows + "}; COMBINED >= CE on " + std::to_string(at_least) +
                    "/5 seeds (target 3), fails only if below on 5/5; shared init " + (shared_init ? "yes" : "NO")};
}

// 7 -------------------------------------------------------------------------

struct CliRun {
    int code;
    std::string out;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qkd");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str() + err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing output " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kWork = fs::temp_directory_path() / "qkd_acceptance";

Outcome determinism() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const std::vector<std::string> model{"--qubits", "4", "--depth", "2", "--embed-dim", "16", "--seed", "11"};
    std::vector<std::string> mismatched;
    std::size_t compared = 0;
    const auto twice = [&](const std::string &name, const std::function<std::string(const fs::path &)> &once) {
        const auto a = once(kWork / (name + "_a")), b = once(kWork / (name + "_b"));
        ++compared;
        if (a != b || a.empty()) mismatched.push_back(name);
    };
    const auto p = [](const fs::path &x) { return x.string(); };
    const auto ok_or_throw = [](const CliRun &r) {
        if (r.code != 0) throw std::runtime_error("qkd failed: " + r.out);
        return r;
    };

    twice("gen-data", [&](const fs::path &d) {
        ok_or_throw(cli({"gen-data", "--examples", "120", "--seed", "11", "--out", p(d)}));
        return slurp(d);
    });
    const auto corpus = p(kWork / "gen-data_a");
    twice("gen-teacher", [&](const fs::path &d) {
        ok_or_throw(cli({"gen-teacher", "--corpus", corpus, "--seed", "11", "--out", p(d)}));
        return slurp(d);
    });
    const auto teacher = p(kWork / "gen-teacher_a");
    twice("train", [&](const fs::path &d) {
        auto args = std::vector<std::string>{"train", "--corpus", corpus, "--teacher", teacher, "--epochs", "3",
                                             "--out", p(d)};
        args.insert(args.end(), model.begin(), model.end());
        ok_or_throw(cli(args));
        return slurp(d / "metrics.json");
    });
    const auto ck = p(kWork / "train_a" / "checkpoint.qkd");
    twice("eval", [&](const fs::path &d) {
        ok_or_throw(cli({"eval", "--checkpoint", ck, "--corpus", corpus, "--out", p(d)}));
        return slurp(d);
    });
    twice("infer", [&](const fs::path &) {
        return ok_or_throw(cli({"infer", "--checkpoint", ck, "--text", "c1w3 c1w4 sh2"})).out;
    });
    twice("ablate", [&](const fs::path &d) {
        auto args = std::vector<std::string>{"ablate", "--corpus", corpus, "--teacher", teacher, "--epochs", "2",
                                             "--repeats", "2", "--out", p(d)};
        args.insert(args.end(), model.begin(), model.end());
        ok_or_throw(cli(args));
        return slurp(d / "ablation.json");
    });
    twice("describe-circuit", [&](const fs::path &) {
        return ok_or_throw(cli({"describe-circuit", "--qubits", "4", "--depth", "2", "--embed-dim", "16"})).out;
    });
    std::string bad;
    for (const auto &m : mismatched) bad += " " + m;
    return {mismatched.empty(), std::to_string(compared) + " subcommands run twice, " +
                                    (mismatched.empty() ? std::string("all outputs byte-identical")
                                                        : "differences in:" + bad)};
}

// 8 -------------------------------------------------------------------------

Outcome teacher_freeze() {
    fs::create_directories(kWork);
    auto examples = data::make_synthetic_corpus(80, 2, 5);
    data::attach_teacher(examples, data::SyntheticTeacher(2, 0.9, 0.1, 5));
    const auto teacher_path = kWork / "freeze_teacher.jsonl";
    data::write_teacher_file(teacher_path, examples);
    const auto teacher_bytes = slurp(teacher_path);
    for (auto &e : examples) e.teacher.reset();

    const data::FileTeacher provider(teacher_path, 2);
    auto split = data::split_corpus(examples, 5);
    data::attach_teacher(split, provider);
    const auto attach_reads = provider.reads();

    auto cfg = reference_config(5);
    cfg.epochs = 3;
    const auto r = train::train_run(split, cfg);
    const auto reads_after_train = provider.reads();
    const auto ck = kWork / "freeze.qkd";
    train::save_checkpoint(ck, r.checkpoint);

    const auto before_infer = provider.reads();
    (void)train::infer(r.checkpoint, "c0w1 c0w5 c0w2");
    const auto cli_infer = cli({"infer", "--checkpoint", ck.string(), "--text", "c1w0 c1w1"});
    const auto infer_reads = provider.reads() - before_infer;

    const bool unchanged = slurp(teacher_path) == teacher_bytes;
    const bool ok = provider.writes() == 0 && infer_reads == 0 && reads_after_train == attach_reads &&
                    cli_infer.code == 0 && unchanged;
    return {ok, "writes " + std::to_string(provider.writes()) + ", reads during infer " + std::to_string(infer_reads) +
                    ", reads during training " + std::to_string(reads_after_train - attach_reads) +
                    ", teacher file " + (unchanged ? "unchanged" : "MODIFIED")};
}

} // namespace

int main() {
    report(1, "simulator matches Kronecker-product oracle", simulator_oracle);
    report(2, "adjoint gradients match shift rule and finite differences", gradient_oracles);
    report(3, "loss identities and closed forms", loss_identities);
    report(4, "metric formulas and accuracy per parameter", metric_formulas);
    report(5, "synthetic distillation end to end", synthetic_distillation);
    report(6, "ablation modes and COMBINED vs CE direction", ablation_direction);
    report(7, "byte-identical outputs across repeated invocations", determinism);
    report(8, "teacher freeze audit", teacher_freeze);
    fs::remove_all(kWork);
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
