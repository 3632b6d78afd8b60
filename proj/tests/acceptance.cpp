// Acceptance suite. Run without arguments for every criterion, or with a
// criterion number for one of them. Prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/kernel_lab.hpp"
#include "fsel/metrics.hpp"
#include "fsel/mlp.hpp"
#include "fsel/rng.hpp"
#include "fsel/svm.hpp"
#include "fsel/vc_lab.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fsel;

namespace {

constexpr int kSeeds = 10;

// Reference step means for alpha = -8, steps 1..6.
constexpr double kReferenceAlpha8[] = {0.204, 0.550, 0.798, 0.930, 0.939, 0.954};
constexpr double kStepTolerance = 0.10;
constexpr double kFinalTssFloor = 0.90;
constexpr double kRuntimeLimitSeconds = 15.0 * 60.0;
constexpr double kExact = 1e-12;

void detail(const std::string& line) { std::cout << "    " << line << '\n'; }

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FSEL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / "fsel_acceptance";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

struct RankRun {
    json trace;
    double seconds = 0.0;
    bool ok = false;
};

// synth + rank through the command-line tool with the default recipe.
RankRun synth_and_rank(double alpha, std::uint64_t seed, std::size_t workers,
                       const std::string& tag) {
    const fs::path dir = work_dir() / tag;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path csv = dir / "data.csv";
    RankRun run;
    std::ostringstream synth;
    synth << "synth --n 1000 --d 15 --alpha " << alpha << " --seed " << seed << " --out " << csv;
    if (run_cli(synth.str()) != 0) {
        return run;
    }
    std::ostringstream rank;
    rank << "rank --classifier svm --q 7 --tau 0.09 --seed " << seed << " --workers " << workers
         << " --data " << csv << " --out " << dir;
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = run_cli(rank.str());
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rc != 0) {
        return run;
    }
    run.trace = json::parse(slurp(dir / "trace.json"));
    run.ok = true;
    return run;
}

std::vector<std::string> selected_names(const json& trace) {
    return trace.at("selected_names").get<std::vector<std::string>>();
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        s += (s.empty() ? "" : ",") + x;
    }
    return s;
}

// ---------------------------------------------------------------------------

bool criterion_1() {
    const std::set<std::string> target{"x1", "x2", "x3", "x4", "x5", "x6"};
    int exact = 0;
    bool final_ok = true;
    double worst_seconds = 0.0;
    std::vector<double> step_sum(6, 0.0);
    std::vector<int> step_count(6, 0);
    for (int s = 1; s <= kSeeds; ++s) {
        const RankRun run = synth_and_rank(-8.0, s, 4, "alpha_m8_seed_" + std::to_string(s));
        if (!run.ok) {
            detail("seed " + std::to_string(s) + ": rank failed");
            return false;
        }
        worst_seconds = std::max(worst_seconds, run.seconds);
        const auto names = selected_names(run.trace);
        const bool hit = std::set<std::string>(names.begin(), names.end()) == target;
        exact += hit;
        const auto& steps = run.trace.at("steps");
        const std::size_t k = run.trace.at("k_star").get<std::size_t>();
        const double final_mean = steps.at(k - 1).at("mean").get<double>();
        final_ok = final_ok && final_mean >= kFinalTssFloor;
        std::string means;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const double m = steps[j].at("mean").get<double>();
            if (j < 6) {
                step_sum[j] += m;
                ++step_count[j];
            }
            if (j < k) {
                means += (means.empty() ? "" : " ") + fmt(m);
            }
        }
        detail("seed " + std::to_string(s) + ": selected {" + join(names) + "} " +
               (hit ? "exact" : "differs") + ", step means " + means + ", k* TSS " +
               fmt(final_mean) + ", " + fmt(run.seconds, 1) + " s");
    }
    bool steps_ok = true;
    std::string step_line;
    for (std::size_t j = 0; j < 6; ++j) {
        const double m = step_sum[j] / step_count[j];
        const bool ok = std::abs(m - kReferenceAlpha8[j]) <= kStepTolerance;
        steps_ok = steps_ok && ok;
        step_line += " " + std::to_string(j + 1) + ":" + fmt(m) + "/" + fmt(kReferenceAlpha8[j]) +
                     (ok ? "" : "!");
    }
    const bool set_ok = exact >= 8;
    const bool time_ok = worst_seconds <= kRuntimeLimitSeconds;
    detail("exact {x1..x6} in " + std::to_string(exact) + "/" + std::to_string(kSeeds) +
           " seeds (need >= 8): " + (set_ok ? "ok" : "not met"));
    detail(std::string("k* step TSS >= 0.90 in every seed: ") + (final_ok ? "ok" : "not met"));
    detail("mean step TSS over seeds vs reference (tol 0.10):" + step_line + " : " +
           (steps_ok ? "ok" : "not met"));
    detail("slowest rank run " + fmt(worst_seconds, 1) + " s with 4 workers (limit 900 s): " +
           (time_ok ? "ok" : "not met"));
    return set_ok && final_ok && steps_ok && time_ok;
}

bool criterion_2() {
    int good = 0;
    for (int s = 1; s <= kSeeds; ++s) {
        const RankRun run = synth_and_rank(-2.0, s, 4, "alpha_m2_seed_" + std::to_string(s));
        if (!run.ok) {
            detail("seed " + std::to_string(s) + ": rank failed");
            return false;
        }
        const auto sel = run.trace.at("selected").get<std::vector<std::size_t>>();
        const bool tail = std::any_of(sel.begin(), sel.end(), [](std::size_t j) { return j >= 6; });
        const bool ok = sel.size() >= 7 && tail;
        good += ok;
        detail("seed " + std::to_string(s) + ": " + std::to_string(sel.size()) + " selected {" +
               join(selected_names(run.trace)) + "}" + (ok ? "" : " (does not qualify)"));
    }
    detail(std::to_string(good) + "/" + std::to_string(kSeeds) + " seeds qualify (need >= 7)");
    return good >= 7;
}

bool criterion_3() {
    std::size_t failures = 0;
    auto expect = [&](Score s, double v, const char* what) {
        if (!s || std::abs(*s - v) > kExact) {
            ++failures;
            detail(std::string("mismatch: ") + what);
        }
    };
    auto expect_undefined = [&](Score s, const char* what) {
        if (s) {
            ++failures;
            detail(std::string("expected undefined: ") + what);
        }
    };
    if (!(confusion(Labels{1, -1}, Labels{1, -1}) == ConfusionCounts{1, 0, 0, 1}) ||
        !(confusion(Labels{1, 1}, Labels{-1, -1}) == ConfusionCounts{0, 2, 0, 0}) ||
        !(confusion(Labels{1, -1, -1, 1}, Labels{1, 1, -1, -1}) == ConfusionCounts{1, 1, 1, 1})) {
        ++failures;
        detail("confusion examples mismatch");
    }
    expect(tss({1, 0, 0, 1}), 1.0, "tss perfect");
    expect(tss({50, 50, 25, 25}), 0.0, "tss half");
    expect(tss({90, 10, 5, 20}), 0.8 + 0.9 - 1.0, "tss (90,10,5,20)");
    const ScoreReport one = score_suite({1, 0, 0, 1});
    for (Score s : {one.tss, one.hss, one.precision, one.recall, one.specificity, one.f1,
                    one.balanced_accuracy}) {
        expect(s, 1.0, "perfect suite");
    }
    const ScoreReport r = score_suite({90, 10, 5, 20});
    const double p = 20.0 / 30.0;
    expect(r.precision, p, "precision");
    expect(r.f1, 2.0 * p * 0.8 / (p + 0.8), "f1");
    expect(r.balanced_accuracy, 0.85, "balanced accuracy");
    expect(r.hss, 2.0 * (1800.0 - 50.0) / (25.0 * 95.0 + 30.0 * 100.0), "hss");
    const ScoreReport edge = score_suite({0, 0, 0, 5});
    expect(edge.recall, 1.0, "edge recall");
    expect_undefined(edge.specificity, "edge specificity");
    expect_undefined(edge.tss, "edge tss");

    CounterRng rng(10007);
    std::size_t identity_checked = 0;
    for (int t = 0; t < 10000; ++t) {
        ConfusionCounts c{rng.below(100), rng.below(100), rng.below(100), rng.below(100)};
        if (c.total() == 0) {
            c.tn = 1;
        }
        const Score re = recall(c);
        const Score sp = specificity(c);
        const Score v = tss(c);
        if (re && sp) {
            ++identity_checked;
            if (!v || std::abs(*v - (*re + *sp - 1.0)) > kExact) {
                ++failures;
            }
        } else if (v) {
            ++failures;
        }
    }
    detail("TSS identity checked on " + std::to_string(identity_checked) +
           " defined tables out of 10000 random tables");
    detail(std::to_string(failures) + " mismatches at tolerance 1e-12");
    return failures == 0;
}

bool criterion_4() {
    CounterRng rng(4242);
    const double gammas[] = {0.01, 0.1, 1.0, 10.0};
    std::size_t entry_violations = 0;
    std::size_t norm_violations = 0;
    std::size_t align_violations = 0;
    std::size_t prefixes = 0;
    double worst_alignment = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(49);
        const std::size_t d = 1 + rng.below(10);
        const double gamma = gammas[t % 4];
        Dataset ds{Matrix(n, d), Labels(n), {}};
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                ds.X(i, j) = rng.normal() * (1.0 + static_cast<double>(j));
            }
            ds.y[i] = rng.below(2) ? 1 : -1;
        }
        for (std::size_t j = 0; j < d; ++j) {
            ds.names.push_back("f" + std::to_string(j));
        }
        std::vector<std::size_t> order(d);
        for (std::size_t j = 0; j < d; ++j) {
            order[j] = j;
        }
        for (std::size_t j = d; j > 1; --j) {
            std::swap(order[j - 1], order[rng.below(j)]);
        }
        const auto trace = alignment_trace(ds, order, gamma);
        Matrix prev;
        double prev_norm = 0.0;
        for (std::size_t k = 1; k <= d; ++k) {
            const Matrix K =
                gaussian_gram(project_features(ds, std::span(order).first(k)).X, gamma).K;
            const double norm = frobenius_norm(K);
            ++prefixes;
            if (k > 1) {
                for (std::size_t e = 0; e < K.values().size(); ++e) {
                    entry_violations += K.values()[e] > prev.values()[e];
                }
                norm_violations += norm > prev_norm;
                norm_violations += trace[k - 1].frobenius_norm > trace[k - 2].frobenius_norm;
                const double a = alignment(K, prev);
                worst_alignment = std::max(worst_alignment, std::abs(a));
                align_violations += std::abs(a) > 1.0 + kExact;
            }
            const double ta = target_alignment(K, ds.y);
            worst_alignment = std::max(worst_alignment, std::abs(ta));
            align_violations += std::abs(ta) > 1.0 + kExact;
            align_violations += std::abs(trace[k - 1].target_alignment) > 1.0 + kExact;
            prev = K;
            prev_norm = norm;
        }
    }
    detail(std::to_string(prefixes) + " prefixes over 200 datasets: " +
           std::to_string(entry_violations) + " entrywise, " + std::to_string(norm_violations) +
           " norm, " + std::to_string(align_violations) + " alignment violations; max |alignment| " +
           fmt(worst_alignment, 15));
    return entry_violations == 0 && norm_violations == 0 && align_violations == 0;
}

bool criterion_5() {
    const std::size_t trials = 20;
    const std::uint64_t seed = 5;
    const std::size_t v1 = empirical_vc(1, {}, trials, 0, seed).vc;
    const std::size_t v2 = empirical_vc(2, {}, trials, 0, seed).vc;
    detail("empirical VC d=1: " + std::to_string(v1) + " (expect 2), d=2: " + std::to_string(v2) +
           " (expect 3)");
    bool ok = v1 == 2 && v2 == 3;

    std::size_t configs = 0;
    std::size_t violations = 0;
    for (std::size_t d = 1; d <= 3; ++d) {
        const std::size_t s_max = std::min<std::size_t>(6, 2 * (d + 2));
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            BlindSet blind;
            for (std::size_t j = 0; j < d; ++j) {
                if (mask >> j & 1) {
                    blind.insert(j);
                }
            }
            const std::size_t base = empirical_vc(d, blind, trials, s_max, seed).vc;
            for (std::size_t k = 0; k < d; ++k) {
                if (blind.count(k)) {
                    continue;
                }
                BlindSet more = blind;
                more.insert(k);
                const std::size_t v = empirical_vc(d, more, trials, s_max, seed).vc;
                ++configs;
                violations += v > base;
            }
        }
    }
    detail("blind monotonicity: " + std::to_string(violations) + " violations over " +
           std::to_string(configs) + " (d, B, k) configurations");
    ok = ok && violations == 0;

    std::size_t prop_failures = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t dim = 2 + s % 2;
        const std::size_t size = 2 + s % 3;
        const PointSet ps = random_point_set(dim, size, 1000 + s, 10);
        const std::size_t k = s % dim;
        const bool base = shatters(ps, {k});
        for (std::int64_t a : {-4, 0, 9}) {
            const PointSet proj = blind_project(ps, k, a);
            prop_failures += base != shatters(proj, {k});
            prop_failures += shatters(proj, {k}) != shatters(drop_coordinate(proj, k));
        }
    }
    detail("blind projection and coordinate drop: " + std::to_string(prop_failures) +
           " disagreements on 100 seeded point sets");
    return ok && prop_failures == 0;
}

double independent_kkt_gap(const Dataset& ds, const std::vector<double>& alpha, double gamma,
                           double C) {
    double up = -1e300;
    double low = 1e300;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double g = -1.0;
        for (std::size_t j = 0; j < ds.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < ds.dims(); ++k) {
                const double t = ds.X(i, k) - ds.X(j, k);
                d2 += t * t;
            }
            g += ds.y[i] * ds.y[j] * std::exp(-gamma * d2) * alpha[j];
        }
        const double v = -ds.y[i] * g;
        if ((ds.y[i] == 1 && alpha[i] < C) || (ds.y[i] == -1 && alpha[i] > 0.0)) {
            up = std::max(up, v);
        }
        if ((ds.y[i] == 1 && alpha[i] > 0.0) || (ds.y[i] == -1 && alpha[i] < C)) {
            low = std::min(low, v);
        }
    }
    return up - low;
}

Dataset rows_to_dataset(const std::vector<std::vector<double>>& rows, const Labels& y) {
    Dataset ds{Matrix(rows.size(), rows[0].size()), y, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            ds.X(i, j) = rows[i][j];
        }
    }
    for (std::size_t j = 0; j < rows[0].size(); ++j) {
        ds.names.push_back("f" + std::to_string(j));
    }
    return ds;
}

Dataset gaussian_blobs(std::size_t n, std::uint64_t seed, double sep) {
    CounterRng rng(seed);
    Dataset ds{Matrix(n, 2), Labels(n), {"a", "b"}};
    for (std::size_t i = 0; i < n; ++i) {
        ds.y[i] = i % 2 ? 1 : -1;
        ds.X(i, 0) = 0.5 * rng.normal() + ds.y[i] * sep / 2.0;
        ds.X(i, 1) = 0.5 * rng.normal();
    }
    return ds;
}

bool criterion_6() {
    struct Fixture {
        std::string name;
        Dataset ds;
        SvmConfig cfg;
        bool expect_perfect;
    };
    std::vector<Fixture> fixtures;
    auto cfg = [](double C, std::optional<double> gamma) {
        SvmConfig c;
        c.C = C;
        c.gamma = gamma;
        return c;
    };
    fixtures.push_back({"1-D pair", rows_to_dataset({{-1.0}, {1.0}}, {-1, 1}), cfg(10.0, {}), true});
    fixtures.push_back({"XOR", rows_to_dataset({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {1, 1, -1, -1}),
                        cfg(10.0, 1.0), true});
    for (std::uint64_t s = 0; s < 4; ++s) {
        fixtures.push_back({"separable blobs " + std::to_string(s), gaussian_blobs(60, s, 6.0),
                            cfg(100.0, 0.5), true});
        for (double C : {0.1, 1.0, 10.0, 1000.0}) {
            fixtures.push_back({"overlapping blobs " + std::to_string(s) + " C=" + fmt(C, 1),
                                gaussian_blobs(80, s, 1.0), cfg(C, 0.5), false});
            fixtures.push_back(
                {"synthetic " + std::to_string(s) + " C=" + fmt(C, 1),
                 standardize(generate_synthetic(200, 15, -8.0, s)).train, cfg(C, 0.02), false});
        }
    }
    std::size_t bad = 0;
    double worst_kkt = 0.0;
    for (const auto& f : fixtures) {
        const SvmModel m = train_svm_smo(f.ds, f.cfg);
        const auto& info = m.fit_info();
        bool feasible = info.dual.size() == f.ds.size();
        for (double a : info.dual) {
            feasible = feasible && a >= 0.0 && a <= f.cfg.C;
        }
        const double gamma = f.cfg.gamma.value_or(1.0 / static_cast<double>(f.ds.dims()));
        const double gap = independent_kkt_gap(f.ds, info.dual, gamma, f.cfg.C);
        worst_kkt = std::max(worst_kkt, gap);
        const bool kkt = gap <= f.cfg.tol + 1e-9 && info.converged;
        bool perfect = true;
        if (f.expect_perfect) {
            perfect = tss(confusion(m.predict(f.ds.X), f.ds.y)).value_or(0.0) == 1.0;
        }
        if (!(feasible && kkt && perfect)) {
            ++bad;
            detail("fixture '" + f.name + "' feasible=" + std::to_string(feasible) +
                   " kkt_gap=" + fmt(gap, 6) + " perfect=" + std::to_string(perfect));
        }
    }
    detail(std::to_string(fixtures.size()) + " fixtures, " + std::to_string(bad) +
           " unhealthy, worst recomputed KKT gap " + fmt(worst_kkt, 6) + " (tol 1e-3)");
    return bad == 0;
}

bool criterion_7() {
    Dataset ds{Matrix(5, 4), Labels{1, -1, 1, -1, -1}, {"a", "b", "c", "d"}};
    CounterRng rng(77);
    for (double& v : ds.X.values()) {
        v = rng.normal();
    }
    const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
    bool ok = true;
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        MlpNetwork net(4, {16, 8});
        net.initialize(seed);
        const double l2 = 1e-3;
        const auto g = net.gradient(ds.X, ds.y, rows, l2);
        const double h = 1e-6;
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            MlpNetwork plus = net;
            MlpNetwork minus = net;
            plus.parameters()[p] += h;
            minus.parameters()[p] -= h;
            const double fd =
                (plus.loss(ds.X, ds.y, rows, l2) - minus.loss(ds.X, ds.y, rows, l2)) / (2.0 * h);
            diff += (g[p] - fd) * (g[p] - fd);
            scale += (std::abs(g[p]) + std::abs(fd)) * (std::abs(g[p]) + std::abs(fd));
        }
        const double rel = std::sqrt(diff) / std::sqrt(scale);
        detail("seed " + std::to_string(seed) + ": " + std::to_string(g.size()) +
               " parameters, relative error " + fmt(rel, 10));
        ok = ok && rel < 1e-4;
    }
    return ok;
}

bool criterion_8() {
    const fs::path dir = work_dir() / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path csv = dir / "data.csv";
    if (run_cli("synth --n 1000 --d 15 --alpha -8 --seed 3 --out " + csv.string()) != 0) {
        return false;
    }
    std::vector<std::string> traces;
    for (const auto& [tag, workers] : {std::pair{"w1a", 1}, {"w1b", 1}, {"w4", 4}}) {
        const fs::path out = dir / tag;
        std::ostringstream cmd;
        cmd << "rank --seed 3 --q 7 --tau 0.09 --max-features 6 --workers " << workers
            << " --data " << csv << " --out " << out;
        if (run_cli(cmd.str()) != 0) {
            detail(std::string("rank failed for ") + tag);
            return false;
        }
        traces.push_back(slurp(out / "trace.json"));
    }
    const bool rerun = traces[0] == traces[1];
    const bool workers = traces[0] == traces[2];
    detail(std::string("same seed rerun identical: ") + (rerun ? "yes" : "no") +
           ", workers 1 vs 4 identical: " + (workers ? "yes" : "no") + " (" +
           std::to_string(traces[0].size()) + " bytes)");
    return rerun && workers && !traces[0].empty();
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "synthetic ranking, alpha=-8", criterion_1},
        {2, "synthetic ranking, alpha=-2", criterion_2},
        {3, "metric exactness", criterion_3},
        {4, "kernel prefix monotonicity", criterion_4},
        {5, "VC lab", criterion_5},
        {6, "SVM solver health", criterion_6},
        {7, "MLP gradient check", criterion_7},
        {8, "rank determinism", criterion_8},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) {
            continue;
        }
        std::cout << "criterion " << c.id << " (" << c.title << ")\n";
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            detail(std::string("exception: ") + e.what());
        }
        std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title
                  << std::endl;
        failed += !ok;
    }
    return failed == 0 ? 0 : 1;
}
