#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fsel/data.hpp"
#include "fsel/error.hpp"
#include "fsel/greedy.hpp"
#include "fsel/kernel_lab.hpp"
#include "fsel/metrics.hpp"
#include "fsel/mlp.hpp"
#include "fsel/rng.hpp"
#include "fsel/search.hpp"
#include "fsel/svm.hpp"
#include "fsel/vc_lab.hpp"
#include "json.hpp"

namespace fsel::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void log_line(const std::string& msg) { std::cerr << "[fsel] " << msg << '\n'; }

std::size_t default_workers() {
    return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw data_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw data_error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Options shared by the commands that train classifiers.

struct ModelOptions {
    std::string classifier = "svm";
    bool standardize = true;
    // svm
    double C = 1.0;
    double gamma = 0.0;  // 0: 1/d
    double tol = 1e-3;
    std::size_t max_passes = 50;
    std::string search = "once";
    std::size_t n_draws = 20;
    std::size_t folds = 3;
    double c_min = 0.1, c_max = 1000.0, gamma_min = 0.001, gamma_max = 0.1;
    // mlp
    std::string hidden = "16,8";
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t batch = 64;
    double l2 = 1e-4;
    std::size_t patience = 20;
};

void add_model_options(CLI::App* app, ModelOptions& o) {
    app->add_option("--classifier", o.classifier, "Classifier: svm or mlp")
        ->check(CLI::IsMember({"svm", "mlp"}));
    app->add_flag("!--no-standardize", o.standardize,
                  "Skip per-fit standardization of the training features");
    app->add_option("--C", o.C, "SVM box constraint (used when --search none)");
    app->add_option("--gamma", o.gamma, "SVM kernel scale; 0 means 1/d (used when --search none)");
    app->add_option("--svm-tol", o.tol, "SMO tolerance on the maximal KKT violation");
    app->add_option("--max-passes", o.max_passes, "SMO iteration budget in units of n updates");
    app->add_option("--search", o.search,
                    "SVM hyperparameter search: none, once (full feature set) or per-step")
        ->check(CLI::IsMember({"none", "once", "per-step"}));
    app->add_option("--n-draws", o.n_draws, "Random (C, gamma) draws per search");
    app->add_option("--folds", o.folds, "Stratified CV folds per search");
    app->add_option("--c-min", o.c_min, "Lower end of the C search range");
    app->add_option("--c-max", o.c_max, "Upper end of the C search range");
    app->add_option("--gamma-min", o.gamma_min, "Lower end of the gamma search range");
    app->add_option("--gamma-max", o.gamma_max, "Upper end of the gamma search range");
    app->add_option("--hidden", o.hidden, "MLP hidden widths, comma separated");
    app->add_option("--lr", o.learning_rate, "MLP Adam learning rate");
    app->add_option("--epochs", o.epochs, "MLP epochs");
    app->add_option("--batch", o.batch, "MLP mini-batch size");
    app->add_option("--l2", o.l2, "MLP L2 penalty on the first two layers");
    app->add_option("--patience", o.patience, "MLP early-stopping patience (0 disables)");
}

MlpConfig mlp_config(const ModelOptions& o) {
    MlpConfig cfg;
    cfg.hidden_widths.clear();
    for (const auto& w : split_list(o.hidden)) {
        cfg.hidden_widths.push_back(std::stoul(w));
    }
    cfg.learning_rate = o.learning_rate;
    cfg.epochs = o.epochs;
    cfg.batch = o.batch;
    cfg.l2_first_layers = o.l2;
    cfg.patience = o.patience;
    return cfg;
}

std::shared_ptr<const Classifier> wrap(const ModelOptions& o,
                                       std::shared_ptr<const Classifier> inner) {
    if (!o.standardize) {
        return inner;
    }
    return std::make_shared<StandardizedClassifier>(std::move(inner));
}

SvmConfig base_svm(const ModelOptions& o) {
    SvmConfig cfg;
    cfg.C = o.C;
    if (o.gamma > 0.0) {
        cfg.gamma = o.gamma;
    }
    cfg.tol = o.tol;
    cfg.max_passes = o.max_passes;
    return cfg;
}

HyperSearchSpec search_spec(const ModelOptions& o, std::uint64_t seed) {
    return HyperSearchSpec{o.c_min, o.c_max, o.gamma_min, o.gamma_max, o.n_draws, o.folds, seed};
}

SvmConfig tune(const Dataset& ds, const ModelOptions& o, Metric metric, std::uint64_t seed) {
    const auto res = random_search_cv(ds, search_spec(o, seed), metric, base_svm(o));
    std::ostringstream os;
    os << "search picked C=" << res.best.C << " gamma=" << *res.best.gamma << " (mean "
       << metric_name(metric) << " " << *res.candidates[res.best_index].mean << ")";
    log_line(os.str());
    return res.best;
}

// ---------------------------------------------------------------------------
// Config files: JSON objects whose keys are long option names. They are
// spliced into argv ahead of the explicit flags, so explicit flags win.

std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App* sub) {
    auto it = std::find(args.begin(), args.end(), "--config");
    std::string path;
    if (it != args.end() && it + 1 != args.end()) {
        path = *(it + 1);
    } else {
        for (const auto& a : args) {
            if (a.rfind("--config=", 0) == 0) {
                path = a.substr(9);
            }
        }
    }
    if (path.empty()) {
        return args;
    }
    const json cfg = read_json(path);
    if (!cfg.is_object()) {
        throw config_error("config file '" + path + "' must hold a JSON object");
    }
    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || key == "config") {
            throw config_error("config file '" + path + "': unknown key '" + key + "'");
        }
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given) {
            continue;
        }
        if (value.is_boolean()) {
            if (opt->get_expected_min() == 0) {
                if (value.get<bool>()) {
                    extra.push_back(flag);
                }
                continue;
            }
            extra.push_back(flag);
            extra.emplace_back(value.get<bool>() ? "true" : "false");
        } else if (value.is_string()) {
            extra.push_back(flag);
            extra.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            extra.push_back(flag);
            extra.push_back(value.dump());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            }
            extra.push_back(flag);
            extra.push_back(joined);
        } else {
            throw config_error("config file '" + path + "': unsupported value for '" + key + "'");
        }
    }
    // Insert right after the subcommand name.
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

// ---------------------------------------------------------------------------

struct SynthOptions {
    std::size_t n = 1000;
    std::size_t d = 15;
    double alpha = -8.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_synth(const SynthOptions& o) {
    const Dataset ds = generate_synthetic(o.n, o.d, o.alpha, o.seed);
    std::ostringstream os;
    write_csv(os, ds);
    if (o.out.empty() || o.out == "-") {
        std::cout << os.str();
    } else {
        write_text(o.out, os.str());
        log_line("wrote " + std::to_string(ds.size()) + " rows (" +
                 std::to_string(ds.count_positive()) + " positive) to " + o.out);
    }
    return 0;
}

struct RankOptions {
    std::string data;
    std::string label_col = "label";
    std::size_t q = 7;
    double tau = 9e-2;
    double validation_fraction = 0.3;
    std::string metric = "tss";
    std::size_t max_features = 0;
    bool fixed_splits = false;
    std::uint64_t seed = 0;
    std::size_t workers = default_workers();
    std::string out;
    std::string config;
    ModelOptions model;
};

struct RankResult {
    GreedyTrace trace;
    json document;
    std::string table;
};

int cmd_rank(const RankOptions& o) {
    const Dataset ds = load_csv(o.data, o.label_col);
    ds.require_both_classes("rank");
    GreedyConfig cfg;
    cfg.q = o.q;
    cfg.tau = o.tau;
    cfg.validation_fraction = o.validation_fraction;
    cfg.metric = parse_metric(o.metric);
    cfg.max_features = o.max_features;
    cfg.fixed_splits = o.fixed_splits;
    cfg.seed = o.seed;
    cfg.workers = std::max<std::size_t>(1, o.workers);
    cfg.validate(ds.dims());

    const std::uint64_t search_seed = substream(o.seed, "search");
    ClassifierSource source;
    json classifier_json;
    std::shared_ptr<const Classifier> fixed;
    if (o.model.classifier == "mlp") {
        fixed = wrap(o.model, std::make_shared<MlpClassifier>(mlp_config(o.model)));
    } else if (o.model.search == "none") {
        fixed = wrap(o.model, std::make_shared<SvmClassifier>(base_svm(o.model)));
    } else if (o.model.search == "once") {
        fixed = wrap(o.model, std::make_shared<SvmClassifier>(tune(ds, o.model, cfg.metric,
                                                                   search_seed)));
    } else {
        const ModelOptions mo = o.model;
        const Metric metric = cfg.metric;
        source = [&ds, mo, metric, search_seed](std::size_t step,
                                                std::span<const std::size_t> selected) {
            const Dataset view = selected.empty() ? ds : project_features(ds, selected);
            const SvmConfig tuned = tune(view, mo, metric, substream(search_seed, step));
            return wrap(mo, std::make_shared<SvmClassifier>(tuned));
        };
        classifier_json = json{{"kind", "svm"},
                               {"search", "per-step"},
                               {"standardize", mo.standardize},
                               {"n_draws", mo.n_draws},
                               {"folds", mo.folds}};
    }
    if (fixed) {
        classifier_json = fixed->config_json();
        classifier_json["descriptor"] = fixed->descriptor();
        classifier_json["search"] = o.model.classifier == "svm" ? o.model.search : "none";
        source = [fixed](std::size_t, std::span<const std::size_t>) { return fixed; };
    }

    const auto t0 = std::chrono::steady_clock::now();
    const GreedyTrace trace = run_greedy(ds, cfg, source);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log_line("greedy finished after " + std::to_string(trace.steps.size()) + " steps in " +
             std::to_string(secs) + " s");

    const json doc = trace_to_json(trace, cfg, ds.names, classifier_json);
    const std::string table = format_trace_table(trace, ds.names, cfg.metric);
    std::cout << table;

    if (!o.out.empty()) {
        const fs::path dir(o.out);
        write_text(dir / "trace.json", doc.dump(2) + "\n");
        write_text(dir / "ranking.txt", table);
        // Final model on the selected prefix, reusable by `eval`.
        const auto sel = trace.selected();
        const Dataset view = project_features(ds, sel);
        const auto classifier = source(trace.steps.size() + 1, sel);
        const auto model = classifier->fit(view, substream(o.seed, "final"));
        json model_doc{{"features", view.names}, {"model", model->to_json()}};
        write_text(dir / "model.json", model_doc.dump() + "\n");
        log_line("wrote trace.json, ranking.txt and model.json to " + dir.string());
    }
    return 0;
}

struct EvalOptions {
    std::string model;
    std::string data;
    std::string label_col = "label";
    std::size_t splits = 5;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_eval(const EvalOptions& o) {
    const json doc = read_json(o.model);
    const auto model = model_from_json(doc.at("model"));
    Dataset ds = load_csv(o.data, o.label_col);
    if (doc.contains("features")) {
        std::vector<std::size_t> keep;
        for (const auto& name : doc.at("features").get<std::vector<std::string>>()) {
            const auto it = std::find(ds.names.begin(), ds.names.end(), name);
            if (it == ds.names.end()) {
                throw data_error("evaluation data lacks model feature '" + name + "'");
            }
            keep.push_back(static_cast<std::size_t>(it - ds.names.begin()));
        }
        ds = project_features(ds, keep);
    }
    if (o.splits < 1) {
        throw config_error("eval needs --splits >= 1");
    }
    std::vector<std::vector<std::size_t>> parts;
    if (o.splits == 1) {
        std::vector<std::size_t> all(ds.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        parts.push_back(all);
    } else {
        for (const auto& f : make_folds(ds.y, o.splits, substream(o.seed, "eval"))) {
            parts.push_back(f.valid_idx);
        }
    }
    std::map<std::string, std::vector<double>> per_score;
    json per_split = json::array();
    for (const auto& part : parts) {
        const Dataset sub = select_rows(ds, part);
        const ScoreReport rep = score_suite(confusion(model->predict(sub.X), sub.y));
        const json rj = to_json(rep);
        per_split.push_back(rj);
        for (const auto& [name, v] : rj.items()) {
            if (!v.is_null()) {
                per_score[name].push_back(v.get<double>());
            }
        }
    }
    json scores = json::object();
    std::ostringstream table;
    for (Metric m : kAllMetrics) {
        const std::string name(metric_name(m));
        const auto& vals = per_score[name];
        if (vals.empty()) {
            scores[name] = {{"mean", nullptr}, {"std", nullptr}, {"defined_splits", 0}};
            table << name << "  undefined\n";
            continue;
        }
        double mean = 0.0;
        for (double v : vals) {
            mean += v;
        }
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) {
            var += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(var / static_cast<double>(vals.size()));
        scores[name] = {{"mean", mean}, {"std", sd}, {"defined_splits", vals.size()}};
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-18s %.3f ± %.3f\n", name.c_str(), mean, sd);
        table << buf;
    }
    const json report{{"model", model->descriptor()},
                      {"splits", parts.size()},
                      {"seed", o.seed},
                      {"scores", scores},
                      {"per_split", per_split}};
    std::cout << table.str();
    if (!o.out.empty()) {
        write_text(fs::path(o.out) / "scores.json", report.dump(2) + "\n");
    } else {
        std::cout << report.dump(2) << '\n';
    }
    return 0;
}

struct AlignOptions {
    std::string data;
    std::string label_col = "label";
    std::string order;
    std::string trace;
    double gamma = 0.1;
    bool standardize = false;
    std::string out;
};

int cmd_align(const AlignOptions& o) {
    Dataset ds = load_csv(o.data, o.label_col);
    if (o.standardize) {
        ds = standardize(ds).train;
    }
    std::vector<std::size_t> order;
    auto index_of = [&](const std::string& name) {
        const auto it = std::find(ds.names.begin(), ds.names.end(), name);
        if (it == ds.names.end()) {
            throw config_error("unknown feature '" + name + "'");
        }
        return static_cast<std::size_t>(it - ds.names.begin());
    };
    if (!o.trace.empty()) {
        const json t = read_json(o.trace);
        for (const auto& step : t.at("steps")) {
            order.push_back(index_of(step.at("name").get<std::string>()));
        }
    } else if (!o.order.empty()) {
        for (const auto& name : split_list(o.order)) {
            order.push_back(index_of(name));
        }
    } else {
        for (std::size_t j = 0; j < ds.dims(); ++j) {
            order.push_back(j);
        }
    }
    const auto points = alignment_trace(ds, order, o.gamma);
    std::ostringstream os;
    write_alignment_csv(os, points);
    if (o.out.empty()) {
        std::cout << os.str();
    } else {
        write_text(fs::path(o.out) / "alignment.csv", os.str());
        log_line("wrote " + std::to_string(points.size()) + " prefixes to " +
                 (fs::path(o.out) / "alignment.csv").string());
    }
    return 0;
}

struct VcOptions {
    std::size_t dim = 2;
    std::vector<std::size_t> blind;
    std::size_t trials = 50;
    std::size_t s_max = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_vc(const VcOptions& o) {
    BlindSet blind;
    for (std::size_t b : o.blind) {
        if (b < 1 || b > o.dim) {
            throw config_error("--blind entries are 1-based coordinates in [1, " +
                               std::to_string(o.dim) + "]");
        }
        blind.insert(b - 1);
    }
    const VcEstimate est = empirical_vc(o.dim, blind, o.trials, o.s_max, o.seed);
    std::vector<std::size_t> blind_1;
    for (std::size_t b : blind) {
        blind_1.push_back(b + 1);
    }
    const json report{{"dim", o.dim},
                      {"blind", blind_1},
                      {"trials", o.trials},
                      {"seed", o.seed},
                      {"vc_lower_bound", est.vc},
                      {"first_unshattered_size",
                       est.first_failed_size ? json(est.first_failed_size) : json(nullptr)},
                      {"witness", est.witness.points}};
    std::cout << "empirical VC >= " << est.vc;
    if (est.first_failed_size) {
        std::cout << " (no shattered set of size " << est.first_failed_size << " found in budget)";
    }
    std::cout << "\nwitness:";
    for (const auto& p : est.witness.points) {
        std::cout << " (";
        for (std::size_t j = 0; j < p.size(); ++j) {
            std::cout << (j ? "," : "") << p[j];
        }
        std::cout << ")";
    }
    std::cout << '\n';
    if (!o.out.empty()) {
        write_text(fs::path(o.out) / "vc.json", report.dump(2) + "\n");
    }
    return 0;
}

struct SweepOptions {
    std::vector<double> alphas{-8.0, -6.0, -4.0, -2.0};
    std::size_t n = 1000;
    std::size_t d = 15;
    std::uint64_t seed = 0;
    std::string out = "sweep";
    RankOptions rank;
};

int cmd_sweep(SweepOptions o) {
    // One synthetic dataset and one ranking per alpha.
    for (double alpha : o.alphas) {
        std::ostringstream tag;
        tag << "alpha_" << alpha;
        const fs::path dir = fs::path(o.out) / tag.str();
        const fs::path csv = dir / "data.csv";
        // The same sample is reused for every alpha; only the tail weight changes.
        SynthOptions so{o.n, o.d, alpha, o.seed, csv.string()};
        cmd_synth(so);
        RankOptions ro = o.rank;
        ro.data = csv.string();
        ro.seed = o.seed;
        ro.out = dir.string();
        std::cout << "alpha = " << alpha << '\n';
        cmd_rank(ro);
    }
    return 0;
}

void add_rank_options(CLI::App* sub, RankOptions& o, bool with_data) {
    if (with_data) {
        sub->add_option("--data", o.data, "Input CSV with a header row")->required();
        sub->add_option("--label-col", o.label_col, "Name of the label column");
        sub->add_option("--out", o.out, "Output directory for trace.json, ranking.txt, model.json");
        sub->add_option("--seed", o.seed, "Root seed")->required();
    }
    sub->add_option("--q", o.q, "Train/validation splits per candidate (>= 2)");
    sub->add_option("--tau", o.tau, "Stopping threshold");
    sub->add_option("--validation-fraction", o.validation_fraction,
                    "Share of rows held out in each split");
    sub->add_option("--metric", o.metric, "Selection score (tss, hss, f1, ...)");
    sub->add_option("--max-features", o.max_features, "Stop after this many steps (0: no cap)");
    sub->add_flag("--fixed-splits", o.fixed_splits, "Reuse the same splits at every step");
    sub->add_option("--workers", o.workers, "Threads for candidate evaluation");
    add_model_options(sub, o.model);
}

int dispatch(const std::vector<std::string>& raw_args) {
    CLI::App app{"Classifier-dependent greedy feature ranking with kernel and VC diagnostics",
                 "fsel"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    std::string config_path;

    SynthOptions synth;
    auto* s_synth = app.add_subcommand("synth", "Generate the synthetic benchmark as CSV");
    s_synth->add_option("--n", synth.n, "Number of examples");
    s_synth->add_option("--d", synth.d, "Number of features (>= 7)");
    s_synth->add_option("--alpha", synth.alpha, "Exponent of the tail-feature weight 10^alpha");
    s_synth->add_option("--seed", synth.seed, "Generator seed")->required();
    s_synth->add_option("--out", synth.out, "Output CSV path (stdout when omitted)");

    RankOptions rank;
    auto* s_rank = app.add_subcommand("rank", "Greedy feature ranking with the stopping rule");
    add_rank_options(s_rank, rank, true);

    EvalOptions eval;
    auto* s_eval = app.add_subcommand("eval", "Score a saved model on splits of a test set");
    s_eval->add_option("--model", eval.model, "model.json written by rank")->required();
    s_eval->add_option("--data", eval.data, "Test CSV")->required();
    s_eval->add_option("--label-col", eval.label_col, "Name of the label column");
    s_eval->add_option("--splits", eval.splits, "Number of disjoint stratified test parts");
    s_eval->add_option("--seed", eval.seed, "Seed for the test partition")->required();
    s_eval->add_option("--out", eval.out, "Output directory for scores.json");

    AlignOptions align;
    auto* s_align = app.add_subcommand("align", "Kernel norm and target alignment per prefix");
    s_align->add_option("--data", align.data, "Input CSV")->required();
    s_align->add_option("--label-col", align.label_col, "Name of the label column");
    s_align->add_option("--order", align.order, "Comma-separated feature names");
    s_align->add_option("--trace", align.trace, "Take the order from a rank trace.json");
    s_align->add_option("--gamma", align.gamma, "Gaussian kernel scale");
    s_align->add_flag("--standardize", align.standardize, "Standardize features first");
    s_align->add_option("--out", align.out, "Output directory for alignment.csv");

    VcOptions vc;
    auto* s_vc = app.add_subcommand("vc", "Empirical VC dimension of blind affine classifiers");
    s_vc->add_option("--dim", vc.dim, "Ambient dimension");
    s_vc->add_option("--blind", vc.blind, "1-based blind coordinates")->delimiter(',');
    s_vc->add_option("--trials", vc.trials, "Random point sets per size");
    s_vc->add_option("--s-max", vc.s_max, "Largest set size to try (0: 2(dim+2))");
    s_vc->add_option("--seed", vc.seed, "Seed for the random point sets")->required();
    s_vc->add_option("--out", vc.out, "Output directory for vc.json");

    SweepOptions t1;
    auto* s_t1 = app.add_subcommand("sweep", "synth + rank for several alphas on one sample");
    s_t1->add_option("--alphas", t1.alphas, "Comma-separated alphas")->delimiter(',');
    s_t1->add_option("--n", t1.n, "Examples per dataset");
    s_t1->add_option("--d", t1.d, "Features per dataset");
    s_t1->add_option("--seed", t1.seed, "Root seed")->required();
    s_t1->add_option("--out", t1.out, "Output directory");
    add_rank_options(s_t1, t1.rank, false);

    for (auto* sub : {s_synth, s_rank, s_eval, s_align, s_vc, s_t1}) {
        sub->add_option("--config", config_path, "JSON file of option values; flags override it");
    }

    std::vector<std::string> args = raw_args;
    if (args.size() >= 2) {
        if (auto* sub = app.get_subcommand_no_throw(args[1])) {
            args = merge_config(args, sub);
        }
    }
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (s_synth->parsed()) {
        return cmd_synth(synth);
    }
    if (s_rank->parsed()) {
        return cmd_rank(rank);
    }
    if (s_eval->parsed()) {
        return cmd_eval(eval);
    }
    if (s_align->parsed()) {
        return cmd_align(align);
    }
    if (s_vc->parsed()) {
        return cmd_vc(vc);
    }
    if (s_t1->parsed()) {
        t1.rank.seed = t1.seed;
        return cmd_sweep(t1);
    }
    return 1;
}

}  // namespace

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        return dispatch(args);
    } catch (const Error& e) {
        std::cerr << "fsel: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::config: return 1;
            case ErrorKind::data: return 2;
            case ErrorKind::numerical: return 3;
        }
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "fsel: malformed document: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fsel: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace fsel::cli
