#include "fsel/greedy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

void GreedyConfig::validate(std::size_t d) const {
    if (q < 2) {
        throw config_error("greedy: q must be >= 2 (the stopping rule needs a standard deviation)");
    }
    if (!(tau > 0.0)) {
        throw config_error("greedy: tau must be positive");
    }
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw config_error("greedy: validation fraction must lie in (0,1)");
    }
    if (d < 2) {
        throw config_error("greedy: need at least 2 features, got " + std::to_string(d));
    }
    if (max_features > d) {
        throw config_error("greedy: max_features exceeds the feature count");
    }
}

nlohmann::json to_json(const GreedyConfig& cfg) {
    return nlohmann::json{{"q", cfg.q},
                          {"validation_fraction", cfg.validation_fraction},
                          {"tau", cfg.tau},
                          {"metric", metric_name(cfg.metric)},
                          {"max_features", cfg.max_features},
                          {"seed", cfg.seed},
                          {"stratified", cfg.stratified},
                          {"fixed_splits", cfg.fixed_splits}};
}

std::string_view stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::threshold: return "threshold";
        case StopReason::exhausted: return "exhausted";
        case StopReason::cap: return "cap";
    }
    return "unknown";
}

std::vector<std::size_t> GreedyTrace::selected() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < k_star && k < steps.size(); ++k) {
        out.push_back(steps[k].chosen);
    }
    return out;
}

std::vector<std::size_t> GreedyTrace::ranking() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) {
        out.push_back(s.chosen);
    }
    return out;
}

namespace {

Dataset gather(const Dataset& ds, std::span<const std::size_t> rows,
               std::span<const std::size_t> cols) {
    Dataset out;
    out.X = Matrix(rows.size(), cols.size());
    out.y.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out.X(r, c) = ds.X(rows[r], cols[c]);
        }
        out.y.push_back(ds.y[rows[r]]);
    }
    for (std::size_t c : cols) {
        out.names.push_back(ds.names[c]);
    }
    return out;
}

CandidateScore score_candidate(const Dataset& ds, std::span<const std::size_t> cols,
                               const Classifier& classifier, std::span<const Split> splits,
                               Metric metric, std::uint64_t model_seed) {
    CandidateScore cs;
    cs.feature = cols.back();
    for (std::size_t h = 0; h < splits.size(); ++h) {
        Score s;
        try {
            const Dataset train = gather(ds, splits[h].train_idx, cols);
            const Dataset valid = gather(ds, splits[h].valid_idx, cols);
            const auto model = classifier.fit(train, substream(model_seed, h));
            s = evaluate(metric, confusion(model->predict(valid.X), valid.y));
            if (!s) {
                ++cs.undefined_splits;
            }
        } catch (const Error&) {
            ++cs.failed_splits;
        }
        cs.split_scores.push_back(s);
    }
    double sum = 0.0;
    std::size_t defined = 0;
    for (const Score& s : cs.split_scores) {
        if (s) {
            sum += *s;
            ++defined;
        }
    }
    if (defined > 0) {
        const double mean = sum / static_cast<double>(defined);
        double var = 0.0;
        for (const Score& s : cs.split_scores) {
            if (s) {
                var += (*s - mean) * (*s - mean);
            }
        }
        cs.mean = mean;
        cs.stddev = std::sqrt(var / static_cast<double>(defined));
    }
    return cs;
}

}  // namespace

StepRecord greedy_step(const Dataset& ds, std::span<const std::size_t> selected,
                       const Classifier& classifier, std::span<const Split> splits, Metric metric,
                       std::uint64_t model_seed, std::size_t workers) {
    std::vector<bool> used(ds.dims(), false);
    for (std::size_t f : selected) {
        if (f >= ds.dims() || used[f]) {
            throw config_error("greedy step: selected features must be distinct and in range");
        }
        used[f] = true;
    }
    std::vector<std::size_t> remaining;
    for (std::size_t f = 0; f < ds.dims(); ++f) {
        if (!used[f]) {
            remaining.push_back(f);
        }
    }
    if (remaining.empty()) {
        throw config_error("greedy step: no candidate features left");
    }

    std::vector<CandidateScore> table(remaining.size());
    auto evaluate_one = [&](std::size_t c) {
        std::vector<std::size_t> cols(selected.begin(), selected.end());
        cols.push_back(remaining[c]);
        table[c] = score_candidate(ds, cols, classifier, splits, metric, model_seed);
    };

    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, remaining.size());
    if (n_threads == 1) {
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            evaluate_one(c);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < remaining.size(); c = next++) {
                    try {
                        evaluate_one(c);
                    } catch (...) {
                        if (!failed.exchange(true)) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    StepRecord rec;
    rec.step = selected.size() + 1;
    bool found = false;
    for (const auto& cs : table) {
        // Candidates are in ascending feature order, so strict > keeps the
        // smallest index on ties.
        if (cs.mean && (!found || *cs.mean > rec.mean)) {
            found = true;
            rec.chosen = cs.feature;
            rec.mean = *cs.mean;
            rec.stddev = cs.stddev;
        }
    }
    if (!found) {
        throw numerical_error("greedy step " + std::to_string(rec.step) +
                              ": the metric is undefined for every candidate on every split");
    }
    rec.candidates = std::move(table);
    return rec;
}

bool should_stop(double m, double s, double m_next, double s_next, double tau) {
    const double spread = std::sqrt(s * s + s_next * s_next);
    if (spread == 0.0) {
        return m == m_next;
    }
    return std::abs(m_next - m) / spread < tau;
}

std::size_t select_k_star(std::span<const double> means) {
    if (means.empty()) {
        throw config_error("k* is undefined for an empty trace");
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < means.size(); ++j) {
        if (means[j] > means[best]) {
            best = j;
        }
    }
    return best + 1;
}

std::size_t select_k_star(std::span<const StepRecord> steps) {
    std::vector<double> means;
    for (const auto& s : steps) {
        means.push_back(s.mean);
    }
    return select_k_star(means);
}

GreedyTrace run_greedy(const Dataset& ds, const GreedyConfig& cfg, const Classifier& classifier) {
    // Non-owning handle; the caller keeps `classifier` alive for the run.
    const std::shared_ptr<const Classifier> fixed(&classifier, [](const Classifier*) {});
    return run_greedy(ds, cfg,
                      ClassifierSource([fixed](std::size_t, std::span<const std::size_t>) {
                          return fixed;
                      }));
}

GreedyTrace run_greedy(const Dataset& ds, const GreedyConfig& cfg, const ClassifierSource& source) {
    ds.require_both_classes("greedy");
    cfg.validate(ds.dims());
    const std::size_t cap = cfg.max_features == 0 ? ds.dims() : cfg.max_features;
    const std::uint64_t split_root = substream(cfg.seed, "split");
    const std::uint64_t model_root = substream(cfg.seed, "model");

    GreedyTrace trace;
    std::vector<std::size_t> selected;
    while (true) {
        const std::size_t k = selected.size() + 1;
        const SplitPlan plan{cfg.q, cfg.validation_fraction,
                             substream(split_root, cfg.fixed_splits ? 1 : k), cfg.stratified};
        const auto splits = make_splits(ds.size(), ds.y, plan);
        const auto classifier = source(k, selected);
        StepRecord rec = greedy_step(ds, selected, *classifier, splits, cfg.metric,
                                     substream(model_root, k), cfg.workers);
        selected.push_back(rec.chosen);
        trace.steps.push_back(std::move(rec));

        if (k >= 2) {
            const auto& prev = trace.steps[k - 2];
            const auto& cur = trace.steps[k - 1];
            if (should_stop(prev.mean, prev.stddev, cur.mean, cur.stddev, cfg.tau)) {
                trace.stop_reason = StopReason::threshold;
                break;
            }
        }
        if (selected.size() == ds.dims()) {
            trace.stop_reason = StopReason::exhausted;
            break;
        }
        if (selected.size() >= cap) {
            trace.stop_reason = StopReason::cap;
            break;
        }
    }
    trace.k_star = select_k_star(trace.steps);
    return trace;
}

namespace {

nlohmann::json score_json(const Score& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json trace_to_json(const GreedyTrace& trace, const GreedyConfig& cfg,
                             const std::vector<std::string>& names,
                             const nlohmann::json& classifier_config) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json table = nlohmann::json::array();
        for (const auto& c : s.candidates) {
            nlohmann::json scores = nlohmann::json::array();
            for (const auto& v : c.split_scores) {
                scores.push_back(score_json(v));
            }
            table.push_back({{"feature", c.feature},
                             {"name", names[c.feature]},
                             {"scores", scores},
                             {"mean", score_json(c.mean)},
                             {"std", c.stddev},
                             {"undefined_splits", c.undefined_splits},
                             {"failed_splits", c.failed_splits}});
        }
        steps.push_back({{"step", s.step},
                         {"feature", s.chosen},
                         {"name", names[s.chosen]},
                         {"mean", s.mean},
                         {"std", s.stddev},
                         {"candidates", table}});
    }
    const auto sel = trace.selected();
    std::vector<std::string> sel_names;
    for (std::size_t f : sel) {
        sel_names.push_back(names[f]);
    }
    return nlohmann::json{{"config", to_json(cfg)},
                          {"classifier", classifier_config},
                          {"seed", cfg.seed},
                          {"features", names},
                          {"steps", steps},
                          {"stop_reason", stop_reason_name(trace.stop_reason)},
                          {"k_star", trace.k_star},
                          {"selected", sel},
                          {"selected_names", sel_names}};
}

std::string format_trace_table(const GreedyTrace& trace, const std::vector<std::string>& names,
                               Metric metric) {
    std::ostringstream os;
    std::string header(metric_name(metric));
    std::transform(header.begin(), header.end(), header.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    std::size_t width = 9;
    for (const auto& s : trace.steps) {
        width = std::max(width, names[s.chosen].size() + 2);
    }
    char buf[64];
    os << "step  " << "feature" << std::string(width - 7, ' ') << header << '\n';
    for (const auto& s : trace.steps) {
        std::snprintf(buf, sizeof buf, "%-6zu", s.step);
        os << buf << names[s.chosen] << std::string(width - names[s.chosen].size(), ' ');
        std::snprintf(buf, sizeof buf, "%.3f ± %.3f", s.mean, s.stddev);
        os << buf << '\n';
        if (s.step == trace.k_star) {
            os << std::string(6 + width + 13, '-') << '\n';
        }
    }
    os << "stop: " << stop_reason_name(trace.stop_reason) << ", k* = " << trace.k_star << '\n';
    return os.str();
}

}  // namespace fsel
