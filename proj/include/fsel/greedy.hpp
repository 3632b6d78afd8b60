#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/metrics.hpp"
#include "fsel/models.hpp"
#include "json.hpp"

namespace fsel {

struct GreedyConfig {
    /// Train/validation splits scored per candidate; at least 2 so that the
    /// stopping rule has a standard deviation to work with.
    std::size_t q = 7;
    double validation_fraction = 0.3;
    double tau = 9e-2;
    Metric metric = Metric::tss;
    /// Hard cap on ranked features; 0 means all of them.
    std::size_t max_features = 0;
    std::uint64_t seed = 0;
    bool stratified = true;
    /// Reuse the step-1 splits at every step instead of redrawing them.
    bool fixed_splits = false;
    std::size_t workers = 1;

    void validate(std::size_t d) const;
};

nlohmann::json to_json(const GreedyConfig& cfg);

struct CandidateScore {
    std::size_t feature = 0;
    /// One entry per split; empty where the metric was undefined or the fit failed.
    std::vector<Score> split_scores;
    std::size_t undefined_splits = 0;
    std::size_t failed_splits = 0;
    /// Mean and population std over the defined splits.
    Score mean;
    double stddev = 0.0;
};

struct StepRecord {
    std::size_t step = 0;  // 1-based
    std::size_t chosen = 0;
    std::vector<CandidateScore> candidates;
    double mean = 0.0;
    double stddev = 0.0;
};

enum class StopReason { threshold, exhausted, cap };

std::string_view stop_reason_name(StopReason r);

struct GreedyTrace {
    std::vector<StepRecord> steps;
    StopReason stop_reason = StopReason::exhausted;
    std::size_t k_star = 0;

    /// Features chosen in steps 1..k_star, in selection order.
    std::vector<std::size_t> selected() const;
    /// Chosen feature of every recorded step, in order.
    std::vector<std::size_t> ranking() const;
};

/// Scores every feature outside `selected` by training on selected + {p}
/// over all `splits`. Split h always uses model seed substream(model_seed, h),
/// so candidates are compared on identical data and initializations. The
/// winner has the largest mean; ties go to the smallest feature index.
StepRecord greedy_step(const Dataset& ds, std::span<const std::size_t> selected,
                       const Classifier& classifier, std::span<const Split> splits, Metric metric,
                       std::uint64_t model_seed, std::size_t workers = 1);

/// |m_next - m| / sqrt(s^2 + s_next^2) < tau. When both deviations are zero
/// the rule stops only if the means are equal.
bool should_stop(double m, double s, double m_next, double s_next, double tau);

/// 1-based index of the largest mean; ties go to the earliest step.
std::size_t select_k_star(std::span<const double> means);
std::size_t select_k_star(std::span<const StepRecord> steps);

/// Supplies the classifier for a given step (1-based) and current prefix;
/// used when hyperparameters are re-tuned during the run.
using ClassifierSource = std::function<std::shared_ptr<const Classifier>(
    std::size_t step, std::span<const std::size_t> selected)>;

GreedyTrace run_greedy(const Dataset& ds, const GreedyConfig& cfg, const Classifier& classifier);
GreedyTrace run_greedy(const Dataset& ds, const GreedyConfig& cfg, const ClassifierSource& source);

/// Full trace document: config echo, classifier, per-step candidate tables,
/// stop reason, k* and the selected features.
nlohmann::json trace_to_json(const GreedyTrace& trace, const GreedyConfig& cfg,
                             const std::vector<std::string>& names,
                             const nlohmann::json& classifier_config);

/// Plain-text ranking: one row per step with "mean ± std", and a rule under
/// the last selected step.
std::string format_trace_table(const GreedyTrace& trace, const std::vector<std::string>& names,
                               Metric metric);

}  // namespace fsel
