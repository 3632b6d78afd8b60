#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace fsel {

/// 2x2 contingency table with +1 as the positive class.
struct ConfusionCounts {
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tp = 0;

    std::uint64_t total() const noexcept { return tn + fp + fn + tp; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth);

/// A score that is empty when its formula divides by zero.
using Score = std::optional<double>;

Score recall(const ConfusionCounts& c);
Score specificity(const ConfusionCounts& c);
Score precision(const ConfusionCounts& c);
/// True Skill Statistic: recall + specificity - 1.
Score tss(const ConfusionCounts& c);
/// Heidke Skill Score, 2(tp tn - fp fn) / ((tp+fn)(fn+tn) + (tp+fp)(fp+tn)).
Score hss(const ConfusionCounts& c);
Score f1(const ConfusionCounts& c);
Score balanced_accuracy(const ConfusionCounts& c);

struct ScoreReport {
    Score tss;
    Score hss;
    Score precision;
    Score recall;
    Score specificity;
    Score f1;
    Score balanced_accuracy;
};

ScoreReport score_suite(const ConfusionCounts& c);

/// Flat object keyed by score name; undefined scores become null.
nlohmann::json to_json(const ScoreReport& r);

enum class Metric { tss, hss, precision, recall, specificity, f1, balanced_accuracy };

inline constexpr Metric kAllMetrics[] = {Metric::tss,         Metric::hss, Metric::precision,
                                         Metric::recall,      Metric::specificity,
                                         Metric::f1,          Metric::balanced_accuracy};

std::string_view metric_name(Metric m);
/// Accepts the names produced by metric_name(); throws a config error otherwise.
Metric parse_metric(std::string_view name);
Score evaluate(Metric m, const ConfusionCounts& c);

}  // namespace fsel
