#include "fsel/metrics.hpp"

#include <string>

#include "fsel/error.hpp"

namespace fsel {

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw data_error("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(truth.size()) + " labels");
    }
    if (truth.empty()) {
        throw data_error("confusion: empty label vectors");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int p = predicted[i];
        const int t = truth[i];
        if ((p != 1 && p != -1) || (t != 1 && t != -1)) {
            throw data_error("confusion: label at position " + std::to_string(i) +
                             " is not -1 or +1");
        }
        if (t == 1) {
            (p == 1 ? c.tp : c.fn) += 1;
        } else {
            (p == 1 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

namespace {

Score ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Score recall(const ConfusionCounts& c) { return ratio(c.tp, c.fn + c.tp); }

Score specificity(const ConfusionCounts& c) { return ratio(c.tn, c.fp + c.tn); }

Score precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

Score tss(const ConfusionCounts& c) {
    const Score r = recall(c);
    const Score s = specificity(c);
    if (!r || !s) {
        return std::nullopt;
    }
    return *r + *s - 1.0;
}

Score hss(const ConfusionCounts& c) {
    const double tp = static_cast<double>(c.tp);
    const double tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double den = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn);
    if (den == 0.0) {
        return std::nullopt;
    }
    return 2.0 * (tp * tn - fp * fn) / den;
}

Score f1(const ConfusionCounts& c) {
    if (!precision(c) || !recall(c)) {
        return std::nullopt;
    }
    if (c.tp == 0) {
        return 0.0;
    }
    // 2PR/(P+R) written in counts.
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

Score balanced_accuracy(const ConfusionCounts& c) {
    const Score r = recall(c);
    const Score s = specificity(c);
    if (!r || !s) {
        return std::nullopt;
    }
    return 0.5 * (*r + *s);
}

ScoreReport score_suite(const ConfusionCounts& c) {
    return ScoreReport{tss(c), hss(c), precision(c), recall(c), specificity(c), f1(c),
                       balanced_accuracy(c)};
}

nlohmann::json to_json(const ScoreReport& r) {
    auto put = [](const Score& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
    return nlohmann::json{{"tss", put(r.tss)},
                          {"hss", put(r.hss)},
                          {"precision", put(r.precision)},
                          {"recall", put(r.recall)},
                          {"specificity", put(r.specificity)},
                          {"f1", put(r.f1)},
                          {"balanced_accuracy", put(r.balanced_accuracy)}};
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::tss: return "tss";
        case Metric::hss: return "hss";
        case Metric::precision: return "precision";
        case Metric::recall: return "recall";
        case Metric::specificity: return "specificity";
        case Metric::f1: return "f1";
        case Metric::balanced_accuracy: return "balanced_accuracy";
    }
    return "unknown";
}

Metric parse_metric(std::string_view name) {
    for (Metric m : kAllMetrics) {
        if (metric_name(m) == name) {
            return m;
        }
    }
    throw config_error("unknown metric '" + std::string(name) + "'");
}

Score evaluate(Metric m, const ConfusionCounts& c) {
    switch (m) {
        case Metric::tss: return tss(c);
        case Metric::hss: return hss(c);
        case Metric::precision: return precision(c);
        case Metric::recall: return recall(c);
        case Metric::specificity: return specificity(c);
        case Metric::f1: return f1(c);
        case Metric::balanced_accuracy: return balanced_accuracy(c);
    }
    return std::nullopt;
}

}  // namespace fsel
