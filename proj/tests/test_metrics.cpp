#include <cmath>

#include "doctest.h"
#include "fsel/error.hpp"
#include "fsel/matrix.hpp"
#include "fsel/metrics.hpp"
#include "fsel/rng.hpp"
#include "json.hpp"

using namespace fsel;

namespace {

constexpr double kExact = 1e-12;

bool near(Score s, double v) { return s.has_value() && std::abs(*s - v) <= kExact; }

}  // namespace

TEST_CASE("confusion counts") {
    CHECK(confusion(Labels{1, -1}, Labels{1, -1}) == ConfusionCounts{1, 0, 0, 1});
    CHECK(confusion(Labels{1, 1}, Labels{-1, -1}) == ConfusionCounts{0, 2, 0, 0});
    CHECK(confusion(Labels{1, -1, -1, 1}, Labels{1, 1, -1, -1}) == ConfusionCounts{1, 1, 1, 1});
    CHECK_THROWS_AS(confusion(Labels{1}, Labels{1, 1}), Error);
    CHECK_THROWS_AS(confusion(Labels{0}, Labels{1}), Error);
    CHECK_THROWS_AS(confusion(Labels{}, Labels{}), Error);
}

TEST_CASE("tss examples") {
    CHECK(near(tss({1, 0, 0, 1}), 1.0));
    CHECK(near(tss({50, 50, 25, 25}), 0.0));
    CHECK(near(tss({90, 10, 5, 20}), 0.7));
    CHECK(near(recall({90, 10, 5, 20}), 0.8));
    CHECK(near(specificity({90, 10, 5, 20}), 0.9));
}

TEST_CASE("score suite examples") {
    const ScoreReport one = score_suite({1, 0, 0, 1});
    for (Score s : {one.tss, one.hss, one.precision, one.recall, one.specificity, one.f1,
                    one.balanced_accuracy}) {
        CHECK(near(s, 1.0));
    }
    const ScoreReport r = score_suite({90, 10, 5, 20});
    CHECK(near(r.precision, 20.0 / 30.0));
    CHECK(near(r.f1, 2.0 * (2.0 / 3.0) * 0.8 / (2.0 / 3.0 + 0.8)));
    CHECK(near(r.balanced_accuracy, 0.85));
    CHECK(near(r.hss, 2.0 * (1800.0 - 50.0) / (25.0 * 95.0 + 30.0 * 100.0)));
    CHECK(std::abs(*r.hss - 0.6512) < 5e-5);
    CHECK(std::abs(*r.f1 - 0.7273) < 5e-5);

    const ScoreReport edge = score_suite({0, 0, 0, 5});
    CHECK(near(edge.recall, 1.0));
    CHECK_FALSE(edge.specificity.has_value());
    CHECK_FALSE(edge.tss.has_value());
    const auto j = to_json(edge);
    CHECK(j.at("specificity").is_null());
    CHECK(j.at("tss").is_null());
    CHECK(j.at("recall").get<double>() == 1.0);
}

TEST_CASE("tss identity on random tables") {
    CounterRng rng(2024);
    int checked = 0;
    for (int t = 0; t < 10000; ++t) {
        ConfusionCounts c{rng.below(60), rng.below(60), rng.below(60), rng.below(60)};
        if (c.total() == 0) {
            c.tp = 1;
        }
        const Score r = recall(c);
        const Score s = specificity(c);
        const Score v = tss(c);
        if (r && s) {
            REQUIRE(v.has_value());
            REQUIRE(std::abs(*v - (*r + *s - 1.0)) <= kExact);
            ++checked;
        } else {
            REQUIRE_FALSE(v.has_value());
        }
    }
    CHECK(checked > 9000);
}

TEST_CASE("hss agrees with the chance-corrected accuracy form") {
    // HSS = (correct - expected correct) / (total - expected correct).
    CounterRng rng(77);
    for (int t = 0; t < 2000; ++t) {
        ConfusionCounts c{rng.below(40) + 1, rng.below(40), rng.below(40), rng.below(40) + 1};
        const double n = static_cast<double>(c.total());
        const double correct = static_cast<double>(c.tp + c.tn);
        const double expected = (static_cast<double>(c.tp + c.fn) * static_cast<double>(c.tp + c.fp) +
                                 static_cast<double>(c.tn + c.fp) * static_cast<double>(c.tn + c.fn)) /
                                n;
        const Score h = hss(c);
        REQUIRE(h.has_value());
        CHECK(std::abs(*h - (correct - expected) / (n - expected)) <= 1e-12);
    }
    CHECK(near(hss({20, 10, 20, 10}), 0.0));
    CHECK(near(hss({12, 4, 6, 2}), 0.0));
}

TEST_CASE("score properties") {
    CounterRng rng(5);
    for (int t = 0; t < 500; ++t) {
        Labels truth, pred;
        const std::size_t n = 2 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng.below(2) ? 1 : -1);
            pred.push_back(rng.below(2) ? 1 : -1);
        }
        truth[0] = 1;
        truth[1] = -1;
        const auto c = confusion(pred, truth);
        // Permutation: reverse order.
        Labels rp(pred.rbegin(), pred.rend());
        Labels rt(truth.rbegin(), truth.rend());
        CHECK(confusion(rp, rt) == c);
        // Class-role swap.
        Labels fp = pred, ft = truth;
        for (auto& v : fp) v = -v;
        for (auto& v : ft) v = -v;
        const auto cs = confusion(fp, ft);
        CHECK(near(recall(cs), *specificity(c)));
        CHECK(near(specificity(cs), *recall(c)));
        CHECK(near(tss(cs), *tss(c)));
        // Constant predictors.
        CHECK(near(tss(confusion(Labels(n, 1), truth)), 0.0));
        CHECK(near(tss(confusion(Labels(n, -1), truth)), 0.0));
    }
}

TEST_CASE("metric names") {
    for (Metric m : kAllMetrics) {
        CHECK(parse_metric(metric_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_metric("auc"), Error);
    CHECK(near(evaluate(Metric::tss, {90, 10, 5, 20}), 0.7));
}
