#include "fsel/search.hpp"

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

Score cross_validate(const Dataset& train, const SvmConfig& cfg, Metric metric,
                     const std::vector<Split>& folds) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& fold : folds) {
        const Dataset fit_part = select_rows(train, fold.train_idx);
        const Dataset valid_part = select_rows(train, fold.valid_idx);
        const Scaling scaling = fit_scaling(fit_part.X);
        Dataset scaled = fit_part;
        scaled.X = scaling.apply(fit_part.X);
        const SvmModel model = train_svm_smo(scaled, cfg);
        const Labels pred = model.predict(scaling.apply(valid_part.X));
        const Score s = evaluate(metric, confusion(pred, valid_part.y));
        if (s) {
            sum += *s;
            ++defined;
        }
    }
    if (defined == 0) {
        return std::nullopt;
    }
    return sum / static_cast<double>(defined);
}

SearchResult random_search_cv(const Dataset& train, const HyperSearchSpec& spec, Metric metric,
                              const SvmConfig& base) {
    if (spec.n_draws < 1) {
        throw config_error("hyperparameter search needs n_draws >= 1");
    }
    if (!(spec.c_min > 0.0 && spec.c_min <= spec.c_max && spec.gamma_min > 0.0 &&
          spec.gamma_min <= spec.gamma_max)) {
        throw config_error("hyperparameter ranges must be positive and ordered");
    }
    train.require_both_classes("hyperparameter search");
    const auto folds = make_folds(train.y, spec.folds, substream(spec.seed, "folds"));

    CounterRng rng(substream(spec.seed, "draws"));
    SearchResult result;
    bool have_best = false;
    double best_score = 0.0;
    for (std::size_t k = 0; k < spec.n_draws; ++k) {
        SearchCandidate cand;
        cand.C = rng.uniform(spec.c_min, spec.c_max);
        cand.gamma = rng.uniform(spec.gamma_min, spec.gamma_max);
        // A degenerate range pins the value exactly.
        if (spec.c_min == spec.c_max) {
            cand.C = spec.c_min;
        }
        if (spec.gamma_min == spec.gamma_max) {
            cand.gamma = spec.gamma_min;
        }
        SvmConfig cfg = base;
        cfg.C = cand.C;
        cfg.gamma = cand.gamma;
        cand.mean = cross_validate(train, cfg, metric, folds);
        if (cand.mean && (!have_best || *cand.mean > best_score)) {
            have_best = true;
            best_score = *cand.mean;
            result.best_index = k;
            result.best = cfg;
        }
        result.candidates.push_back(cand);
    }
    if (!have_best) {
        throw numerical_error("hyperparameter search: metric undefined for every candidate");
    }
    return result;
}

}  // namespace fsel
