#pragma once

#include <cstdint>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/metrics.hpp"
#include "fsel/svm.hpp"

namespace fsel {

/// Randomized search box for the RBF SVM. Draws are uniform on each range.
struct HyperSearchSpec {
    double c_min = 0.1;
    double c_max = 1000.0;
    double gamma_min = 0.001;
    double gamma_max = 0.1;
    std::size_t n_draws = 20;
    std::size_t folds = 3;
    std::uint64_t seed = 0;
};

struct SearchCandidate {
    double C = 0.0;
    double gamma = 0.0;
    /// Mean metric over the folds where it was defined; empty if none.
    Score mean;
};

struct SearchResult {
    SvmConfig best;
    std::vector<SearchCandidate> candidates;
    std::size_t best_index = 0;
};

/// Mean stratified-CV score of `cfg` on `train`. Each fold is standardized
/// on its own training part.
Score cross_validate(const Dataset& train, const SvmConfig& cfg, Metric metric,
                     const std::vector<Split>& folds);

/// Returns the draw with the highest mean CV score; ties go to the earlier
/// draw. Fields of `base` other than C and gamma are carried over.
SearchResult random_search_cv(const Dataset& train, const HyperSearchSpec& spec, Metric metric,
                              const SvmConfig& base = {});

}  // namespace fsel
