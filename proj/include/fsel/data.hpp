#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fsel/matrix.hpp"

namespace fsel {

struct Dataset {
    Matrix X;
    Labels y;
    std::vector<std::string> names;

    std::size_t size() const noexcept { return X.rows(); }
    std::size_t dims() const noexcept { return X.cols(); }
    std::size_t count_positive() const noexcept;

    /// Throws a data error when shapes disagree, a label is not +-1 or an
    /// entry is non-finite.
    void validate() const;
    /// validate() plus at least one example of each class.
    void require_both_classes(const char* context) const;
};

/// e^{x1^2} + e^{x2} + 3 x3 + 2 cos(x4 x5) + 4 x6^2 + 10^alpha * sum_{j>=7} x_j.
/// Indices in the formula are 1-based; `x` must hold at least 7 entries.
double eval_test_function(std::span<const double> x, double alpha);

/// n points uniform on [0,1)^d, labelled +1 when the test function exceeds
/// its sample mean. Entry (i, j) is draw i*d + j of the seeded counter stream.
Dataset generate_synthetic(std::size_t n, std::size_t d, double alpha, std::uint64_t seed);

Dataset parse_csv(std::istream& in, const std::string& label_column);
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);
void write_csv(std::ostream& out, const Dataset& ds, const std::string& label_column = "label");

enum class WindowLabelRule { any_positive, majority };

/// Averages consecutive, non-overlapping windows of `window` raw rows. A
/// trailing partial window is dropped.
Dataset aggregate_by_window(const Matrix& raw, const Labels& raw_labels, std::size_t window,
                            std::vector<std::string> names = {},
                            WindowLabelRule rule = WindowLabelRule::any_positive);

struct SplitPlan {
    std::size_t q = 7;
    double validation_fraction = 0.3;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct Split {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> valid_idx;

    friend bool operator==(const Split&, const Split&) = default;
};

/// Number of validation rows for n examples: ceil(n * fraction).
std::size_t validation_count(std::size_t n, double fraction);

/// q independent shuffle splits. Split h depends only on (n, y, plan.seed, h).
std::vector<Split> make_splits(std::size_t n, const Labels& y, const SplitPlan& plan);

/// Stratified k-fold partition; fold f validates on its own part.
std::vector<Split> make_folds(const Labels& y, std::size_t folds, std::uint64_t seed);

/// Per-feature affine map fitted on training data (population std).
struct Scaling {
    std::vector<double> mean;
    std::vector<double> stddev;

    Matrix apply(const Matrix& X) const;
    void apply_row(std::span<const double> in, std::span<double> out) const;
};

Scaling fit_scaling(const Matrix& X);

struct StandardizeResult {
    Dataset train;
    std::vector<Dataset> others;
    Scaling scaling;
};

/// Zero-variance training features map to 0 everywhere.
StandardizeResult standardize(const Dataset& train, std::span<const Dataset> others = {});

Dataset project_features(const Dataset& ds, std::span<const std::size_t> keep);
Dataset select_rows(const Dataset& ds, std::span<const std::size_t> rows);

/// Seeded uniform subsample of `count` distinct row indices, sorted.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace fsel
