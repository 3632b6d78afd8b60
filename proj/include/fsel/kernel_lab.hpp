#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/matrix.hpp"

namespace fsel {

struct GramMatrix {
    Matrix K;
    std::string family = "gaussian";
    double gamma = 0.0;
};

/// K_ij = exp(-gamma |x_i - x_j|^2), each unordered pair evaluated once so
/// the result is exactly symmetric with a unit diagonal.
GramMatrix gaussian_gram(const Matrix& X, double gamma);

double frobenius_inner(const Matrix& K1, const Matrix& K2);
double frobenius_norm(const Matrix& K);

/// `product` is the cosine form <K1,K2> / (|K1| |K2|), bounded by 1 in
/// absolute value. `sqrt_product` divides by sqrt(|K1| |K2|) instead and is
/// kept only for comparison; it is not scale invariant.
enum class AlignmentNorm { product, sqrt_product };

double alignment(const Matrix& K1, const Matrix& K2, AlignmentNorm norm = AlignmentNorm::product);

/// Alignment with the ideal target y y^T, using y'Ky for the inner product
/// and |y y^T|_F = n.
double target_alignment(const Matrix& K, std::span<const int> y,
                        AlignmentNorm norm = AlignmentNorm::product);

struct AlignmentPoint {
    std::size_t k = 0;
    double frobenius_norm = 0.0;
    double target_alignment = 0.0;
};

/// Gaussian Gram diagnostics on the prefixes order[0..k) for k = 1..|order|.
std::vector<AlignmentPoint> alignment_trace(const Dataset& ds, std::span<const std::size_t> order,
                                            double gamma);

void write_alignment_csv(std::ostream& out, std::span<const AlignmentPoint> trace);

}  // namespace fsel
