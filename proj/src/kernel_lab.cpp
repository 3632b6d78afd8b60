#include "fsel/kernel_lab.hpp"

#include <cmath>
#include <ostream>
#include <set>

#include "fsel/error.hpp"

namespace fsel {

namespace {

void check_square_pair(const Matrix& K1, const Matrix& K2) {
    if (K1.rows() != K2.rows() || K1.cols() != K2.cols()) {
        throw data_error("kernel matrices have different shapes");
    }
}

// Squared distances accumulated column by column, in column order.
Matrix accumulate_distances(Matrix D, const Matrix& X, std::size_t col) {
    const std::size_t n = X.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = X(i, col) - X(j, col);
            D(i, j) += diff * diff;
        }
    }
    return D;
}

Matrix gram_from_distances(const Matrix& D, double gamma) {
    const std::size_t n = D.rows();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(-gamma * D(i, j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

}  // namespace

GramMatrix gaussian_gram(const Matrix& X, double gamma) {
    if (!(gamma > 0.0)) {
        throw config_error("gaussian kernel needs gamma > 0");
    }
    for (double v : X.values()) {
        if (!std::isfinite(v)) {
            throw data_error("gaussian kernel input contains a non-finite entry");
        }
    }
    Matrix D(X.rows(), X.rows());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        D = accumulate_distances(std::move(D), X, c);
    }
    return GramMatrix{gram_from_distances(D, gamma), "gaussian", gamma};
}

double frobenius_inner(const Matrix& K1, const Matrix& K2) {
    check_square_pair(K1, K2);
    double s = 0.0;
    const auto& a = K1.values();
    const auto& b = K2.values();
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}

double frobenius_norm(const Matrix& K) { return std::sqrt(frobenius_inner(K, K)); }

namespace {

double normalizer(double n1, double n2, AlignmentNorm norm) {
    return norm == AlignmentNorm::product ? n1 * n2 : std::sqrt(n1 * n2);
}

}  // namespace

double alignment(const Matrix& K1, const Matrix& K2, AlignmentNorm norm) {
    check_square_pair(K1, K2);
    const double n1 = frobenius_norm(K1);
    const double n2 = frobenius_norm(K2);
    if (n1 == 0.0 || n2 == 0.0) {
        throw numerical_error("alignment is undefined for a zero matrix");
    }
    return frobenius_inner(K1, K2) / normalizer(n1, n2, norm);
}

double target_alignment(const Matrix& K, std::span<const int> y, AlignmentNorm norm) {
    const std::size_t n = y.size();
    if (K.rows() != n || K.cols() != n) {
        throw data_error("target alignment: kernel is " + std::to_string(K.rows()) + "x" +
                         std::to_string(K.cols()) + " for " + std::to_string(n) + " labels");
    }
    for (int v : y) {
        if (v != 1 && v != -1) {
            throw data_error("target alignment: labels must be -1 or +1");
        }
    }
    const double nk = frobenius_norm(K);
    if (nk == 0.0) {
        throw numerical_error("target alignment is undefined for a zero kernel matrix");
    }
    double yky = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += K(i, j) * y[j];
        }
        yky += y[i] * row;
    }
    return yky / normalizer(nk, static_cast<double>(n), norm);
}

std::vector<AlignmentPoint> alignment_trace(const Dataset& ds, std::span<const std::size_t> order,
                                            double gamma) {
    if (!(gamma > 0.0)) {
        throw config_error("alignment trace needs gamma > 0");
    }
    std::set<std::size_t> seen;
    for (std::size_t f : order) {
        if (f >= ds.dims() || !seen.insert(f).second) {
            throw config_error("alignment trace: order must list distinct feature indices");
        }
    }
    ds.validate();
    std::vector<AlignmentPoint> out;
    Matrix D(ds.size(), ds.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        D = accumulate_distances(std::move(D), ds.X, order[k]);
        const Matrix K = gram_from_distances(D, gamma);
        out.push_back({k + 1, frobenius_norm(K), target_alignment(K, ds.y)});
    }
    return out;
}

void write_alignment_csv(std::ostream& out, std::span<const AlignmentPoint> trace) {
    out << "k,frobenius_norm,target_alignment\n";
    const auto prec = out.precision(17);
    for (const auto& p : trace) {
        out << p.k << ',' << p.frobenius_norm << ',' << p.target_alignment << '\n';
    }
    out.precision(prec);
}

}  // namespace fsel
