#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fsel/models.hpp"

namespace fsel {

struct SvmConfig {
    double C = 1.0;
    /// Kernel scale; 1/d of the training data when unset.
    std::optional<double> gamma;
    /// Stopping tolerance on the maximal KKT violation.
    double tol = 1e-3;
    /// Iteration budget in units of n pair updates, never below 1e7 updates.
    std::size_t max_passes = 50;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const SvmConfig& cfg);
SvmConfig svm_config_from_json(const nlohmann::json& j);

struct SvmFitInfo {
    std::vector<double> dual;  // alpha_i, one per training row
    std::size_t iterations = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;
};

/// Soft-margin RBF SVM: f(x) = sum_i alpha_i y_i exp(-gamma |x_i - x|^2) + b.
class SvmModel final : public TrainedModel {
public:
    SvmModel(Matrix support, std::vector<double> coef, double bias, double gamma, double C,
             SvmFitInfo info = {});

    Labels predict(const Matrix& X) const override;
    std::size_t input_dim() const override { return support_.cols(); }
    std::string descriptor() const override;
    nlohmann::json to_json() const override;
    static SvmModel from_json(const nlohmann::json& j);

    double decision_value(std::span<const double> x) const;

    const Matrix& support_vectors() const noexcept { return support_; }
    /// alpha_i * y_i for each support vector.
    const std::vector<double>& coefficients() const noexcept { return coef_; }
    double bias() const noexcept { return bias_; }
    double gamma() const noexcept { return gamma_; }
    double C() const noexcept { return C_; }
    const SvmFitInfo& fit_info() const noexcept { return info_; }

private:
    Matrix support_;
    std::vector<double> coef_;
    double bias_;
    double gamma_;
    double C_;
    SvmFitInfo info_;
};

/// Solves the dual with sequential minimal optimization. Throws a data error
/// on single-class input, config error on non-positive C/gamma/tol.
SvmModel train_svm_smo(const Dataset& train, const SvmConfig& cfg);

class SvmClassifier final : public Classifier {
public:
    explicit SvmClassifier(SvmConfig cfg) : cfg_(cfg) {}

    std::unique_ptr<TrainedModel> fit(const Dataset& train, std::uint64_t seed) const override;
    std::string descriptor() const override;
    nlohmann::json config_json() const override { return to_json(cfg_); }
    const SvmConfig& config() const noexcept { return cfg_; }

private:
    SvmConfig cfg_;
};

}  // namespace fsel
