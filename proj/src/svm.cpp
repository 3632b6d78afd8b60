#include "fsel/svm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fsel/error.hpp"

namespace fsel {

nlohmann::json to_json(const SvmConfig& cfg) {
    nlohmann::json j{{"C", cfg.C},
                     {"tol", cfg.tol},
                     {"max_passes", cfg.max_passes},
                     {"seed", cfg.seed}};
    j["gamma"] = cfg.gamma ? nlohmann::json(*cfg.gamma) : nlohmann::json(nullptr);
    return j;
}

SvmConfig svm_config_from_json(const nlohmann::json& j) {
    SvmConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "C") {
            cfg.C = value.get<double>();
        } else if (key == "gamma") {
            if (!value.is_null()) {
                cfg.gamma = value.get<double>();
            }
        } else if (key == "tol") {
            cfg.tol = value.get<double>();
        } else if (key == "max_passes") {
            cfg.max_passes = value.get<std::size_t>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else {
            throw config_error("unknown svm option '" + key + "'");
        }
    }
    return cfg;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Dual problem: min 1/2 a'Qa - e'a, 0 <= a_i <= C, y'a = 0, Q_ij = y_i y_j K_ij.
// Working pairs follow the second-order selection of Fan, Chen and Lin (2005);
// the gradient is kept exact, so the maximal violation is a true KKT measure.
class SmoSolver {
public:
    SmoSolver(const Matrix& X, const Labels& y, double gamma, double C)
        : n_(X.rows()), y_(y), C_(C), q_(n_ * n_), alpha_(n_, 0.0), grad_(n_, -1.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            q_[i * n_ + i] = 1.0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double k = std::exp(-gamma * squared_distance(X.row(i), X.row(j)));
                const double v = static_cast<double>(y_[i] * y_[j]) * k;
                q_[i * n_ + j] = v;
                q_[j * n_ + i] = v;
            }
        }
    }

    SvmFitInfo solve(double tol, std::size_t max_iterations) {
        SvmFitInfo info;
        while (true) {
            std::size_t i = 0;
            std::size_t j = 0;
            const double gap = select_pair(i, j);
            info.max_kkt_violation = gap;
            if (gap <= tol) {
                info.converged = true;
                break;
            }
            if (info.iterations >= max_iterations) {
                break;
            }
            update_pair(i, j);
            ++info.iterations;
        }
        info.dual = alpha_;
        return info;
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double yg = y_[t] * grad_[t];
            if (at_upper(t)) {
                if (y_[t] == -1) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (at_lower(t)) {
                if (y_[t] == 1) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        return n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    }

    const std::vector<double>& alpha() const noexcept { return alpha_; }

private:
    bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
    bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
    bool in_up(std::size_t t) const { return y_[t] == 1 ? !at_upper(t) : !at_lower(t); }
    bool in_low(std::size_t t) const { return y_[t] == 1 ? !at_lower(t) : !at_upper(t); }
    double q(std::size_t a, std::size_t b) const { return q_[a * n_ + b]; }

    // Returns m(alpha) - M(alpha); ties resolve to the smallest index.
    double select_pair(std::size_t& out_i, std::size_t& out_j) const {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_up(t)) {
                const double v = -y_[t] * grad_[t];
                if (v > gmax) {
                    gmax = v;
                    i = t;
                }
            }
        }
        double gmin = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double v = -y_[t] * grad_[t];
            gmin = std::min(gmin, v);
            if (i == n_) {
                continue;
            }
            const double b = gmax - v;
            if (b > 0.0) {
                // Q_ii + Q_tt - 2 y_i y_t Q_it is the curvature along the pair.
                double a = q(i, i) + q(t, t) - 2.0 * y_[i] * y_[t] * q(i, t);
                if (a <= 0.0) {
                    a = kTau;
                }
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (i == n_ || j == n_) {
            return 0.0;
        }
        out_i = i;
        out_j = j;
        return gmax - gmin;
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double old_ai = alpha_[i];
        const double old_aj = alpha_[j];
        if (y_[i] != y_[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = alpha_[i] - alpha_[j];
            alpha_[i] += delta;
            alpha_[j] += delta;
            if (diff > 0.0) {
                if (alpha_[j] < 0.0) {
                    alpha_[j] = 0.0;
                    alpha_[i] = diff;
                }
            } else if (alpha_[i] < 0.0) {
                alpha_[i] = 0.0;
                alpha_[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha_[i] > C_) {
                    alpha_[i] = C_;
                    alpha_[j] = C_ - diff;
                }
            } else if (alpha_[j] > C_) {
                alpha_[j] = C_;
                alpha_[i] = C_ + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = alpha_[i] + alpha_[j];
            alpha_[i] -= delta;
            alpha_[j] += delta;
            if (sum > C_) {
                if (alpha_[i] > C_) {
                    alpha_[i] = C_;
                    alpha_[j] = sum - C_;
                }
            } else if (alpha_[j] < 0.0) {
                alpha_[j] = 0.0;
                alpha_[i] = sum;
            }
            if (sum > C_) {
                if (alpha_[j] > C_) {
                    alpha_[j] = C_;
                    alpha_[i] = sum - C_;
                }
            } else if (alpha_[i] < 0.0) {
                alpha_[i] = 0.0;
                alpha_[j] = sum;
            }
        }
        const double di = alpha_[i] - old_ai;
        const double dj = alpha_[j] - old_aj;
        for (std::size_t t = 0; t < n_; ++t) {
            grad_[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    static constexpr double kTau = 1e-12;

    std::size_t n_;
    const Labels& y_;
    double C_;
    std::vector<double> q_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
};

}  // namespace

SvmModel::SvmModel(Matrix support, std::vector<double> coef, double bias, double gamma, double C,
                   SvmFitInfo info)
    : support_(std::move(support)),
      coef_(std::move(coef)),
      bias_(bias),
      gamma_(gamma),
      C_(C),
      info_(std::move(info)) {
    if (coef_.size() != support_.rows()) {
        throw data_error("svm model: coefficient count does not match support vectors");
    }
}

double SvmModel::decision_value(std::span<const double> x) const {
    double f = bias_;
    for (std::size_t s = 0; s < support_.rows(); ++s) {
        f += coef_[s] * std::exp(-gamma_ * squared_distance(support_.row(s), x));
    }
    return f;
}

Labels SvmModel::predict(const Matrix& X) const {
    check_width(X);
    Labels out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = decision_value(X.row(i)) >= 0.0 ? 1 : -1;
    }
    return out;
}

std::string SvmModel::descriptor() const {
    std::ostringstream os;
    os << "svm(rbf, C=" << C_ << ", gamma=" << gamma_ << ", sv=" << support_.rows() << ")";
    return os.str();
}

nlohmann::json SvmModel::to_json() const {
    nlohmann::json sv = nlohmann::json::array();
    for (std::size_t s = 0; s < support_.rows(); ++s) {
        const auto r = support_.row(s);
        sv.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return nlohmann::json{{"kind", "svm"},
                          {"kernel", "gaussian"},
                          {"gamma", gamma_},
                          {"C", C_},
                          {"bias", bias_},
                          {"dim", support_.cols()},
                          {"coefficients", coef_},
                          {"support_vectors", sv}};
}

SvmModel SvmModel::from_json(const nlohmann::json& j) {
    const auto dim = j.at("dim").get<std::size_t>();
    const auto& sv = j.at("support_vectors");
    Matrix support(sv.size(), dim);
    for (std::size_t s = 0; s < sv.size(); ++s) {
        const auto row = sv[s].get<std::vector<double>>();
        if (row.size() != dim) {
            throw data_error("svm model: support vector " + std::to_string(s) + " has wrong width");
        }
        std::copy(row.begin(), row.end(), support.row(s).begin());
    }
    return SvmModel(std::move(support), j.at("coefficients").get<std::vector<double>>(),
                    j.at("bias").get<double>(), j.at("gamma").get<double>(),
                    j.at("C").get<double>());
}

SvmModel train_svm_smo(const Dataset& train, const SvmConfig& cfg) {
    train.require_both_classes("svm");
    if (!(cfg.C > 0.0)) {
        throw config_error("svm: C must be positive");
    }
    if (!(cfg.tol > 0.0)) {
        throw config_error("svm: tol must be positive");
    }
    const double gamma =
        cfg.gamma.value_or(1.0 / static_cast<double>(std::max<std::size_t>(train.dims(), 1)));
    if (!(gamma > 0.0)) {
        throw config_error("svm: gamma must be positive");
    }
    SmoSolver solver(train.X, train.y, gamma, cfg.C);
    const std::size_t budget =
        std::max<std::size_t>(std::max<std::size_t>(cfg.max_passes, 1) * train.size(), 10'000'000);
    SvmFitInfo info = solver.solve(cfg.tol, budget);
    const double rho = solver.rho();

    std::size_t n_sv = 0;
    for (double a : info.dual) {
        n_sv += a > 0.0 ? 1 : 0;
    }
    Matrix support(n_sv, train.dims());
    std::vector<double> coef;
    coef.reserve(n_sv);
    for (std::size_t i = 0, s = 0; i < train.size(); ++i) {
        if (info.dual[i] > 0.0) {
            const auto src = train.X.row(i);
            std::copy(src.begin(), src.end(), support.row(s++).begin());
            coef.push_back(info.dual[i] * train.y[i]);
        }
    }
    return SvmModel(std::move(support), std::move(coef), -rho, gamma, cfg.C, std::move(info));
}

std::unique_ptr<TrainedModel> SvmClassifier::fit(const Dataset& train, std::uint64_t) const {
    return std::make_unique<SvmModel>(train_svm_smo(train, cfg_));
}

std::string SvmClassifier::descriptor() const {
    std::ostringstream os;
    os << "svm(C=" << cfg_.C << ", gamma=";
    if (cfg_.gamma) {
        os << *cfg_.gamma;
    } else {
        os << "1/d";
    }
    os << ")";
    return os.str();
}

}  // namespace fsel
