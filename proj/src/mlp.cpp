#include "fsel/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

nlohmann::json to_json(const MlpConfig& cfg) {
    return nlohmann::json{{"hidden_widths", cfg.hidden_widths},
                          {"learning_rate", cfg.learning_rate},
                          {"epochs", cfg.epochs},
                          {"batch", cfg.batch},
                          {"l2_first_layers", cfg.l2_first_layers},
                          {"patience", cfg.patience},
                          {"holdout_fraction", cfg.holdout_fraction},
                          {"seed", cfg.seed}};
}

MlpConfig mlp_config_from_json(const nlohmann::json& j) {
    MlpConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "hidden_widths") {
            cfg.hidden_widths = value.get<std::vector<std::size_t>>();
        } else if (key == "learning_rate") {
            cfg.learning_rate = value.get<double>();
        } else if (key == "epochs") {
            cfg.epochs = value.get<std::size_t>();
        } else if (key == "batch") {
            cfg.batch = value.get<std::size_t>();
        } else if (key == "l2_first_layers") {
            cfg.l2_first_layers = value.get<double>();
        } else if (key == "patience") {
            cfg.patience = value.get<std::size_t>();
        } else if (key == "holdout_fraction") {
            cfg.holdout_fraction = value.get<double>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else {
            throw config_error("unknown mlp option '" + key + "'");
        }
    }
    return cfg;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

MlpNetwork::MlpNetwork(std::size_t input_dim, std::vector<std::size_t> hidden_widths) {
    if (input_dim == 0) {
        throw config_error("mlp: input dimension must be >= 1");
    }
    widths_.push_back(input_dim);
    for (std::size_t w : hidden_widths) {
        if (w == 0) {
            throw config_error("mlp: hidden widths must be >= 1");
        }
        widths_.push_back(w);
    }
    widths_.push_back(1);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        offsets_.push_back(offset);
        offset += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }
    offsets_.push_back(offset);
    params_.assign(offset, 0.0);
}

void MlpNetwork::initialize(std::uint64_t seed) {
    const CounterRng rng(seed);
    std::uint64_t draw = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t in = widths_[l];
        const std::size_t out = widths_[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in));
        double* w = params_.data() + offsets_[l];
        for (std::size_t k = 0; k < in * out; ++k) {
            w[k] = limit * (2.0 * rng.uniform_at(draw++) - 1.0);
        }
        std::fill(w + in * out, w + in * out + out, 0.0);
    }
}

void MlpNetwork::forward(std::span<const double> x, std::vector<std::vector<double>>& act) const {
    const std::size_t L = layer_count();
    act.resize(L + 1);
    act[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t in = widths_[l];
        const std::size_t out = widths_[l + 1];
        const double* w = params_.data() + offsets_[l];
        const double* b = w + in * out;
        act[l + 1].assign(out, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            for (std::size_t i = 0; i < in; ++i) {
                z += w[o * in + i] * act[l][i];
            }
            // Hidden layers are ReLU; the last entry stays a logit.
            act[l + 1][o] = l + 1 < L ? std::max(z, 0.0) : z;
        }
    }
}

double MlpNetwork::probability(std::span<const double> x) const {
    std::vector<std::vector<double>> act;
    forward(x, act);
    return sigmoid(act.back()[0]);
}

double MlpNetwork::penalty() const {
    double reg = 0.0;
    for (std::size_t l = 0; l < layer_count() && l < 2; ++l) {
        const double* w = params_.data() + offsets_[l];
        for (std::size_t k = 0; k < widths_[l] * widths_[l + 1]; ++k) {
            reg += w[k] * w[k];
        }
    }
    return reg;
}

double MlpNetwork::loss(const Matrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                        double l2) const {
    std::vector<std::vector<double>> act;
    double total = 0.0;
    for (std::size_t r : rows) {
        forward(X.row(r), act);
        const double z = act.back()[0];
        const double t = y[r] == 1 ? 1.0 : 0.0;
        total += softplus(z) - t * z;
    }
    return total / static_cast<double>(rows.size()) + l2 * penalty();
}

std::vector<double> MlpNetwork::gradient(const Matrix& X, std::span<const int> y,
                                         std::span<const std::size_t> rows, double l2) const {
    std::vector<double> grad(params_.size(), 0.0);
    const std::size_t L = layer_count();
    std::vector<std::vector<double>> act;
    std::vector<double> delta;
    std::vector<double> prev;
    const double scale = 1.0 / static_cast<double>(rows.size());

    for (std::size_t r : rows) {
        forward(X.row(r), act);
        const double t = y[r] == 1 ? 1.0 : 0.0;
        delta.assign(1, (sigmoid(act[L][0]) - t) * scale);
        for (std::size_t l = L; l-- > 0;) {
            const std::size_t in = widths_[l];
            const std::size_t out = widths_[l + 1];
            const double* w = params_.data() + offsets_[l];
            double* gw = grad.data() + offsets_[l];
            double* gb = gw + in * out;
            for (std::size_t o = 0; o < out; ++o) {
                gb[o] += delta[o];
                for (std::size_t i = 0; i < in; ++i) {
                    gw[o * in + i] += delta[o] * act[l][i];
                }
            }
            if (l == 0) {
                break;
            }
            prev.assign(in, 0.0);
            for (std::size_t i = 0; i < in; ++i) {
                // ReLU derivative, taken as 0 at the kink.
                if (act[l][i] <= 0.0) {
                    continue;
                }
                double s = 0.0;
                for (std::size_t o = 0; o < out; ++o) {
                    s += w[o * in + i] * delta[o];
                }
                prev[i] = s;
            }
            delta.swap(prev);
        }
    }
    for (std::size_t l = 0; l < L && l < 2; ++l) {
        const double* w = params_.data() + offsets_[l];
        double* gw = grad.data() + offsets_[l];
        for (std::size_t k = 0; k < widths_[l] * widths_[l + 1]; ++k) {
            gw[k] += 2.0 * l2 * w[k];
        }
    }
    return grad;
}

Labels MlpModel::predict(const Matrix& X) const {
    check_width(X);
    Labels out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = net_.probability(X.row(i)) >= 0.5 ? 1 : -1;
    }
    return out;
}

std::string MlpModel::descriptor() const {
    std::ostringstream os;
    os << "mlp(";
    const auto& w = net_.widths();
    for (std::size_t l = 0; l < w.size(); ++l) {
        os << (l ? "-" : "") << w[l];
    }
    os << ")";
    return os.str();
}

nlohmann::json MlpModel::to_json() const {
    return nlohmann::json{{"kind", "mlp"},
                          {"activation", "relu"},
                          {"output", "sigmoid"},
                          {"widths", net_.widths()},
                          {"epochs_run", epochs_run_},
                          {"parameters", net_.parameters()}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
    const auto widths = j.at("widths").get<std::vector<std::size_t>>();
    if (widths.size() < 2 || widths.back() != 1) {
        throw data_error("mlp model: malformed layer widths");
    }
    MlpNetwork net(widths.front(),
                   std::vector<std::size_t>(widths.begin() + 1, widths.end() - 1));
    auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameters().size()) {
        throw data_error("mlp model: expected " + std::to_string(net.parameters().size()) +
                         " parameters, found " + std::to_string(params.size()));
    }
    net.parameters() = std::move(params);
    return MlpModel(std::move(net), j.value("epochs_run", std::size_t{0}));
}

MlpModel train_mlp(const Dataset& train, const MlpConfig& cfg) {
    train.require_both_classes("mlp");
    if (cfg.epochs < 1 || cfg.batch < 1) {
        throw config_error("mlp: epochs and batch must be >= 1");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw config_error("mlp: learning rate must be positive");
    }
    MlpNetwork net(train.dims(), cfg.hidden_widths);
    net.initialize(substream(cfg.seed, "init"));

    std::vector<std::size_t> fit_rows(train.size());
    std::iota(fit_rows.begin(), fit_rows.end(), std::size_t{0});
    std::vector<std::size_t> holdout;
    if (cfg.patience > 0 && cfg.holdout_fraction > 0.0) {
        try {
            const auto split = make_splits(
                train.size(), train.y,
                SplitPlan{1, cfg.holdout_fraction, substream(cfg.seed, "holdout"), true});
            fit_rows = split.front().train_idx;
            holdout = split.front().valid_idx;
        } catch (const Error&) {
            // Too small to hold anything out: train on everything.
        }
    }

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    std::vector<double>& theta = net.parameters();
    std::vector<double> m(theta.size(), 0.0);
    std::vector<double> v(theta.size(), 0.0);
    std::uint64_t step = 0;

    CounterRng shuffle_rng(substream(cfg.seed, "shuffle"));
    std::vector<double> best = theta;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    std::size_t epochs_run = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = fit_rows.size(); i > 1; --i) {
            std::swap(fit_rows[i - 1], fit_rows[shuffle_rng.below(i)]);
        }
        for (std::size_t start = 0; start < fit_rows.size(); start += cfg.batch) {
            const std::size_t stop = std::min(start + cfg.batch, fit_rows.size());
            const std::span<const std::size_t> batch(fit_rows.data() + start, stop - start);
            const auto g = net.gradient(train.X, train.y, batch, cfg.l2_first_layers);
            ++step;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < theta.size(); ++k) {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                theta[k] -= cfg.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
            }
        }
        ++epochs_run;
        if (holdout.empty()) {
            continue;
        }
        const double val = net.loss(train.X, train.y, holdout, 0.0);
        if (val < best_loss) {
            best_loss = val;
            best = theta;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (!holdout.empty()) {
        theta = best;
    }
    return MlpModel(std::move(net), epochs_run);
}

std::unique_ptr<TrainedModel> MlpClassifier::fit(const Dataset& train, std::uint64_t seed) const {
    MlpConfig cfg = cfg_;
    cfg.seed = seed;
    return std::make_unique<MlpModel>(train_mlp(train, cfg));
}

std::string MlpClassifier::descriptor() const {
    std::ostringstream os;
    os << "mlp(hidden=";
    for (std::size_t l = 0; l < cfg_.hidden_widths.size(); ++l) {
        os << (l ? "-" : "") << cfg_.hidden_widths[l];
    }
    os << ", lr=" << cfg_.learning_rate << ", epochs=" << cfg_.epochs << ")";
    return os.str();
}

}  // namespace fsel
