#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsel/models.hpp"

namespace fsel {

struct MlpConfig {
    std::vector<std::size_t> hidden_widths{16, 8};
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t batch = 64;
    /// L2 penalty on the weights of the first two layers.
    double l2_first_layers = 1e-4;
    /// Epochs without validation-loss improvement before stopping; 0 disables
    /// early stopping.
    std::size_t patience = 20;
    /// Share of the training set held out to monitor early stopping.
    double holdout_fraction = 0.1;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const MlpConfig& cfg);
MlpConfig mlp_config_from_json(const nlohmann::json& j);

/// Fully connected ReLU network with one sigmoid output. All weights and
/// biases live in one flat parameter vector, layer by layer, each layer
/// storing its (out x in) weight block followed by its biases.
class MlpNetwork {
public:
    MlpNetwork() = default;
    MlpNetwork(std::size_t input_dim, std::vector<std::size_t> hidden_widths);

    /// He-uniform weights, zero biases.
    void initialize(std::uint64_t seed);

    std::size_t input_dim() const noexcept { return widths_.front(); }
    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    std::size_t layer_count() const noexcept { return widths_.size() - 1; }
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

    std::vector<double>& parameters() noexcept { return params_; }
    const std::vector<double>& parameters() const noexcept { return params_; }

    /// P(y = +1 | x).
    double probability(std::span<const double> x) const;

    /// Mean binary cross-entropy over the rows plus l2 * sum of squared
    /// weights of the first two layers.
    double loss(const Matrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                double l2) const;
    /// Gradient of loss() with respect to parameters(), by backpropagation.
    std::vector<double> gradient(const Matrix& X, std::span<const int> y,
                                 std::span<const std::size_t> rows, double l2) const;

    friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;

private:
    void forward(std::span<const double> x, std::vector<std::vector<double>>& act) const;
    double penalty() const;

    std::vector<std::size_t> widths_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

class MlpModel final : public TrainedModel {
public:
    explicit MlpModel(MlpNetwork net, std::size_t epochs_run = 0)
        : net_(std::move(net)), epochs_run_(epochs_run) {}

    Labels predict(const Matrix& X) const override;
    std::size_t input_dim() const override { return net_.input_dim(); }
    std::string descriptor() const override;
    nlohmann::json to_json() const override;
    static MlpModel from_json(const nlohmann::json& j);

    const MlpNetwork& network() const noexcept { return net_; }
    std::size_t epochs_run() const noexcept { return epochs_run_; }

private:
    MlpNetwork net_;
    std::size_t epochs_run_;
};

/// Mini-batch Adam on binary cross-entropy with optional early stopping;
/// the returned network holds the best-validation-loss weights.
MlpModel train_mlp(const Dataset& train, const MlpConfig& cfg);

class MlpClassifier final : public Classifier {
public:
    explicit MlpClassifier(MlpConfig cfg) : cfg_(std::move(cfg)) {}

    /// `seed` replaces the config seed so each greedy fit gets its own stream.
    std::unique_ptr<TrainedModel> fit(const Dataset& train, std::uint64_t seed) const override;
    std::string descriptor() const override;
    nlohmann::json config_json() const override { return to_json(cfg_); }
    const MlpConfig& config() const noexcept { return cfg_; }

private:
    MlpConfig cfg_;
};

}  // namespace fsel
