#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "fsel/data.hpp"
#include "fsel/matrix.hpp"
#include "json.hpp"

namespace fsel {

/// A fitted binary classifier. Immutable after construction, so predict()
/// may be called concurrently.
class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    /// One label in {-1,+1} per row of X. Throws a data error when X has
    /// the wrong number of columns.
    virtual Labels predict(const Matrix& X) const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::string descriptor() const = 0;
    /// Self-describing form accepted by model_from_json().
    virtual nlohmann::json to_json() const = 0;

protected:
    void check_width(const Matrix& X) const;
};

/// The plug-in point of the greedy loop: anything that can turn a training
/// set into a TrainedModel. fit() is deterministic in (train, seed).
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::unique_ptr<TrainedModel> fit(const Dataset& train, std::uint64_t seed) const = 0;
    virtual std::string descriptor() const = 0;
    virtual nlohmann::json config_json() const = 0;
};

/// Applies a fitted standardization before delegating to the inner model.
class ScaledModel final : public TrainedModel {
public:
    ScaledModel(Scaling scaling, std::unique_ptr<TrainedModel> inner);

    Labels predict(const Matrix& X) const override;
    std::size_t input_dim() const override { return scaling_.mean.size(); }
    std::string descriptor() const override;
    nlohmann::json to_json() const override;

    const TrainedModel& inner() const noexcept { return *inner_; }
    const Scaling& scaling() const noexcept { return scaling_; }

private:
    Scaling scaling_;
    std::unique_ptr<TrainedModel> inner_;
};

/// Wraps a classifier so every fit standardizes its own training data first
/// and the returned model carries that map.
class StandardizedClassifier final : public Classifier {
public:
    explicit StandardizedClassifier(std::shared_ptr<const Classifier> inner);

    std::unique_ptr<TrainedModel> fit(const Dataset& train, std::uint64_t seed) const override;
    std::string descriptor() const override;
    nlohmann::json config_json() const override;

private:
    std::shared_ptr<const Classifier> inner_;
};

/// Rebuilds any model written by TrainedModel::to_json().
std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json& j);

}  // namespace fsel
