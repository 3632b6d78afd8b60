#include "fsel/models.hpp"

#include "fsel/error.hpp"
#include "fsel/mlp.hpp"
#include "fsel/svm.hpp"

namespace fsel {

void TrainedModel::check_width(const Matrix& X) const {
    if (X.rows() > 0 && X.cols() != input_dim()) {
        throw data_error(descriptor() + ": input has " + std::to_string(X.cols()) +
                         " features, model expects " + std::to_string(input_dim()));
    }
}

ScaledModel::ScaledModel(Scaling scaling, std::unique_ptr<TrainedModel> inner)
    : scaling_(std::move(scaling)), inner_(std::move(inner)) {
    if (!inner_ || inner_->input_dim() != scaling_.mean.size()) {
        throw data_error("scaled model: scaling width does not match the inner model");
    }
}

Labels ScaledModel::predict(const Matrix& X) const {
    check_width(X);
    if (X.rows() == 0) {
        return {};
    }
    return inner_->predict(scaling_.apply(X));
}

std::string ScaledModel::descriptor() const { return "standardized " + inner_->descriptor(); }

nlohmann::json ScaledModel::to_json() const {
    return nlohmann::json{{"kind", "standardized"},
                          {"mean", scaling_.mean},
                          {"stddev", scaling_.stddev},
                          {"inner", inner_->to_json()}};
}

StandardizedClassifier::StandardizedClassifier(std::shared_ptr<const Classifier> inner)
    : inner_(std::move(inner)) {}

std::unique_ptr<TrainedModel> StandardizedClassifier::fit(const Dataset& train,
                                                          std::uint64_t seed) const {
    Scaling scaling = fit_scaling(train.X);
    Dataset scaled = train;
    scaled.X = scaling.apply(train.X);
    return std::make_unique<ScaledModel>(std::move(scaling), inner_->fit(scaled, seed));
}

std::string StandardizedClassifier::descriptor() const {
    return "standardized " + inner_->descriptor();
}

nlohmann::json StandardizedClassifier::config_json() const {
    return nlohmann::json{{"standardize", true}, {"model", inner_->config_json()}};
}

std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "svm") {
        return std::make_unique<SvmModel>(SvmModel::from_json(j));
    }
    if (kind == "mlp") {
        return std::make_unique<MlpModel>(MlpModel::from_json(j));
    }
    if (kind == "standardized") {
        Scaling s{j.at("mean").get<std::vector<double>>(), j.at("stddev").get<std::vector<double>>()};
        if (s.mean.size() != s.stddev.size()) {
            throw data_error("standardized model: mean and stddev lengths differ");
        }
        return std::make_unique<ScaledModel>(std::move(s), model_from_json(j.at("inner")));
    }
    throw data_error("unknown model kind '" + kind + "'");
}

}  // namespace fsel
