#pragma once

#include "thermoreg/feature_matrix.hpp"
#include "thermoreg/forest.hpp"
#include "thermoreg/knn.hpp"
#include "thermoreg/linear_models.hpp"
#include "thermoreg/svr.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace thermo {

enum class Family { linear, quadratic, weighted, binning, piecewise, knn, svr, forest };

std::string family_name(Family f);
Family parse_family(const std::string& name);

using HpValue = std::variant<double, std::string>;

// Family plus hyperparameters. Unset keys take the family defaults, which
// are the benchmark settings where one is fixed.
struct EstimatorSpec {
    Family family = Family::linear;
    std::map<std::string, HpValue> hp;

    EstimatorSpec() = default;
    explicit EstimatorSpec(Family f, std::map<std::string, HpValue> overrides = {});

    double number(const std::string& key) const;
    std::string text(const std::string& key) const;
    // Sets from "key=value" text; numeric when the value parses as a number.
    void set_from_text(const std::string& assignment);

    // Throws ConfigError for keys outside the family schema or wrong types.
    void validate() const;
    std::string label() const;

    nlohmann::json to_json() const;
    static EstimatorSpec from_json(const nlohmann::json& j);

    bool operator==(const EstimatorSpec&) const = default;
};

// Default hyperparameters for a family.
std::map<std::string, HpValue> family_defaults(Family f);

using ModelParams =
    std::variant<LinearModel, QuadraticModel, BinnedModel, PiecewiseModel, KnnModel, SvrModel, ForestModel>;

// Immutable fitted model with a name-checked predict.
class TrainedModel {
public:
    TrainedModel(EstimatorSpec spec, std::vector<std::string> feature_names, ModelParams params);

    // Rows of `m` must carry exactly the training feature names, in order.
    Vector predict(const FeatureMatrix& m) const;

    const EstimatorSpec& spec() const { return spec_; }
    const std::vector<std::string>& feature_names() const { return names_; }
    const ModelParams& params() const { return params_; }

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

private:
    EstimatorSpec spec_;
    std::vector<std::string> names_;
    ModelParams params_;
};

TrainedModel fit(const EstimatorSpec& spec, const FeatureMatrix& train);

} // namespace thermo
