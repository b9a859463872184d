#pragma once

#include "thermoreg/ingest.hpp"
#include "thermoreg/transform.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace thermo {

namespace step {

// Appends numeric dataset columns; `all_numeric` takes every numeric column.
struct Select {
    std::vector<std::string> columns;
    bool all_numeric = false;
};

// Standardizes the listed working columns (all current columns when empty).
struct Standardize {
    std::vector<std::string> columns;
};

struct Ordinal {
    std::string variable;
};

struct OneHot {
    std::string variable;
};

struct Polynomial {
    std::string a;
    std::string b;
};

struct Replicate {
    std::string feature;
    int count = 0;
};

} // namespace step

using RecipeStep = std::variant<step::Select, step::Standardize, step::Ordinal, step::OneHot, step::Polynomial,
                                step::Replicate>;

struct FeatureRecipe {
    std::string name = "custom";
    std::vector<RecipeStep> steps;

    nlohmann::json to_json() const;
    static FeatureRecipe from_json(const nlohmann::json& j);
};

// Preset names: a, b, c, d, e, f, full38.
const std::vector<std::string>& preset_names();
FeatureRecipe preset_recipe(const std::string& name);

// Preset name or a path to a recipe JSON file.
FeatureRecipe resolve_recipe(const std::string& name_or_path);

// The seven correlation-bio features in their ranking order.
const std::vector<std::string>& correlation_bio_features();
// The six biologically motivated additions considered in the subset search.
const std::vector<std::string>& bio_candidate_features();

// Recipe (c) plus `reps` replicas of T_Max_1 after the polynomial terms.
FeatureRecipe replication_recipe(int reps, bool with_polynomial = true);

// Recipe whose state (standardizers, categories) is fitted on one dataset
// and can then be applied to others with the same columns.
class FittedRecipe {
public:
    FittedRecipe(FeatureRecipe recipe, const CleanDataset& fit_on, const Schema& schema);

    FeatureMatrix apply(const CleanDataset& ds) const;
    const FeatureRecipe& recipe() const { return recipe_; }
    const std::vector<std::string>& feature_names() const { return names_; }

private:
    struct State {
        std::map<std::size_t, Standardizer> standardizers;
        std::map<std::size_t, OneHotMap> onehots;
    };

    // Fits state into `fit` when non-null, otherwise reads state_.
    FeatureMatrix run(const CleanDataset& ds, State* fit) const;

    FeatureRecipe recipe_;
    Schema schema_;
    State state_;
    std::vector<std::string> names_;
};

FeatureMatrix build_features(const CleanDataset& ds, const FeatureRecipe& recipe, const Schema& schema = {});

} // namespace thermo
