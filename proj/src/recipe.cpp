#include "thermoreg/recipe.hpp"

#include <fstream>

namespace thermo {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::string kTMax = "T_Max_1";
const std::string kCanthi4 = "canthi4Max_1";

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> polynomial_names()
{
    return {square_name(kTMax), square_name(kCanthi4), interaction_name(kTMax, kCanthi4)};
}

// Recipe (c): the correlation-bio features, the retained environmental readings and
// gender indicators.
std::vector<RecipeStep> base_c_steps()
{
    return {
        step::Select{concat(correlation_bio_features(), {"T_offset", "T_atm", "Humidity"}), false},
        step::Standardize{},
        step::OneHot{"Gender"},
    };
}

} // namespace

const std::vector<std::string>& correlation_bio_features()
{
    static const std::vector<std::string> f{"T_Max_1",   "canthi4Max_1", "canthiMax_1", "Max1R13_1",
                                            "Max1L13_1", "aveAllL13_1",  "aveAllR13_1"};
    return f;
}

const std::vector<std::string>& bio_candidate_features()
{
    static const std::vector<std::string> f{"Distance", "T_offset", "T_atm", "Humidity", "Gender_Female",
                                            "Gender_Male"};
    return f;
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"a", "b", "c", "d", "e", "f", "full38"};
    return names;
}

FeatureRecipe replication_recipe(int reps, bool with_polynomial)
{
    FeatureRecipe r;
    r.steps = base_c_steps();
    if (with_polynomial) {
        r.steps.emplace_back(step::Polynomial{kTMax, kCanthi4});
        r.steps.emplace_back(step::Standardize{polynomial_names()});
    }
    if (reps > 0) {
        r.steps.emplace_back(step::Replicate{kTMax, reps});
    }
    r.name = (with_polynomial ? "e" : "c") + std::string("+rep") + std::to_string(reps);
    return r;
}

FeatureRecipe preset_recipe(const std::string& name)
{
    FeatureRecipe r;
    r.name = name;
    if (name == "a") {
        r.steps = {step::Select{correlation_bio_features(), false}, step::Standardize{}};
    } else if (name == "b") {
        r.steps = {
            step::Select{concat(correlation_bio_features(), {"Distance", "T_offset", "T_atm", "Humidity"}), false},
            step::Standardize{},
            step::OneHot{"Gender"},
        };
    } else if (name == "c") {
        r.steps = base_c_steps();
    } else if (name == "d") {
        r.steps = base_c_steps();
        r.steps.emplace_back(step::Replicate{kTMax, 5});
    } else if (name == "e") {
        r.steps = replication_recipe(0).steps;
    } else if (name == "f") {
        r.steps = replication_recipe(5).steps;
    } else if (name == "full38") {
        r.steps = {
            step::Select{{}, true},
            step::Ordinal{"Age"},
            step::Standardize{},
            step::OneHot{"Gender"},
            step::OneHot{"Ethnicity"},
        };
    } else {
        throw ConfigError("unknown recipe preset '" + name + "'");
    }
    return r;
}

FeatureRecipe resolve_recipe(const std::string& name_or_path)
{
    for (const auto& p : preset_names()) {
        if (p == name_or_path) {
            return preset_recipe(p);
        }
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw ConfigError("recipe '" + name_or_path + "' is neither a preset nor a readable file");
    }
    try {
        nlohmann::json j;
        in >> j;
        return FeatureRecipe::from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("recipe '" + name_or_path + "': " + e.what());
    }
}

nlohmann::json FeatureRecipe::to_json() const
{
    nlohmann::json steps_json = nlohmann::json::array();
    for (const auto& s : steps) {
        std::visit(overloaded{
                       [&](const step::Select& x) {
                           nlohmann::json j{{"op", "select"}, {"columns", x.columns}};
                           if (x.all_numeric) {
                               j["all_numeric"] = true;
                           }
                           steps_json.push_back(j);
                       },
                       [&](const step::Standardize& x) {
                           steps_json.push_back({{"op", "standardize"}, {"columns", x.columns}});
                       },
                       [&](const step::Ordinal& x) {
                           steps_json.push_back({{"op", "ordinal"}, {"variable", x.variable}});
                       },
                       [&](const step::OneHot& x) {
                           steps_json.push_back({{"op", "onehot"}, {"variable", x.variable}});
                       },
                       [&](const step::Polynomial& x) {
                           steps_json.push_back({{"op", "polynomial"}, {"features", {x.a, x.b}}});
                       },
                       [&](const step::Replicate& x) {
                           steps_json.push_back({{"op", "replicate"}, {"feature", x.feature}, {"count", x.count}});
                       },
                   },
                   s);
    }
    return {{"format_version", 1}, {"name", name}, {"steps", steps_json}};
}

FeatureRecipe FeatureRecipe::from_json(const nlohmann::json& j)
{
    try {
        FeatureRecipe r;
        r.name = j.value("name", std::string("custom"));
        for (const auto& s : j.at("steps")) {
            const auto op = s.at("op").get<std::string>();
            if (op == "select") {
                r.steps.emplace_back(step::Select{s.value("columns", std::vector<std::string>{}),
                                                  s.value("all_numeric", false)});
            } else if (op == "standardize") {
                r.steps.emplace_back(step::Standardize{s.value("columns", std::vector<std::string>{})});
            } else if (op == "ordinal") {
                r.steps.emplace_back(step::Ordinal{s.at("variable").get<std::string>()});
            } else if (op == "onehot") {
                r.steps.emplace_back(step::OneHot{s.at("variable").get<std::string>()});
            } else if (op == "polynomial") {
                auto f = s.at("features").get<std::vector<std::string>>();
                if (f.size() != 2) {
                    throw ConfigError("polynomial step needs exactly two features");
                }
                r.steps.emplace_back(step::Polynomial{f[0], f[1]});
            } else if (op == "replicate") {
                r.steps.emplace_back(step::Replicate{s.at("feature").get<std::string>(), s.at("count").get<int>()});
            } else {
                throw ConfigError("unknown recipe step '" + op + "'");
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("recipe: ") + e.what());
    }
}

FittedRecipe::FittedRecipe(FeatureRecipe recipe, const CleanDataset& fit_on, const Schema& schema)
    : recipe_(std::move(recipe)), schema_(schema)
{
    names_ = run(fit_on, &state_).names;
}

FeatureMatrix FittedRecipe::apply(const CleanDataset& ds) const
{
    return run(ds, nullptr);
}

FeatureMatrix FittedRecipe::run(const CleanDataset& ds, State* fit) const
{
    const State& state = fit != nullptr ? *fit : state_;
    const auto n = static_cast<Index>(ds.n_rows);
    FeatureMatrix m(Matrix(n, 0), {}, Eigen::Map<const Vector>(ds.target.data(), n));
    for (std::size_t i = 0; i < recipe_.steps.size(); ++i) {
        std::visit(overloaded{
                       [&](const step::Select& x) {
                           auto cols = x.all_numeric ? ds.numeric_names() : x.columns;
                           for (const auto& c : cols) {
                               const auto* col = ds.find(c);
                               if (col == nullptr) {
                                   throw DataError("recipe '" + recipe_.name + "' references missing column '" + c +
                                                   "'");
                               }
                               if (col->kind != DataColumn::Kind::numeric) {
                                   throw DataError("recipe '" + recipe_.name + "' selects categorical column '" + c +
                                                   "'; use an encoding step");
                               }
                               m.append(c, Eigen::Map<const Vector>(col->numbers.data(), n));
                           }
                       },
                       [&](const step::Standardize& x) {
                           if (fit != nullptr) {
                               fit->standardizers[i] = fit_standardizer(m, x.columns);
                           }
                           m = apply_standardizer(state.standardizers.at(i), m, false);
                       },
                       [&](const step::Ordinal& x) {
                           const auto& col = ds.categorical(x.variable);
                           m.append(x.variable, encode_ordinal(col.labels, schema_.ordinal_map(x.variable),
                                                               x.variable));
                       },
                       [&](const step::OneHot& x) {
                           const auto& col = ds.categorical(x.variable);
                           if (fit != nullptr) {
                               fit->onehots[i] = fit_onehot(x.variable, col.labels);
                           }
                           m.append(encode_onehot(state.onehots.at(i), col.labels));
                       },
                       [&](const step::Polynomial& x) { m = add_polynomial(m, x.a, x.b); },
                       [&](const step::Replicate& x) { m = replicate_feature(m, x.feature, x.count); },
                   },
                   recipe_.steps[i]);
    }
    m.validate();
    return m;
}

FeatureMatrix build_features(const CleanDataset& ds, const FeatureRecipe& recipe, const Schema& schema)
{
    return FittedRecipe(recipe, ds, schema).apply(ds);
}

} // namespace thermo
