#include "helpers.hpp"

#include "thermoreg/ingest.hpp"
#include "thermoreg/least_squares.hpp"
#include "thermoreg/recipe.hpp"
#include "thermoreg/synthetic.hpp"

#include <doctest.h>

#include <algorithm>

using namespace thermo;

namespace {

const CleanDataset& synthetic_dataset()
{
    static const CleanDataset ds = [] {
        testing::WarningCapture quiet;
        const auto raw = make_synthetic_flir(SyntheticOptions{300, 21, 4, 0.004});
        const auto schema = default_flir_schema();
        return average_rounds(clean(raw, schema), schema.round_groups(raw.names()));
    }();
    return ds;
}

} // namespace

TEST_CASE("recipe presets produce the expected feature counts")
{
    const auto& ds = synthetic_dataset();
    const std::vector<std::pair<std::string, Index>> expected{{"a", 7}, {"b", 13}, {"c", 12},
                                                              {"d", 17}, {"e", 15}, {"f", 20}};
    for (const auto& [name, count] : expected) {
        const auto m = build_features(ds, preset_recipe(name), default_flir_schema());
        CHECK_MESSAGE(m.cols() == count, "recipe " << name);
        m.validate();
    }
}

TEST_CASE("recipe (f) contains the engineered columns")
{
    const auto m = build_features(synthetic_dataset(), preset_recipe("f"), default_flir_schema());
    for (const auto& f : correlation_bio_features()) {
        CHECK(m.has(f));
    }
    for (const char* f : {"T_offset", "T_atm", "Humidity", "Gender_Female", "Gender_Male"}) {
        CHECK(m.has(f));
    }
    CHECK_FALSE(m.has("Distance"));
    CHECK(m.has(square_name("T_Max_1")));
    CHECK(m.has(square_name("canthi4Max_1")));
    CHECK(m.has(interaction_name("T_Max_1", "canthi4Max_1")));
    for (int k = 1; k <= 5; ++k) {
        CHECK(m.column(replica_name("T_Max_1", k)) == m.column("T_Max_1"));
    }
    CHECK(m.names.back() == replica_name("T_Max_1", 5));
}

TEST_CASE("full38 recipe encodes age and both categoricals")
{
    const auto m = build_features(synthetic_dataset(), preset_recipe("full38"), default_flir_schema());
    CHECK(m.has("Age"));
    CHECK(m.has("Gender_Male"));
    CHECK(std::any_of(m.names.begin(), m.names.end(), [](const auto& n) { return n.rfind("Ethnicity_", 0) == 0; }));
    CHECK(m.has("Distance"));
}

TEST_CASE("recipe JSON round trip")
{
    for (const auto& name : preset_names()) {
        const auto r = preset_recipe(name);
        const auto back = FeatureRecipe::from_json(r.to_json());
        CHECK(back.to_json() == r.to_json());
    }
    CHECK(resolve_recipe("f").name == "f");
    CHECK_THROWS_AS(resolve_recipe("no-such-recipe"), ConfigError);
}

TEST_CASE("fitted recipe uses training statistics only")
{
    const auto& ds = synthetic_dataset();
    auto [train, test] = split(ds, SplitSpec{0.3, 4, false});
    FittedRecipe fitted(preset_recipe("a"), train, default_flir_schema());
    const auto tr = fitted.apply(train);
    const auto te = fitted.apply(test);
    CHECK(tr.values.colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
    CHECK(te.values.colwise().mean().cwiseAbs().maxCoeff() > 1e-6);
    CHECK(te.names == tr.names);
    CHECK(fitted.feature_names() == tr.names);
}

TEST_CASE("replication leaves minimum-norm OLS predictions unchanged")
{
    const auto& ds = synthetic_dataset();
    const auto e = build_features(ds, preset_recipe("e"), default_flir_schema());
    const auto f = build_features(ds, preset_recipe("f"), default_flir_schema());
    const auto pe = solve_least_squares(e.values, e.y()).predict(e.values);
    const auto pf = solve_least_squares(f.values, f.y()).predict(f.values);
    CHECK((pe - pf).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("replication recipe sweep")
{
    const auto& ds = synthetic_dataset();
    const auto zero = build_features(ds, replication_recipe(0), default_flir_schema());
    const auto e = build_features(ds, preset_recipe("e"), default_flir_schema());
    CHECK(zero.names == e.names);
    CHECK(zero.values == e.values);
    CHECK(build_features(ds, replication_recipe(5), default_flir_schema()).names ==
          build_features(ds, preset_recipe("f"), default_flir_schema()).names);
}
