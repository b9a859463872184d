#pragma once

#include "thermoreg/ingest.hpp"
#include "thermoreg/neuralnet.hpp"
#include "thermoreg/recipe.hpp"
#include "thermoreg/report.hpp"
#include "thermoreg/selection.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace thermo {

struct RunConfig {
    std::filesystem::path data;
    std::filesystem::path schema_path; // empty selects the built-in schema
    std::string recipe = "f";
    SplitSpec split;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::filesystem::path out = "results";
    ReportFormat format = ReportFormat::both;
    std::vector<std::string> models; // model-table row filter; empty means all
    int epochs = 1000;
    int jobs = 1;
    int max_reps = 10;
    int cv_folds = 5;
    int sbs_target = 11;
    std::vector<int> cnn_rows; // CNN-table row filter (0-based); empty means all
    bool nested = false;       // also run nested CV for the tuned model rows

    void validate() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j, RunConfig base);
    static RunConfig from_json(const nlohmann::json& j) { return from_json(j, RunConfig()); }
};

struct BenchContext {
    CleanDataset data;
    Schema schema;
    RunConfig cfg;

    nlohmann::json provenance() const;
};

BenchContext load_context(const RunConfig& cfg);

// Train/test feature matrices for one seed, with the recipe fitted on the
// training rows only.
struct SeedData {
    FeatureMatrix train;
    FeatureMatrix test;
};

SeedData prepare_seed(const BenchContext& ctx, const FeatureRecipe& recipe, std::uint64_t seed);

// Runs fn(0..count-1) on up to `jobs` threads; the first exception (by
// index) is rethrown after all tasks finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

ReportTable run_feature_table(const BenchContext& ctx);

// Row labels of the model comparison table in display order.
const std::vector<std::string>& model_table_labels();
ReportTable run_model_table(const BenchContext& ctx);

struct CnnRow {
    std::string label;
    int layers = 4;
    int filters = 16;
    int kernel_size = 3;
    double l2 = 0.01;
};
const std::vector<CnnRow>& cnn_table_rows();
ReportTable run_cnn_table(const BenchContext& ctx);

// Rows labelled "<pipeline> r=<reps>" for pipelines knn, ols, ridge.
ReportTable run_repetition_sweep(const BenchContext& ctx);

ReportTable run_sbs_audit(const BenchContext& ctx);

// Correlation ranking, single-feature RMSE, bio subset search, and the
// PCA comparison, all on the first seed's training split. Writes files
// under cfg.out and returns the written paths.
std::vector<std::filesystem::path> run_selection(const BenchContext& ctx);

} // namespace thermo
