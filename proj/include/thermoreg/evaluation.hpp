#pragma once

#include "thermoreg/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace thermo {

struct Metrics {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    Index n = 0;
};

Metrics compute_metrics(const Vector& y, const Vector& predicted);

// Mean and sample standard deviation (zero for a single value).
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

// Row-to-fold assignment: seeded shuffle, then contiguous blocks with the
// first n % k folds one row larger.
struct FoldPlan {
    int n_folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> assignment;

    Index rows() const { return static_cast<Index>(assignment.size()); }
    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;
    std::vector<Index> fold_sizes() const;
};

FoldPlan kfold_plan(Index n_rows, int n_folds, std::uint64_t seed);

struct CvResult {
    std::vector<Metrics> folds;
    double rmse_mean = 0.0; // mean of per-fold RMSE
    double rmse_std = 0.0;
};

CvResult cross_validate(const EstimatorSpec& spec, const FeatureMatrix& m, const FoldPlan& plan);

// Fixed-family hyperparameter grid; each point overrides family defaults.
struct GridSpec {
    Family family = Family::linear;
    std::map<std::string, HpValue> base;
    std::vector<std::map<std::string, HpValue>> grid;

    EstimatorSpec point(std::size_t i) const;
    void validate() const;
};

GridSpec knn_grid(int k_min = 1, int k_max = 30);
GridSpec forest_grid(std::uint64_t seed);

struct GridSearchResult {
    std::vector<double> rmse_mean; // per grid point
    std::size_t best = 0;          // smallest index among minima
};

GridSearchResult grid_search(const GridSpec& grid, const FeatureMatrix& m, const FoldPlan& plan);

struct NestedFold {
    int fold = 0;
    std::vector<double> inner_rmse_mean;
    std::size_t winner = 0;
    Metrics outer;
    std::vector<std::size_t> outer_train;
    std::vector<std::size_t> outer_test;
    // Original row indices seen by the inner search.
    std::vector<std::size_t> inner_rows;
};

struct NestedCvResult {
    std::vector<NestedFold> folds;
    std::size_t best_index = 0; // mode of per-fold winners
    EstimatorSpec best;
    double outer_rmse_mean = 0.0;
    double outer_rmse_std = 0.0;
};

NestedCvResult nested_cv(const FeatureMatrix& m, const GridSpec& grid, const FoldPlan& outer, int inner_folds = 5);

// Columns: fold, grid_point, inner_rmse_mean, outer_rmse. The outer RMSE
// is filled on the row of the grid point selected for that fold.
void write_cv_csv(std::ostream& out, const NestedCvResult& r);

} // namespace thermo
