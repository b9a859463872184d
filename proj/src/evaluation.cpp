#include "thermoreg/evaluation.hpp"

#include "thermoreg/csv.hpp"
#include "thermoreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace thermo {

Metrics compute_metrics(const Vector& y, const Vector& predicted)
{
    if (y.size() != predicted.size()) {
        throw DataError("metric inputs differ in length: " + std::to_string(y.size()) + " vs " +
                        std::to_string(predicted.size()));
    }
    if (y.size() == 0) {
        throw DataError("metrics need at least one value");
    }
    const Vector err = y - predicted;
    Metrics m;
    m.n = y.size();
    m.mae = err.cwiseAbs().mean();
    m.mse = err.squaredNorm() / static_cast<double>(m.n);
    m.rmse = std::sqrt(m.mse);
    return m;
}

MeanStd mean_std(const std::vector<double>& values)
{
    MeanStd r;
    if (values.empty()) {
        return r;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    r.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - r.mean) * (v - r.mean);
        }
        r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return r;
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<Index> FoldPlan::fold_sizes() const
{
    std::vector<Index> sizes(static_cast<std::size_t>(n_folds), 0);
    for (int a : assignment) {
        ++sizes[static_cast<std::size_t>(a)];
    }
    return sizes;
}

FoldPlan kfold_plan(Index n_rows, int n_folds, std::uint64_t seed)
{
    if (n_folds < 2) {
        throw ConfigError("number of folds must be at least 2");
    }
    if (n_rows < n_folds) {
        throw ConfigError("cannot split " + std::to_string(n_rows) + " rows into " + std::to_string(n_folds) +
                          " folds");
    }
    auto order = iota_indices(static_cast<std::size_t>(n_rows));
    Rng rng(seed);
    rng.shuffle(order);
    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignment.assign(static_cast<std::size_t>(n_rows), 0);
    const Index base = n_rows / n_folds;
    const Index extra = n_rows % n_folds;
    Index pos = 0;
    for (int f = 0; f < n_folds; ++f) {
        const Index size = base + (f < extra ? 1 : 0);
        for (Index i = 0; i < size; ++i) {
            plan.assignment[order[static_cast<std::size_t>(pos++)]] = f;
        }
    }
    return plan;
}

CvResult cross_validate(const EstimatorSpec& spec, const FeatureMatrix& m, const FoldPlan& plan)
{
    if (plan.rows() != m.rows()) {
        throw ConfigError("fold plan covers " + std::to_string(plan.rows()) + " rows but the matrix has " +
                          std::to_string(m.rows()));
    }
    CvResult r;
    std::vector<double> rmses;
    for (int f = 0; f < plan.n_folds; ++f) {
        const auto train_rows = plan.train_rows(f);
        const auto test_rows = plan.test_rows(f);
        if (test_rows.empty() || train_rows.empty()) {
            throw DataError("degenerate fold " + std::to_string(f));
        }
        const auto test = m.take_rows(test_rows);
        const auto model = fit(spec, m.take_rows(train_rows));
        r.folds.push_back(compute_metrics(test.y(), model.predict(test)));
        rmses.push_back(r.folds.back().rmse);
    }
    const auto ms = mean_std(rmses);
    r.rmse_mean = ms.mean;
    r.rmse_std = ms.std;
    return r;
}

EstimatorSpec GridSpec::point(std::size_t i) const
{
    auto hp = base;
    for (const auto& [k, v] : grid.at(i)) {
        hp[k] = v;
    }
    return EstimatorSpec(family, hp);
}

void GridSpec::validate() const
{
    if (grid.empty()) {
        throw ConfigError("hyperparameter grid is empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        point(i);
    }
}

GridSpec knn_grid(int k_min, int k_max)
{
    GridSpec g;
    g.family = Family::knn;
    for (int k = k_min; k <= k_max; ++k) {
        g.grid.push_back({{"n_neighbors", static_cast<double>(k)}});
    }
    return g;
}

GridSpec forest_grid(std::uint64_t seed)
{
    GridSpec g;
    g.family = Family::forest;
    g.base["seed"] = static_cast<double>(seed);
    for (int n : {50, 100, 150, 200, 250}) {
        g.grid.push_back({{"n_estimators", static_cast<double>(n)}});
    }
    return g;
}

GridSearchResult grid_search(const GridSpec& grid, const FeatureMatrix& m, const FoldPlan& plan)
{
    grid.validate();
    GridSearchResult r;
    for (std::size_t i = 0; i < grid.grid.size(); ++i) {
        r.rmse_mean.push_back(cross_validate(grid.point(i), m, plan).rmse_mean);
        if (r.rmse_mean[i] < r.rmse_mean[r.best]) {
            r.best = i;
        }
    }
    return r;
}

NestedCvResult nested_cv(const FeatureMatrix& m, const GridSpec& grid, const FoldPlan& outer, int inner_folds)
{
    grid.validate();
    if (inner_folds < 2) {
        throw ConfigError("inner folds must be at least 2");
    }
    if (outer.rows() != m.rows()) {
        throw ConfigError("outer fold plan does not match the matrix row count");
    }
    NestedCvResult r;
    std::vector<int> votes(grid.grid.size(), 0);
    std::vector<double> outer_rmse;
    for (int f = 0; f < outer.n_folds; ++f) {
        NestedFold nf;
        nf.fold = f;
        nf.outer_train = outer.train_rows(f);
        nf.outer_test = outer.test_rows(f);
        const auto train = m.take_rows(nf.outer_train);
        const auto inner = kfold_plan(train.rows(), inner_folds, derive_seed(outer.seed, static_cast<std::uint64_t>(f) + 1));
        nf.inner_rows = nf.outer_train;
        const auto search = grid_search(grid, train, inner);
        nf.inner_rmse_mean = search.rmse_mean;
        nf.winner = search.best;
        const auto test = m.take_rows(nf.outer_test);
        const auto model = fit(grid.point(nf.winner), train);
        nf.outer = compute_metrics(test.y(), model.predict(test));
        ++votes[nf.winner];
        outer_rmse.push_back(nf.outer.rmse);
        r.folds.push_back(std::move(nf));
    }
    r.best_index = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    r.best = grid.point(r.best_index);
    const auto ms = mean_std(outer_rmse);
    r.outer_rmse_mean = ms.mean;
    r.outer_rmse_std = ms.std;
    return r;
}

void write_cv_csv(std::ostream& out, const NestedCvResult& r)
{
    write_csv_row(out, {"fold", "grid_point", "inner_rmse_mean", "outer_rmse"});
    for (const auto& f : r.folds) {
        for (std::size_t g = 0; g < f.inner_rmse_mean.size(); ++g) {
            write_csv_row(out, {std::to_string(f.fold), std::to_string(g), format_double(f.inner_rmse_mean[g]),
                                g == f.winner ? format_double(f.outer.rmse) : std::string()});
        }
    }
}

} // namespace thermo
