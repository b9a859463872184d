#include "helpers.hpp"

#include "thermoreg/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace thermo;
using testing::random_matrix;
using testing::random_vector;

TEST_CASE("metrics: hand example")
{
    Vector y(3), p(3);
    y << 1, 2, 3;
    p << 1, 2, 5;
    const auto m = compute_metrics(y, p);
    CHECK(m.mae == doctest::Approx(2.0 / 3.0));
    CHECK(m.mse == doctest::Approx(4.0 / 3.0));
    CHECK(m.rmse == doctest::Approx(std::sqrt(4.0 / 3.0)));
    CHECK(m.n == 3);
    CHECK_THROWS_AS(compute_metrics(y, Vector(2)), DataError);
    CHECK_THROWS_AS(compute_metrics(Vector(0), Vector(0)), DataError);
}

TEST_CASE("metrics: rmse squared equals mse and rmse bounds mae")
{
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const Vector y = random_vector(10 + t, rng);
        const Vector p = random_vector(10 + t, rng);
        const auto m = compute_metrics(y, p);
        CHECK(m.rmse * m.rmse == doctest::Approx(m.mse).epsilon(1e-12));
        CHECK(m.mae <= m.rmse + 1e-15);
    }
}

TEST_CASE("mean_std uses the sample deviation")
{
    const auto s = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(mean_std({7.0}).std == 0.0);
}

TEST_CASE("kfold: eleven rows in five folds")
{
    const auto plan = kfold_plan(11, 5, 3);
    CHECK(plan.fold_sizes() == std::vector<Index>{3, 2, 2, 2, 2});
    std::set<std::size_t> seen;
    for (int f = 0; f < 5; ++f) {
        const auto test = plan.test_rows(f);
        const auto train = plan.train_rows(f);
        CHECK(test.size() + train.size() == 11);
        for (const auto r : test) {
            CHECK(seen.insert(r).second);
            CHECK(std::find(train.begin(), train.end(), r) == train.end());
        }
    }
    CHECK(seen.size() == 11);
    CHECK(kfold_plan(11, 5, 3).assignment == plan.assignment);
    CHECK(kfold_plan(11, 5, 4).assignment != plan.assignment);
    CHECK_THROWS_AS(kfold_plan(4, 5, 0), ConfigError);
    CHECK_THROWS_AS(kfold_plan(10, 1, 0), ConfigError);
}

TEST_CASE("cross_validate: mean of fold rmse matches a manual loop")
{
    Rng rng(2);
    const Matrix x = random_matrix(40, 2, rng);
    const Vector y = x.col(0) + random_vector(40, rng, 0.2);
    const FeatureMatrix m(x, {"a", "b"}, y);
    const auto plan = kfold_plan(40, 4, 9);
    const EstimatorSpec spec(Family::knn, {{"n_neighbors", 3.0}});
    const auto cv = cross_validate(spec, m, plan);
    double sum = 0.0;
    for (int f = 0; f < 4; ++f) {
        const auto model = fit(spec, m.take_rows(plan.train_rows(f)));
        const auto test = m.take_rows(plan.test_rows(f));
        sum += compute_metrics(test.y(), model.predict(test)).rmse;
    }
    CHECK(cv.rmse_mean == doctest::Approx(sum / 4.0).epsilon(1e-12));
}

TEST_CASE("nested cv: singleton grid equals plain k-fold")
{
    Rng rng(3);
    const Matrix x = random_matrix(50, 3, rng);
    const Vector y = x.col(1) * 2.0 + random_vector(50, rng, 0.3);
    const FeatureMatrix m(x, {"a", "b", "c"}, y);
    GridSpec grid;
    grid.family = Family::knn;
    grid.grid = {{{"n_neighbors", 4.0}}};
    const auto outer = kfold_plan(50, 5, 1);
    const auto nested = nested_cv(m, grid, outer, 3);
    const auto plain = cross_validate(grid.point(0), m, outer);
    CHECK(nested.outer_rmse_mean == doctest::Approx(plain.rmse_mean).epsilon(1e-12));
    CHECK(nested.best_index == 0);
}

TEST_CASE("nested cv: inner rows never include the outer test fold")
{
    Rng rng(4);
    const Matrix x = random_matrix(45, 2, rng);
    const FeatureMatrix m(x, {"a", "b"}, random_vector(45, rng));
    const auto r = nested_cv(m, knn_grid(1, 4), kfold_plan(45, 5, 2), 3);
    REQUIRE(r.folds.size() == 5);
    for (const auto& f : r.folds) {
        const std::set<std::size_t> test(f.outer_test.begin(), f.outer_test.end());
        for (const auto i : f.inner_rows) {
            CHECK(test.count(i) == 0);
        }
        CHECK(f.inner_rows.size() == f.outer_train.size());
    }
}

TEST_CASE("grid search: knn on a smooth noisy curve picks a moderate k")
{
    Rng rng(5);
    const Index n = 300;
    Matrix x(n, 1);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(0.0, 10.0);
        y(i) = std::sin(x(i, 0)) + rng.normal(0.0, 0.3);
    }
    const FeatureMatrix m(x, {"x"}, y);
    const auto r = grid_search(knn_grid(1, 30), m, kfold_plan(n, 5, 7));
    const int k = static_cast<int>(r.best) + 1;
    CAPTURE(k);
    CHECK(k >= 3);
    CHECK(k <= 30);
    CHECK(r.rmse_mean[r.best] < r.rmse_mean[0]);
}

TEST_CASE("grid search: ties go to the first grid point")
{
    Matrix x(10, 1);
    for (Index i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
    }
    const FeatureMatrix m(x, {"x"}, Vector::Constant(10, 2.0));
    const auto r = grid_search(knn_grid(1, 5), m, kfold_plan(10, 5, 0));
    CHECK(r.best == 0);
}

TEST_CASE("cv csv has one row per fold and grid point")
{
    Rng rng(6);
    const FeatureMatrix m(random_matrix(30, 2, rng), {"a", "b"}, random_vector(30, rng));
    const auto r = nested_cv(m, knn_grid(1, 3), kfold_plan(30, 3, 1), 3);
    std::ostringstream out;
    write_cv_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "fold,grid_point,inner_rmse_mean,outer_rmse");
    int rows = 0;
    int filled = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.back() != ',') {
            ++filled;
        }
    }
    CHECK(rows == 9);
    CHECK(filled == 3);
}
