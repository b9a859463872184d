#include "helpers.hpp"
#include "oracles.hpp"

#include "thermoreg/linear_models.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace thermo;
using testing::random_matrix;
using testing::random_vector;
using testing::normal_equation_oracle;

namespace {

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

double rmse(const Vector& a, const Vector& b) { return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size())); }

} // namespace

TEST_CASE("ols: two points give the line through them")
{
    Matrix x(2, 1);
    x << 0, 1;
    Vector y(2);
    y << 1, 3;
    const auto m = fit_linear(x, y);
    CHECK(m.weights(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ols: constant target gives zero weights and the constant intercept")
{
    Rng rng(3);
    const Matrix x = random_matrix(20, 4, rng);
    const Vector y = Vector::Constant(20, 36.8);
    const auto m = fit_linear(x, y);
    CHECK(max_abs(m.weights) < 1e-10);
    CHECK(m.intercept == doctest::Approx(36.8).epsilon(1e-12));
}

TEST_CASE("ols and ridge agree with the normal equations")
{
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 15 + trial * 3;
        const Index d = 1 + trial % 5;
        const Matrix x = random_matrix(n, d, rng);
        const Vector y = random_vector(n, rng);
        for (const double l2 : {0.0, 0.01, 1.0}) {
            const auto got = fit_linear(x, y, l2);
            const auto want = normal_equation_oracle(x, y, l2);
            CHECK(max_abs(got.weights - want.weights) < 1e-8);
            CHECK(std::abs(got.intercept - want.intercept) < 1e-8);
        }
    }
}

TEST_CASE("ols: residuals are orthogonal to every column and the intercept")
{
    Rng rng(5);
    const Matrix x = random_matrix(40, 6, rng, 3.0);
    const Vector y = random_vector(40, rng, 2.0);
    const auto m = fit_linear(x, y);
    const Vector r = y - m.predict(x);
    CHECK(max_abs(x.transpose() * r) < 1e-8);
    CHECK(std::abs(r.sum()) < 1e-8);
}

TEST_CASE("ridge: weight norm shrinks as the penalty grows")
{
    Rng rng(17);
    const Matrix x = random_matrix(30, 5, rng);
    const Vector y = random_vector(30, rng);
    double previous = fit_linear(x, y, 0.0).weights.norm();
    for (const double l2 : {0.1, 1.0, 10.0, 100.0}) {
        const double now = fit_linear(x, y, l2).weights.norm();
        CHECK(now <= previous + 1e-12);
        previous = now;
    }
}

TEST_CASE("ols: replicated columns split the weight and keep predictions")
{
    Rng rng(23);
    const Matrix x = random_matrix(25, 2, rng);
    const Vector y = random_vector(25, rng);
    Matrix rep(25, 4);
    rep << x.col(0), x.col(0), x.col(1), x.col(1);
    const auto base = fit_linear(x, y);
    const auto wide = fit_linear(rep, y);
    CHECK(max_abs(base.predict(x) - wide.predict(rep)) < 1e-9);
    CHECK(wide.weights(0) == doctest::Approx(base.weights(0) / 2.0).epsilon(1e-9));
    CHECK(wide.weights(3) == doctest::Approx(base.weights(1) / 2.0).epsilon(1e-9));
}

TEST_CASE("weighted solver: unit weights reduce to ols")
{
    Rng rng(29);
    const Matrix x = random_matrix(30, 3, rng);
    const Vector y = random_vector(30, rng);
    const Vector w = Vector::Ones(30);
    const auto a = solve_least_squares(x, y, 0.0, &w);
    const auto b = fit_linear(x, y);
    CHECK(max_abs(a.weights - b.weights) < 1e-9);
    CHECK(std::abs(a.intercept - b.intercept) < 1e-9);
}

TEST_CASE("duplicating every row leaves ols, quadratic and fixed-weight fits unchanged")
{
    Rng rng(31);
    const Matrix x = random_matrix(20, 3, rng);
    const Vector y = random_vector(20, rng);
    Matrix x2(40, 3);
    x2 << x, x;
    Vector y2(40);
    y2 << y, y;
    const Matrix probe = random_matrix(7, 3, rng);

    CHECK(max_abs(fit_linear(x, y).predict(probe) - fit_linear(x2, y2).predict(probe)) < 1e-9);
    CHECK(max_abs(fit_quadratic(x, y).predict(probe) - fit_quadratic(x2, y2).predict(probe)) < 1e-9);

    Vector w(20);
    for (Index i = 0; i < 20; ++i) {
        w(i) = 0.5 + rng.uniform();
    }
    Vector w2(40);
    w2 << w, w;
    const auto a = solve_least_squares(x, y, 0.0, &w);
    const auto b = solve_least_squares(x2, y2, 0.0, &w2);
    CHECK(max_abs(a.predict(probe) - b.predict(probe)) < 1e-9);
}

TEST_CASE("quadratic: expansion layout and exact recovery of y = x^2")
{
    Matrix x(2, 2);
    x << 1, 2, 3, 4;
    const Matrix e = polynomial_expansion(x, 2);
    REQUIRE(e.cols() == 5);
    CHECK(e(0, 2) == 1.0);
    CHECK(e(0, 3) == 4.0);
    CHECK(e(0, 4) == 2.0);
    CHECK(e(1, 4) == 12.0);

    Matrix t(9, 1);
    Vector y(9);
    for (Index i = 0; i < 9; ++i) {
        t(i, 0) = static_cast<double>(i) - 4.0;
        y(i) = t(i, 0) * t(i, 0);
    }
    const auto q = fit_quadratic(t, y);
    CHECK(rmse(q.predict(t), y) < 1e-9);
}

TEST_CASE("quadratic: degree one reduces to ols")
{
    Rng rng(37);
    const Matrix x = random_matrix(25, 3, rng);
    const Vector y = random_vector(25, rng);
    CHECK(max_abs(fit_quadratic(x, y, 1).predict(x) - fit_linear(x, y).predict(x)) < 1e-9);
}

TEST_CASE("quadratic: expansion beyond the column cap is refused")
{
    Rng rng(41);
    const Matrix x = random_matrix(10, 50, rng);
    CHECK_THROWS_AS(fit_quadratic(x, random_vector(10, rng), 2, 0.0, 100), ConfigError);
}

TEST_CASE("silverman bandwidth matches the hand formula")
{
    Vector v(6);
    v << 1, 2, 3, 4, 5, 10;
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().sum() / 5.0);
    // linear-interpolated quartiles of 1,2,3,4,5,10: 2.25 and 4.75
    const double iqr = 4.75 - 2.25;
    const double want = 0.9 * std::min(sd, iqr / 1.34) * std::pow(6.0, -0.2);
    CHECK(silverman_bandwidth(v) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("weighted: dense target region is down-weighted")
{
    Vector y(110);
    for (Index i = 0; i < 100; ++i) {
        y(i) = 37.0;
    }
    for (Index i = 0; i < 10; ++i) {
        y(100 + i) = 35.0 + 0.5 * static_cast<double>(i);
    }
    const Matrix x = Matrix::Zero(110, 1);
    const Vector w = inverse_density_weights(x, y, KdeSpace::target);
    for (Index i = 100; i < 110; ++i) {
        if (y(i) != 37.0) {
            CHECK(w(i) > w(0));
        }
    }
    CHECK(w.mean() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted: identical targets give a zero-bandwidth error")
{
    Rng rng(43);
    const Matrix x = random_matrix(10, 2, rng);
    CHECK_THROWS_AS(fit_weighted(x, Vector::Constant(10, 37.0)), DataError);
}

TEST_CASE("binning: one bin reduces to ols")
{
    Rng rng(47);
    const Matrix x = random_matrix(30, 3, rng);
    const Vector y = random_vector(30, rng);
    const auto b = fit_binning(x, y, 1, 0);
    CHECK(max_abs(b.predict(x) - fit_linear(x, y).predict(x)) < 1e-9);
}

TEST_CASE("binning: piecewise-constant target is fitted exactly")
{
    Matrix x(60, 1);
    Vector y(60);
    for (Index i = 0; i < 60; ++i) {
        x(i, 0) = static_cast<double>(i) + 0.5;
        y(i) = i < 20 ? 1.0 : (i < 40 ? 5.0 : -2.0);
    }
    const auto b = fit_binning(x, y, 3, 0, BinScheme::equal_width);
    CHECK(rmse(b.predict(x), y) < 1e-9);
    const auto f = fit_binning(x, y, 3, 0, BinScheme::equal_frequency);
    CHECK(rmse(f.predict(x), y) < 1e-9);
}

TEST_CASE("binning: values outside the training range use the edge bins")
{
    Matrix x(60, 1);
    Vector y(60);
    for (Index i = 0; i < 60; ++i) {
        x(i, 0) = static_cast<double>(i);
        y(i) = i < 30 ? 1.0 : 2.0;
    }
    const auto b = fit_binning(x, y, 2, 0);
    CHECK(b.bin_of(-100.0) == 0);
    CHECK(b.bin_of(1000.0) == 1);
}

TEST_CASE("piecewise: zero breakpoints reduce to ols")
{
    Rng rng(53);
    const Matrix x = random_matrix(30, 3, rng);
    const Vector y = random_vector(30, rng);
    const auto p = fit_piecewise(x, y, 0, 1);
    CHECK(p.knots.empty());
    CHECK(max_abs(p.predict(x) - fit_linear(x, y).predict(x)) < 1e-9);
}

TEST_CASE("piecewise: |x| gives slopes -1 and +1 around the median knot")
{
    Matrix x(21, 1);
    Vector y(21);
    for (Index i = 0; i < 21; ++i) {
        x(i, 0) = static_cast<double>(i) - 10.0;
        y(i) = std::abs(x(i, 0));
    }
    const auto p = fit_piecewise(x, y, 1, 0);
    REQUIRE(p.knots.size() == 1);
    CHECK(p.knots[0] == doctest::Approx(0.0));
    CHECK(p.inner.weights(0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(p.inner.weights(0) + p.inner.weights(1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rmse(p.predict(x), y) < 1e-9);
}

TEST_CASE("quantile interpolates linearly")
{
    CHECK(quantile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
    CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
    CHECK_THROWS_AS(quantile({}, 0.5), DataError);
}
