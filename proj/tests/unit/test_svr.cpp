#include "helpers.hpp"
#include "oracles.hpp"

#include "thermoreg/svr.hpp"

#include <doctest.h>

#include <cmath>

using namespace thermo;
using testing::random_matrix;
using testing::random_vector;


TEST_CASE("rbf kernel values and scale gamma")
{
    Vector u(2), v(2);
    u << 0, 0;
    v << 1, 1;
    CHECK(rbf_kernel(u, v, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(rbf_kernel(u, u, 3.0) == 1.0);
    Matrix x(2, 2);
    x << 0, 2, 2, 0;
    // four entries with mean 1 and population variance 1
    CHECK(scale_gamma(x) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("svr: constant target gives zero coefficients and that constant as bias")
{
    Rng rng(1);
    const Matrix x = random_matrix(15, 3, rng);
    const auto m = fit_svr(x, Vector::Constant(15, 37.0), 1.0, 0.1, 0.3, 1e-8);
    CHECK(m.dual_coefs.size() == 0);
    CHECK(m.bias == doctest::Approx(37.0).epsilon(1e-9));
    const Vector p = m.predict(random_matrix(4, 3, rng));
    CHECK((p.array() - 37.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("svr: smo matches exhaustive active-set enumeration on six points")
{
    Rng rng(21);
    for (int trial = 0; trial < 4; ++trial) {
        const Matrix x = random_matrix(6, 2, rng);
        const Vector y = random_vector(6, rng, 1.5);
        const double c = trial % 2 == 0 ? 1.0 : 0.3;
        const double eps = 0.1;
        const Matrix k = rbf_gram(x, x, 0.7);
        const auto smo = solve_svr_dual(k, y, c, eps, 1e-10);
        const auto oracle = testing::enumerate_svr(k, y, c, eps);
        REQUIRE(std::isfinite(oracle.objective));
        CHECK(smo.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
        CHECK((smo.coefficients() - oracle.beta).cwiseAbs().maxCoeff() < 1e-4);
        CHECK(svr_dual_objective(k, y, eps, smo.alpha, smo.alpha_star) ==
              doctest::Approx(smo.objective).epsilon(1e-12));
    }
}

TEST_CASE("svr: solution satisfies the KKT conditions")
{
    Rng rng(33);
    const Index n = 40;
    const Matrix x = random_matrix(n, 3, rng);
    const Vector y = random_vector(n, rng);
    const double c = 2.0;
    const double eps = 0.1;
    const Matrix k = rbf_gram(x, x, scale_gamma(x));
    const auto sol = solve_svr_dual(k, y, c, eps, 1e-9);
    const Vector beta = sol.coefficients();
    CHECK(std::abs(beta.sum()) < 1e-9);
    CHECK(sol.alpha.minCoeff() >= 0.0);
    CHECK(sol.alpha_star.minCoeff() >= 0.0);
    CHECK(sol.alpha.maxCoeff() <= c);
    CHECK(sol.alpha_star.maxCoeff() <= c);
    const Vector resid = y - (k * beta).array().matrix() - Vector::Constant(n, sol.bias);
    const double tol = 1e-6;
    for (Index i = 0; i < n; ++i) {
        const double b = beta(i);
        if (b == 0.0) {
            CHECK(std::abs(resid(i)) <= eps + tol);
        } else if (b > 0.0 && b < c) {
            CHECK(std::abs(resid(i) - eps) <= tol);
        } else if (b < 0.0 && b > -c) {
            CHECK(std::abs(resid(i) + eps) <= tol);
        } else if (b >= c) {
            CHECK(resid(i) >= eps - tol);
        } else {
            CHECK(resid(i) <= -eps + tol);
        }
    }
}

TEST_CASE("svr: invalid hyperparameters are rejected")
{
    Rng rng(4);
    const Matrix x = random_matrix(5, 2, rng);
    const Vector y = random_vector(5, rng);
    CHECK_THROWS_AS(fit_svr(x, y, 0.0, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(fit_svr(x, y, 1.0, -0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(fit_svr(x, y, 1.0, 0.1, 0.0), ConfigError);
}

TEST_CASE("svr: iteration cap raises a numerical error")
{
    Rng rng(8);
    const Matrix x = random_matrix(30, 2, rng);
    const Vector y = random_vector(30, rng, 3.0);
    CHECK_THROWS_AS(fit_svr(x, y, 10.0, 0.01, 1.0, 1e-12, 2), NumericalError);
}
