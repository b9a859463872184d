#include "helpers.hpp"

#include "thermoreg/pca.hpp"

#include <doctest.h>

#include <cmath>

using namespace thermo;
using testing::random_matrix;

namespace {

Matrix sample_covariance(const Matrix& x)
{
    const Matrix c = x.rowwise() - x.colwise().mean();
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

} // namespace

TEST_CASE("pca: full rank reconstructs the input")
{
    Rng rng(1);
    const Matrix x = random_matrix(30, 4, rng);
    const auto p = pca_fit(x, 4);
    CHECK((pca_inverse(p, pca_transform(p, x)) - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca: points on y = 3x give the (1, 3) / sqrt(10) direction")
{
    Matrix x(5, 2);
    for (Index i = 0; i < 5; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = 3.0 * static_cast<double>(i);
    }
    const auto p = pca_fit(x, 1);
    CHECK(p.components(0, 0) == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));
    CHECK(p.components(0, 1) == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-12));
    CHECK(p.eigenvalues(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pca: spectrum sums to the covariance trace and components are orthonormal")
{
    Rng rng(2);
    Matrix x = random_matrix(50, 6, rng);
    x.col(1) += 2.0 * x.col(0);
    const auto p = pca_fit(x, 6);
    CHECK(p.eigenvalues.sum() == doctest::Approx(sample_covariance(x).trace()).epsilon(1e-12));
    const Matrix g = p.components * p.components.transpose();
    CHECK((g - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    for (Index i = 1; i < 6; ++i) {
        CHECK(p.eigenvalues(i) <= p.eigenvalues(i - 1));
    }
}

TEST_CASE("pca: the mean row maps to the origin and signs are fixed")
{
    Rng rng(3);
    const Matrix x = random_matrix(20, 3, rng);
    const auto p = pca_fit(x, 2);
    const Matrix mean_row = x.colwise().mean();
    CHECK(pca_transform(p, mean_row).cwiseAbs().maxCoeff() < 1e-12);
    for (Index r = 0; r < p.components.rows(); ++r) {
        Index arg = 0;
        p.components.row(r).cwiseAbs().maxCoeff(&arg);
        CHECK(p.components(r, arg) > 0.0);
    }
}

TEST_CASE("pca: minka rule recovers a three-dimensional latent structure")
{
    Rng rng(4);
    const Index n = 500;
    const Matrix z = random_matrix(n, 3, rng, 5.0);
    const Matrix mix = random_matrix(3, 10, rng);
    const Matrix x = z * mix + random_matrix(n, 10, rng, 0.1);
    CHECK(minka_mle_dimension(pca_fit(x, 10).eigenvalues, n) == 3);
    CHECK(pca_fit(x).k == 3);
}

TEST_CASE("pca: feature-matrix transform names components and keeps the target")
{
    Rng rng(5);
    const Matrix x = random_matrix(10, 3, rng);
    const Vector y = Vector::LinSpaced(10, 0.0, 1.0);
    const auto p = pca_fit(x, 2);
    const auto out = pca_transform(p, FeatureMatrix(x, {"a", "b", "c"}, y));
    CHECK(out.names == std::vector<std::string>{"pc1", "pc2"});
    CHECK(out.y() == y);
}
