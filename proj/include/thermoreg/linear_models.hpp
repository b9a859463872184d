#pragma once

#include "thermoreg/least_squares.hpp"

#include <string>
#include <vector>

namespace thermo {

// Ordinary (l2 == 0) or ridge regression.
LinearModel fit_linear(const Matrix& x, const Vector& y, double l2 = 0.0);

// Polynomial regression over the full expansion: original columns, then
// squares, then pairwise products (i < j). Degree 1 is the identity basis.
struct QuadraticModel {
    int degree = 2;
    LinearModel inner;

    Vector predict(const Matrix& x) const;
};

Matrix polynomial_expansion(const Matrix& x, int degree);
QuadraticModel fit_quadratic(const Matrix& x, const Vector& y, int degree = 2, double l2 = 0.0,
                             Index max_columns = 1000);

// h = 0.9 * min(sd, IQR / 1.34) * n^(-1/5). Falls back to sd when the IQR is zero.
double silverman_bandwidth(const Vector& values);
// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

enum class KdeSpace { target, feature };

// Inverse Gaussian-KDE density at each row, normalized to mean 1.
Vector inverse_density_weights(const Matrix& x, const Vector& y, KdeSpace space);
LinearModel fit_weighted(const Matrix& x, const Vector& y, KdeSpace space = KdeSpace::target);

enum class BinScheme { equal_width, equal_frequency };

// Local OLS per interval of one driver column. Values outside the training
// range route to the nearest bin; bins with too few rows for their own fit
// fall back to the global model.
struct BinnedModel {
    Index driver = 0;
    std::vector<double> edges;
    std::vector<LinearModel> per_bin;
    std::vector<bool> uses_fallback;
    LinearModel fallback;

    std::size_t bin_of(double value) const;
    Vector predict(const Matrix& x) const;
};

BinnedModel fit_binning(const Matrix& x, const Vector& y, int n_bins, Index driver,
                        BinScheme scheme = BinScheme::equal_width);

// Continuous piecewise-linear fit in the driver: OLS on the original
// columns plus hinges max(0, driver - knot) at driver quantiles.
struct PiecewiseModel {
    Index driver = 0;
    std::vector<double> knots;
    LinearModel inner;

    Matrix basis(const Matrix& x) const;
    Vector predict(const Matrix& x) const;
};

PiecewiseModel fit_piecewise(const Matrix& x, const Vector& y, int breakpoints, Index driver);

} // namespace thermo
