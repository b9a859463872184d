#pragma once

#include "thermoreg/common.hpp"

namespace thermo {

struct LinearModel {
    Vector weights;
    double intercept = 0.0;

    Vector predict(const Matrix& x) const;
    bool operator==(const LinearModel&) const = default;
};

// Minimizes sum_i w_i (y_i - x_i.b - c)^2 + l2 ||b||^2 with the intercept c
// unpenalized. With l2 == 0 the minimum-norm solution is returned, so
// rank-deficient designs (e.g. replicated columns) are handled exactly.
// `sample_weights`, when given, must be positive.
LinearModel solve_least_squares(const Matrix& x, const Vector& y, double l2 = 0.0,
                                const Vector* sample_weights = nullptr);

} // namespace thermo
