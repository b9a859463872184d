#pragma once

#include "thermoreg/common.hpp"

namespace thermo {

double rbf_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v, double gamma);
Matrix rbf_gram(const Matrix& a, const Matrix& b, double gamma);

// 1 / (d * Var(X)) over all entries of the design matrix.
double scale_gamma(const Matrix& x);

struct SvrDualSolution {
    Vector alpha;      // multipliers of the upper tube constraints
    Vector alpha_star; // multipliers of the lower tube constraints
    double bias = 0.0;
    double objective = 0.0; // dual objective in minimization form
    double violation = 0.0; // maximal KKT violation at exit
    long iterations = 0;

    Vector coefficients() const { return alpha - alpha_star; }
};

// Epsilon-SVR dual over a precomputed kernel matrix, solved by SMO with
// second-order working-set selection:
//   min 1/2 (a - a*)' K (a - a*) + eps * sum(a + a*) - y'(a - a*)
//   s.t. sum(a - a*) = 0, 0 <= a, a* <= C.
// Throws NumericalError when `max_iterations` is reached first.
SvrDualSolution solve_svr_dual(const Matrix& kernel, const Vector& y, double c, double epsilon,
                               double tolerance = 1e-4, long max_iterations = 10'000'000);

// Dual objective value for given multipliers.
double svr_dual_objective(const Matrix& kernel, const Vector& y, double epsilon, const Vector& alpha,
                          const Vector& alpha_star);

struct SvrModel {
    Matrix support_vectors;
    Vector dual_coefs;
    double bias = 0.0;
    double gamma = 1.0;
    double c = 1.0;
    double epsilon = 0.1;

    Vector predict(const Matrix& x) const;
};

SvrModel fit_svr(const Matrix& x, const Vector& y, double c, double epsilon, double gamma, double tolerance = 1e-4,
                 long max_iterations = 10'000'000);

} // namespace thermo
