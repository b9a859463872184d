#pragma once

// Reference solvers written independently of the library code paths.

#include "thermoreg/least_squares.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace testing {

// Normal equations on the intercept-augmented design, solved by Cholesky.
// Valid for full-rank designs.
inline thermo::LinearModel normal_equation_oracle(const thermo::Matrix& x, const thermo::Vector& y, double l2)
{
    using thermo::Index;
    const Index n = x.rows();
    const Index d = x.cols();
    thermo::Matrix a(n, d + 1);
    a.leftCols(d) = x;
    a.col(d).setOnes();
    thermo::Matrix g = a.transpose() * a;
    for (Index k = 0; k < d; ++k) {
        g(k, k) += l2;
    }
    const thermo::Vector beta = g.llt().solve(a.transpose() * y);
    thermo::LinearModel out;
    out.weights = beta.head(d);
    out.intercept = beta(d);
    return out;
}

struct SvrOracleResult {
    thermo::Vector beta;
    double objective = std::numeric_limits<double>::infinity();
};

// Exhaustive active-set search for the epsilon-SVR dual over
// beta = alpha - alpha*. Each point is fixed at -C, 0 or +C, or free with
// a fixed sign; free coordinates solve the equality-constrained
// stationarity system. The problem is convex, so the feasible candidate
// with the lowest objective is the optimum. Cost is 5^n solves.
inline SvrOracleResult enumerate_svr(const thermo::Matrix& k, const thermo::Vector& y, double c, double eps)
{
    using thermo::Index;
    using thermo::Matrix;
    using thermo::Vector;
    const Index n = y.size();
    SvrOracleResult best;
    long total = 1;
    for (Index i = 0; i < n; ++i) {
        total *= 5;
    }
    for (long code = 0; code < total; ++code) {
        long rest = code;
        std::vector<Index> free;
        Vector beta = Vector::Zero(n);
        Vector sign = Vector::Zero(n);
        for (Index i = 0; i < n; ++i) {
            const int s = static_cast<int>(rest % 5);
            rest /= 5;
            if (s == 1) {
                beta(i) = c;
            } else if (s == 2) {
                beta(i) = -c;
            } else if (s == 3 || s == 4) {
                sign(i) = s == 3 ? 1.0 : -1.0;
                free.push_back(i);
            }
        }
        const Index f = static_cast<Index>(free.size());
        if (f == 0) {
            if (std::abs(beta.sum()) > 1e-12) {
                continue;
            }
        } else {
            Matrix a = Matrix::Zero(f + 1, f + 1);
            Vector rhs(f + 1);
            for (Index r = 0; r < f; ++r) {
                const Index i = free[static_cast<std::size_t>(r)];
                for (Index s = 0; s < f; ++s) {
                    a(r, s) = k(i, free[static_cast<std::size_t>(s)]);
                }
                a(r, f) = 1.0;
                a(f, r) = 1.0;
                rhs(r) = y(i) - eps * sign(i) - k.row(i).dot(beta);
            }
            rhs(f) = -beta.sum();
            Eigen::FullPivLU<Matrix> lu(a);
            if (!lu.isInvertible()) {
                continue;
            }
            const Vector sol = lu.solve(rhs);
            bool ok = true;
            for (Index r = 0; r < f; ++r) {
                const Index i = free[static_cast<std::size_t>(r)];
                if (sol(r) * sign(i) < -1e-12 || std::abs(sol(r)) > c + 1e-12) {
                    ok = false;
                }
                beta(i) = sol(r);
            }
            if (!ok) {
                continue;
            }
        }
        const double obj = 0.5 * beta.dot(k * beta) + eps * beta.cwiseAbs().sum() - y.dot(beta);
        if (obj < best.objective) {
            best.objective = obj;
            best.beta = beta;
        }
    }
    return best;
}

} // namespace testing
