#include "thermoreg/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace thermo {

double rbf_kernel(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v, double gamma)
{
    return std::exp(-gamma * (u - v).squaredNorm());
}

Matrix rbf_gram(const Matrix& a, const Matrix& b, double gamma)
{
    const Vector na = a.rowwise().squaredNorm();
    const Vector nb = b.rowwise().squaredNorm();
    Matrix d2 = -2.0 * a * b.transpose();
    d2.colwise() += na;
    d2.rowwise() += nb.transpose();
    return (-gamma * d2.array().max(0.0)).exp().matrix();
}

double scale_gamma(const Matrix& x)
{
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    if (!(var > 0.0)) {
        return 1.0;
    }
    return 1.0 / (static_cast<double>(x.cols()) * var);
}

double svr_dual_objective(const Matrix& kernel, const Vector& y, double epsilon, const Vector& alpha,
                          const Vector& alpha_star)
{
    const Vector theta = alpha - alpha_star;
    return 0.5 * theta.dot(kernel * theta) + epsilon * (alpha + alpha_star).sum() - y.dot(theta);
}

SvrDualSolution solve_svr_dual(const Matrix& kernel, const Vector& y, double c, double epsilon, double tolerance,
                               long max_iterations)
{
    const Index n = y.size();
    if (kernel.rows() != n || kernel.cols() != n) {
        throw DataError("svr: kernel matrix shape mismatch");
    }
    if (!(c > 0.0) || epsilon < 0.0) {
        throw ConfigError("svr requires C > 0 and epsilon >= 0");
    }
    constexpr double tau = 1e-12;
    const Index l = 2 * n;
    // variable t < n is alpha_t (sign +1); t >= n is alpha*_{t-n} (sign -1)
    auto sign = [n](Index t) { return t < n ? 1.0 : -1.0; };
    auto row = [n](Index t) { return t < n ? t : t - n; };

    std::vector<double> a(static_cast<std::size_t>(l), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(l));
    for (Index t = 0; t < n; ++t) {
        grad[static_cast<std::size_t>(t)] = epsilon - y(t);
        grad[static_cast<std::size_t>(t + n)] = epsilon + y(t);
    }

    SvrDualSolution sol;
    long iter = 0;
    double gap = std::numeric_limits<double>::infinity();
    while (true) {
        // maximal violating i, then j by second-order gain
        double gmax = -std::numeric_limits<double>::infinity();
        Index i = -1;
        for (Index t = 0; t < l; ++t) {
            const double g = grad[static_cast<std::size_t>(t)];
            const double at = a[static_cast<std::size_t>(t)];
            if (sign(t) > 0) {
                if (at < c && -g >= gmax) {
                    gmax = -g;
                    i = t;
                }
            } else if (at > 0 && g >= gmax) {
                gmax = g;
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        Index j = -1;
        const Index ri = i >= 0 ? row(i) : 0;
        for (Index t = 0; t < l; ++t) {
            const double g = grad[static_cast<std::size_t>(t)];
            const double at = a[static_cast<std::size_t>(t)];
            double diff = 0.0;
            if (sign(t) > 0) {
                if (!(at > 0)) {
                    continue;
                }
                gmax2 = std::max(gmax2, g);
                diff = gmax + g;
            } else {
                if (!(at < c)) {
                    continue;
                }
                gmax2 = std::max(gmax2, -g);
                diff = gmax - g;
            }
            if (i >= 0 && diff > 0) {
                const Index rt = row(t);
                double quad = kernel(ri, ri) + kernel(rt, rt) - 2.0 * kernel(ri, rt);
                if (quad <= 0) {
                    quad = tau;
                }
                const double gain = -(diff * diff) / quad;
                if (gain <= best) {
                    best = gain;
                    j = t;
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < tolerance || i < 0 || j < 0) {
            break;
        }
        if (iter >= max_iterations) {
            throw NumericalError("svr: no convergence after " + std::to_string(iter) +
                                 " iterations (KKT violation " + format_double(gap) + ")");
        }
        ++iter;

        const Index rj = row(j);
        const double yi = sign(i);
        const double yj = sign(j);
        const double kij = kernel(ri, rj);
        double quad = kernel(ri, ri) + kernel(rj, rj) - 2.0 * kij;
        if (quad <= 0) {
            quad = tau;
        }
        double& ai = a[static_cast<std::size_t>(i)];
        double& aj = a[static_cast<std::size_t>(j)];
        const double old_i = ai;
        const double old_j = aj;
        const double gi = grad[static_cast<std::size_t>(i)];
        const double gj = grad[static_cast<std::size_t>(j)];
        if (yi != yj) {
            const double delta = (-gi - gj) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0) {
                if (aj < 0) {
                    aj = 0;
                    ai = diff;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = -diff;
            }
            if (diff > 0) {
                if (ai > c) {
                    ai = c;
                    aj = c - diff;
                }
            } else if (aj > c) {
                aj = c;
                ai = c + diff;
            }
        } else {
            const double delta = (gi - gj) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c) {
                if (ai > c) {
                    ai = c;
                    aj = sum - c;
                }
            } else if (aj < 0) {
                aj = 0;
                ai = sum;
            }
            if (sum > c) {
                if (aj > c) {
                    aj = c;
                    ai = sum - c;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        // Q_ts = s_t s_u K
        for (Index t = 0; t < l; ++t) {
            const Index rt = row(t);
            grad[static_cast<std::size_t>(t)] +=
                sign(t) * (yi * kernel(rt, ri) * di + yj * kernel(rt, rj) * dj);
        }
    }

    // bias from free variables, else midpoint of the feasible interval
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int n_free = 0;
    for (Index t = 0; t < l; ++t) {
        const double at = a[static_cast<std::size_t>(t)];
        const double yg = sign(t) * grad[static_cast<std::size_t>(t)];
        const bool upper = at >= c;
        const bool lower = at <= 0;
        if (sign(t) > 0) {
            if (upper) {
                lb = std::max(lb, yg);
            } else if (lower) {
                ub = std::min(ub, yg);
            } else {
                free_sum += yg;
                ++n_free;
            }
        } else {
            if (upper) {
                ub = std::min(ub, yg);
            } else if (lower) {
                lb = std::max(lb, yg);
            } else {
                free_sum += yg;
                ++n_free;
            }
        }
    }
    const double rho = n_free > 0 ? free_sum / n_free : 0.5 * (ub + lb);

    sol.alpha.resize(n);
    sol.alpha_star.resize(n);
    for (Index t = 0; t < n; ++t) {
        sol.alpha(t) = a[static_cast<std::size_t>(t)];
        sol.alpha_star(t) = a[static_cast<std::size_t>(t + n)];
    }
    sol.bias = -rho;
    sol.iterations = iter;
    sol.violation = std::max(gap, 0.0);
    sol.objective = svr_dual_objective(kernel, y, epsilon, sol.alpha, sol.alpha_star);
    return sol;
}

Vector SvrModel::predict(const Matrix& x) const
{
    if (support_vectors.rows() == 0) {
        return Vector::Constant(x.rows(), bias);
    }
    if (x.cols() != support_vectors.cols()) {
        throw DataError("svr: column count mismatch");
    }
    Vector out = rbf_gram(x, support_vectors, gamma) * dual_coefs;
    out.array() += bias;
    return out;
}

SvrModel fit_svr(const Matrix& x, const Vector& y, double c, double epsilon, double gamma, double tolerance,
                 long max_iterations)
{
    if (!(gamma > 0.0)) {
        throw ConfigError("svr gamma must be positive");
    }
    if (x.rows() > 20000) {
        throw ConfigError("svr: kernel matrix for " + std::to_string(x.rows()) + " rows exceeds memory budget");
    }
    const Matrix kernel = rbf_gram(x, x, gamma);
    const auto sol = solve_svr_dual(kernel, y, c, epsilon, tolerance, max_iterations);
    const Vector coef = sol.coefficients();
    std::vector<Index> support;
    for (Index i = 0; i < coef.size(); ++i) {
        if (coef(i) != 0.0) {
            support.push_back(i);
        }
    }
    SvrModel model;
    model.support_vectors.resize(static_cast<Index>(support.size()), x.cols());
    model.dual_coefs.resize(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
        model.support_vectors.row(static_cast<Index>(s)) = x.row(support[s]);
        model.dual_coefs(static_cast<Index>(s)) = coef(support[s]);
    }
    model.bias = sol.bias;
    model.gamma = gamma;
    model.c = c;
    model.epsilon = epsilon;
    return model;
}

} // namespace thermo
