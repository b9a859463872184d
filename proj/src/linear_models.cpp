#include "thermoreg/linear_models.hpp"

#include <algorithm>
#include <cmath>

namespace thermo {

LinearModel fit_linear(const Matrix& x, const Vector& y, double l2)
{
    return solve_least_squares(x, y, l2);
}

Matrix polynomial_expansion(const Matrix& x, int degree)
{
    if (degree < 1 || degree > 2) {
        throw ConfigError("polynomial degree must be 1 or 2");
    }
    if (degree == 1) {
        return x;
    }
    const Index d = x.cols();
    Matrix out(x.rows(), 2 * d + d * (d - 1) / 2);
    out.leftCols(d) = x;
    out.middleCols(d, d) = x.array().square().matrix();
    Index col = 2 * d;
    for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) {
            out.col(col++) = x.col(i).cwiseProduct(x.col(j));
        }
    }
    return out;
}

Vector QuadraticModel::predict(const Matrix& x) const
{
    return inner.predict(polynomial_expansion(x, degree));
}

QuadraticModel fit_quadratic(const Matrix& x, const Vector& y, int degree, double l2, Index max_columns)
{
    const Index d = x.cols();
    const Index expanded = degree == 1 ? d : 2 * d + d * (d - 1) / 2;
    if (expanded > max_columns) {
        throw ConfigError("quadratic expansion would create " + std::to_string(expanded) + " columns (cap " +
                          std::to_string(max_columns) + ")");
    }
    return QuadraticModel{degree, solve_least_squares(polynomial_expansion(x, degree), y, l2)};
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw DataError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double silverman_bandwidth(const Vector& values)
{
    const Index n = values.size();
    if (n < 2) {
        throw DataError("bandwidth needs at least two values");
    }
    const double mean = values.mean();
    const double sd = std::sqrt((values.array() - mean).square().sum() / static_cast<double>(n - 1));
    std::vector<double> v(values.data(), values.data() + n);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

namespace {

// log of the Gaussian KDE density evaluated at every sample point
Vector log_density(const Matrix& points, const Vector& bandwidths)
{
    const Index n = points.rows();
    const Index d = points.cols();
    Vector out(n);
    std::vector<double> terms(static_cast<std::size_t>(n));
    double log_norm = -std::log(static_cast<double>(n));
    for (Index k = 0; k < d; ++k) {
        log_norm -= std::log(bandwidths(k)) + 0.5 * std::log(2.0 * M_PI);
    }
    for (Index i = 0; i < n; ++i) {
        double peak = -INFINITY;
        for (Index j = 0; j < n; ++j) {
            double e = 0.0;
            for (Index k = 0; k < d; ++k) {
                const double z = (points(i, k) - points(j, k)) / bandwidths(k);
                e -= 0.5 * z * z;
            }
            terms[static_cast<std::size_t>(j)] = e;
            peak = std::max(peak, e);
        }
        double s = 0.0;
        for (double t : terms) {
            s += std::exp(t - peak);
        }
        out(i) = log_norm + peak + std::log(s);
    }
    return out;
}

} // namespace

Vector inverse_density_weights(const Matrix& x, const Vector& y, KdeSpace space)
{
    const Index n = y.size();
    if (n < 3) {
        throw DataError("weighted regression needs at least 3 rows");
    }
    Matrix points;
    Vector bw;
    if (space == KdeSpace::target) {
        points = y;
        bw = Vector::Constant(1, silverman_bandwidth(y));
        if (!(bw(0) > 0.0)) {
            throw DataError("zero KDE bandwidth: all targets identical");
        }
    } else {
        // Silverman's multivariate rule per non-constant dimension
        std::vector<Index> keep;
        std::vector<double> h;
        const double factor = std::pow(4.0 / ((static_cast<double>(x.cols()) + 2.0) * static_cast<double>(n)),
                                       1.0 / (static_cast<double>(x.cols()) + 4.0));
        for (Index k = 0; k < x.cols(); ++k) {
            const double mean = x.col(k).mean();
            const double sd = std::sqrt((x.col(k).array() - mean).square().sum() / static_cast<double>(n - 1));
            if (sd > 0.0) {
                keep.push_back(k);
                h.push_back(sd * factor);
            }
        }
        if (keep.empty()) {
            throw DataError("zero KDE bandwidth: all feature columns constant");
        }
        points.resize(n, static_cast<Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) {
            points.col(static_cast<Index>(k)) = x.col(keep[k]);
        }
        bw = Eigen::Map<Vector>(h.data(), static_cast<Index>(h.size()));
    }
    const Vector ld = log_density(points, bw);
    // weight_i proportional to exp(-ld_i), scaled to mean 1
    const double shift = ld.minCoeff();
    Vector w = (-(ld.array() - shift)).exp().matrix();
    w *= static_cast<double>(n) / w.sum();
    return w;
}

LinearModel fit_weighted(const Matrix& x, const Vector& y, KdeSpace space)
{
    const Vector w = inverse_density_weights(x, y, space);
    return solve_least_squares(x, y, 0.0, &w);
}

std::size_t BinnedModel::bin_of(double value) const
{
    if (edges.size() <= 2) {
        return 0;
    }
    auto first = edges.begin() + 1;
    auto last = edges.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(first, last, value) - first);
}

Vector BinnedModel::predict(const Matrix& x) const
{
    Vector out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        const auto b = bin_of(x(i, driver));
        const LinearModel& m = uses_fallback[b] ? fallback : per_bin[b];
        out(i) = m.intercept + x.row(i).dot(m.weights);
    }
    return out;
}

BinnedModel fit_binning(const Matrix& x, const Vector& y, int n_bins, Index driver, BinScheme scheme)
{
    if (n_bins < 1) {
        throw ConfigError("n_bins must be at least 1");
    }
    if (driver < 0 || driver >= x.cols()) {
        throw ConfigError("binning driver column out of range");
    }
    BinnedModel model;
    model.driver = driver;
    model.fallback = solve_least_squares(x, y);
    const double lo = x.col(driver).minCoeff();
    const double hi = x.col(driver).maxCoeff();
    if (hi <= lo) {
        if (n_bins > 1) {
            warn("binning driver is constant; using a single bin");
        }
        model.edges = {lo, hi};
    } else if (scheme == BinScheme::equal_width) {
        for (int k = 0; k <= n_bins; ++k) {
            model.edges.push_back(k == n_bins ? hi : lo + (hi - lo) * k / n_bins);
        }
    } else {
        std::vector<double> v(x.col(driver).data(), x.col(driver).data() + x.rows());
        for (int k = 0; k <= n_bins; ++k) {
            const double e = quantile(v, static_cast<double>(k) / n_bins);
            if (model.edges.empty() || e > model.edges.back()) {
                model.edges.push_back(e);
            }
        }
        if (model.edges.size() < static_cast<std::size_t>(n_bins) + 1) {
            warn("equal-frequency bin edges collapsed to " + std::to_string(model.edges.size() - 1) + " bins");
        }
    }
    const std::size_t nb = model.edges.size() - 1;
    std::vector<std::vector<Index>> members(nb);
    for (Index i = 0; i < x.rows(); ++i) {
        members[model.bin_of(x(i, driver))].push_back(i);
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const auto& rows = members[b];
        if (static_cast<Index>(rows.size()) < x.cols() + 1) {
            model.per_bin.push_back(model.fallback);
            model.uses_fallback.push_back(true);
            continue;
        }
        if (rows.size() == static_cast<std::size_t>(x.rows())) {
            model.per_bin.push_back(model.fallback);
        } else {
            Matrix xb(static_cast<Index>(rows.size()), x.cols());
            Vector yb(static_cast<Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                xb.row(static_cast<Index>(r)) = x.row(rows[r]);
                yb(static_cast<Index>(r)) = y(rows[r]);
            }
            model.per_bin.push_back(solve_least_squares(xb, yb));
        }
        model.uses_fallback.push_back(false);
    }
    return model;
}

Matrix PiecewiseModel::basis(const Matrix& x) const
{
    Matrix out(x.rows(), x.cols() + static_cast<Index>(knots.size()));
    out.leftCols(x.cols()) = x;
    for (std::size_t j = 0; j < knots.size(); ++j) {
        out.col(x.cols() + static_cast<Index>(j)) = (x.col(driver).array() - knots[j]).max(0.0).matrix();
    }
    return out;
}

Vector PiecewiseModel::predict(const Matrix& x) const
{
    return inner.predict(basis(x));
}

PiecewiseModel fit_piecewise(const Matrix& x, const Vector& y, int breakpoints, Index driver)
{
    if (breakpoints < 0) {
        throw ConfigError("breakpoints must be non-negative");
    }
    if (driver < 0 || driver >= x.cols()) {
        throw ConfigError("piecewise driver column out of range");
    }
    PiecewiseModel model;
    model.driver = driver;
    std::vector<double> v(x.col(driver).data(), x.col(driver).data() + x.rows());
    for (int j = 1; j <= breakpoints; ++j) {
        const double knot = quantile(v, static_cast<double>(j) / (breakpoints + 1));
        if (!model.knots.empty() && knot <= model.knots.back()) {
            warn("duplicate piecewise knot at " + format_double(knot) + " collapsed");
            continue;
        }
        model.knots.push_back(knot);
    }
    model.inner = solve_least_squares(model.basis(x), y);
    return model;
}

} // namespace thermo
