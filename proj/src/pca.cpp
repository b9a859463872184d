#include "thermoreg/pca.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace thermo {

double minka_log_likelihood(const Vector& spectrum, Index rank, Index n_samples)
{
    const Index d = spectrum.size();
    if (rank < 1 || rank >= d) {
        throw ConfigError("Minka rank must be in [1, d-1]");
    }
    constexpr double eps = 1e-15;
    if (spectrum(rank - 1) < eps) {
        return -std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(n_samples);
    const double pi = std::numbers::pi;
    double pu = -static_cast<double>(rank) * std::log(2.0);
    for (Index i = 1; i <= rank; ++i) {
        const double a = static_cast<double>(d - i + 1) / 2.0;
        pu += std::lgamma(a) - std::log(pi) * a;
    }
    double pl = 0.0;
    for (Index i = 0; i < rank; ++i) {
        pl += std::log(spectrum(i));
    }
    pl = -pl * n / 2.0;
    const double v = std::max(eps, spectrum.tail(d - rank).sum() / static_cast<double>(d - rank));
    const double pv = -std::log(v) * n * static_cast<double>(d - rank) / 2.0;
    const double r = static_cast<double>(rank);
    const double m = static_cast<double>(d) * r - r * (r + 1.0) / 2.0;
    const double pp = std::log(2.0 * pi) * (m + r) / 2.0;
    double pa = 0.0;
    for (Index i = 0; i < rank; ++i) {
        for (Index j = i + 1; j < d; ++j) {
            const double sj = j < rank ? spectrum(j) : v;
            const double si = spectrum(i);
            pa += std::log((spectrum(i) - spectrum(j)) * (1.0 / sj - 1.0 / si)) + std::log(n);
        }
    }
    return pu + pl + pv + pp - pa / 2.0 - r * std::log(n) / 2.0;
}

Index minka_mle_dimension(const Vector& spectrum, Index n_samples)
{
    const Index d = spectrum.size();
    if (d < 2) {
        return d;
    }
    Index best = 1;
    double best_ll = minka_log_likelihood(spectrum, 1, n_samples);
    for (Index r = 2; r < d; ++r) {
        const double ll = minka_log_likelihood(spectrum, r, n_samples);
        if (ll > best_ll) {
            best_ll = ll;
            best = r;
        }
    }
    return best;
}

PcaModel pca_fit(const Matrix& x, std::optional<Index> k)
{
    const Index n = x.rows();
    const Index d = x.cols();
    if (n < 2 || d < 1) {
        throw DataError("PCA needs at least 2 rows and 1 column");
    }
    if (k && (*k < 1 || *k > d)) {
        throw ConfigError("PCA component count " + std::to_string(*k) + " outside [1, " + std::to_string(d) + "]");
    }
    PcaModel p;
    p.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - p.mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("PCA eigen-decomposition failed");
    }
    // Eigen orders ascending; reverse and clip round-off negatives.
    p.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
    const Matrix vectors = eig.eigenvectors().rowwise().reverse();
    p.k = k ? *k : minka_mle_dimension(p.eigenvalues, n);
    p.components = vectors.leftCols(p.k).transpose();
    for (Index i = 0; i < p.k; ++i) {
        Index arg = 0;
        p.components.row(i).cwiseAbs().maxCoeff(&arg);
        if (p.components(i, arg) < 0) {
            p.components.row(i) *= -1.0;
        }
    }
    p.explained_variance = p.eigenvalues.head(p.k);
    return p;
}

Matrix pca_transform(const PcaModel& p, const Matrix& x)
{
    if (x.cols() != p.input_dim()) {
        throw DataError("PCA expects " + std::to_string(p.input_dim()) + " columns, got " + std::to_string(x.cols()));
    }
    return (x.rowwise() - p.mean.transpose()) * p.components.transpose();
}

Matrix pca_inverse(const PcaModel& p, const Matrix& scores)
{
    if (scores.cols() != p.k) {
        throw DataError("PCA inverse expects " + std::to_string(p.k) + " score columns");
    }
    return (scores * p.components).rowwise() + p.mean.transpose();
}

FeatureMatrix pca_transform(const PcaModel& p, const FeatureMatrix& m)
{
    std::vector<std::string> names;
    for (Index i = 0; i < p.k; ++i) {
        names.push_back("pc" + std::to_string(i + 1));
    }
    return FeatureMatrix(pca_transform(p, m.values), names, m.target);
}

} // namespace thermo
