#pragma once

#include "thermoreg/feature_matrix.hpp"

#include <optional>

namespace thermo {

struct PcaModel {
    Matrix components;          // k x d, orthonormal rows
    Vector explained_variance;  // k values, non-increasing
    Vector eigenvalues;         // all d covariance eigenvalues, non-increasing
    Vector mean;
    Index k = 0;

    Index input_dim() const { return mean.size(); }
};

// Minka's profile log-likelihood for keeping `rank` components, given the
// descending covariance spectrum. -inf when the spectrum is degenerate.
double minka_log_likelihood(const Vector& spectrum, Index rank, Index n_samples);

// Rank in [1, d-1] maximizing the Minka score; ties go to the smaller rank.
Index minka_mle_dimension(const Vector& spectrum, Index n_samples);

// Eigen-decomposition of the sample covariance (n - 1 denominator). With
// no `k`, the dimension is chosen by the Minka rule. Component signs are
// fixed so the largest-magnitude entry of each row is positive.
PcaModel pca_fit(const Matrix& x, std::optional<Index> k = std::nullopt);

Matrix pca_transform(const PcaModel& p, const Matrix& x);
Matrix pca_inverse(const PcaModel& p, const Matrix& scores);

// Scores as a matrix with columns pc1..pck; the target is carried over.
FeatureMatrix pca_transform(const PcaModel& p, const FeatureMatrix& m);

} // namespace thermo
