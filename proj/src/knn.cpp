#include "thermoreg/knn.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace thermo {

KnnModel fit_knn(const Matrix& x, const Vector& y, int k)
{
    if (k < 1 || k > x.rows()) {
        throw ConfigError("k = " + std::to_string(k) + " outside [1, " + std::to_string(x.rows()) + "]");
    }
    return KnnModel{x, y, k};
}

Vector KnnModel::predict(const Matrix& x) const
{
    if (x.cols() != train_x.cols()) {
        throw DataError("knn: column count mismatch");
    }
    const Index n = train_x.rows();
    Vector out(x.rows());
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < n; ++j) {
            dist[static_cast<std::size_t>(j)] = {(train_x.row(j) - x.row(i)).squaredNorm(), j};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        double s = 0.0;
        for (int m = 0; m < k; ++m) {
            s += train_y(dist[static_cast<std::size_t>(m)].second);
        }
        out(i) = s / k;
    }
    return out;
}

} // namespace thermo
