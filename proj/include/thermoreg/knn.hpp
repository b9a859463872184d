#pragma once

#include "thermoreg/common.hpp"

namespace thermo {

// Brute-force Euclidean k-nearest-neighbour regression. Equal distances
// are broken by training-row index.
struct KnnModel {
    Matrix train_x;
    Vector train_y;
    int k = 1;

    Vector predict(const Matrix& x) const;
};

KnnModel fit_knn(const Matrix& x, const Vector& y, int k);

} // namespace thermo
