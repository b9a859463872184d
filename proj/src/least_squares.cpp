#include "thermoreg/least_squares.hpp"

namespace thermo {

Vector LinearModel::predict(const Matrix& x) const
{
    if (x.cols() != weights.size()) {
        throw DataError("linear model expects " + std::to_string(weights.size()) + " columns, got " +
                        std::to_string(x.cols()));
    }
    Vector out = x * weights;
    out.array() += intercept;
    return out;
}

LinearModel solve_least_squares(const Matrix& x, const Vector& y, double l2, const Vector* sample_weights)
{
    const Index n = x.rows();
    const Index d = x.cols();
    if (n == 0) {
        throw DataError("least squares on zero rows");
    }
    if (y.size() != n) {
        throw DataError("least squares: target length mismatch");
    }
    if (l2 < 0.0) {
        throw ConfigError("l2 coefficient must be non-negative");
    }
    Vector w = Vector::Ones(n);
    if (sample_weights != nullptr) {
        if (sample_weights->size() != n || (sample_weights->array() <= 0.0).any()) {
            throw DataError("sample weights must be positive, one per row");
        }
        w = *sample_weights;
    }
    const double wsum = w.sum();
    const Vector x_mean = (x.transpose() * w) / wsum;
    const double y_mean = w.dot(y) / wsum;

    LinearModel model;
    if (d == 0) {
        model.weights = Vector(0);
        model.intercept = y_mean;
        return model;
    }
    const Vector sw = w.array().sqrt();
    Matrix xc = (x.rowwise() - x_mean.transpose());
    xc = sw.asDiagonal() * xc;
    const Vector yc = sw.asDiagonal() * (y.array() - y_mean).matrix();

    if (l2 == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xc);
        model.weights = cod.solve(yc);
        if (cod.rank() < d) {
            warn("rank-deficient design (rank " + std::to_string(cod.rank()) + " of " + std::to_string(d) +
                 " columns); using the minimum-norm solution");
        }
    } else {
        Matrix gram = xc.transpose() * xc;
        gram.diagonal().array() += l2;
        model.weights = gram.ldlt().solve(xc.transpose() * yc);
    }
    if (!model.weights.allFinite()) {
        throw NumericalError("least squares produced non-finite weights");
    }
    model.intercept = y_mean - x_mean.dot(model.weights);
    return model;
}

} // namespace thermo
