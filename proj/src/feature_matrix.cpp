#include "thermoreg/feature_matrix.hpp"

#include "thermoreg/csv.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace thermo {

FeatureMatrix::FeatureMatrix(Matrix v, std::vector<std::string> n, std::optional<Vector> y)
    : values(std::move(v)), names(std::move(n)), target(std::move(y))
{
    if (static_cast<Index>(names.size()) != values.cols()) {
        throw DataError("feature matrix: " + std::to_string(names.size()) + " names for " +
                        std::to_string(values.cols()) + " columns");
    }
    if (target && target->size() != values.rows()) {
        throw DataError("feature matrix: target length does not match row count");
    }
}

bool FeatureMatrix::has(const std::string& name) const
{
    return std::find(names.begin(), names.end(), name) != names.end();
}

Index FeatureMatrix::index_of(const std::string& name) const
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw DataError("unknown feature '" + name + "'");
    }
    return static_cast<Index>(it - names.begin());
}

const Vector& FeatureMatrix::y() const
{
    if (!target) {
        throw DataError("feature matrix has no target");
    }
    return *target;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& keep) const
{
    Matrix out(rows(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.col(static_cast<Index>(j)) = values.col(index_of(keep[j]));
    }
    return FeatureMatrix(std::move(out), keep, target);
}

FeatureMatrix FeatureMatrix::without(const std::string& name) const
{
    index_of(name);
    std::vector<std::string> keep;
    for (const auto& n : names) {
        if (n != name) {
            keep.push_back(n);
        }
    }
    return select(keep);
}

FeatureMatrix FeatureMatrix::take_rows(const std::vector<std::size_t>& rows_idx) const
{
    Matrix out(static_cast<Index>(rows_idx.size()), cols());
    std::optional<Vector> y_out;
    if (target) {
        y_out = Vector(static_cast<Index>(rows_idx.size()));
    }
    for (std::size_t i = 0; i < rows_idx.size(); ++i) {
        const auto r = static_cast<Index>(rows_idx[i]);
        if (r >= rows()) {
            throw DataError("row index out of range");
        }
        out.row(static_cast<Index>(i)) = values.row(r);
        if (target) {
            (*y_out)(static_cast<Index>(i)) = (*target)(r);
        }
    }
    return FeatureMatrix(std::move(out), names, std::move(y_out));
}

void FeatureMatrix::append(const std::string& name, const Vector& col)
{
    if (has(name)) {
        throw DataError("duplicate feature name '" + name + "'");
    }
    if (values.cols() == 0 && values.rows() == 0) {
        values.resize(col.size(), 0);
    }
    if (col.size() != values.rows()) {
        throw DataError("appended column '" + name + "' has wrong length");
    }
    values.conservativeResize(Eigen::NoChange, values.cols() + 1);
    values.col(values.cols() - 1) = col;
    names.push_back(name);
}

void FeatureMatrix::append(const FeatureMatrix& other)
{
    for (Index j = 0; j < other.cols(); ++j) {
        append(other.names[static_cast<std::size_t>(j)], other.values.col(j));
    }
}

void FeatureMatrix::validate() const
{
    if (static_cast<Index>(names.size()) != values.cols()) {
        throw DataError("feature matrix: name count does not match column count");
    }
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size()) {
        throw DataError("feature matrix: duplicate column names");
    }
    if (!values.allFinite()) {
        throw DataError("feature matrix: non-finite value");
    }
    if (target && !target->allFinite()) {
        throw DataError("feature matrix: non-finite target");
    }
}

void FeatureMatrix::write_csv(std::ostream& out) const
{
    std::vector<std::string> header = names;
    if (target) {
        header.emplace_back("target");
    }
    write_csv_row(out, header);
    std::vector<std::string> row(header.size());
    for (Index i = 0; i < rows(); ++i) {
        for (Index j = 0; j < cols(); ++j) {
            row[static_cast<std::size_t>(j)] = format_double(values(i, j));
        }
        if (target) {
            row.back() = format_double((*target)(i));
        }
        write_csv_row(out, row);
    }
}

} // namespace thermo
