#pragma once

#include "thermoreg/common.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermo {

// Dense numeric design matrix with named columns and an optional target.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> names;
    std::optional<Vector> target;

    FeatureMatrix() = default;
    FeatureMatrix(Matrix v, std::vector<std::string> n, std::optional<Vector> y = std::nullopt);

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    bool has(const std::string& name) const;
    Index index_of(const std::string& name) const;
    Vector column(const std::string& name) const { return values.col(index_of(name)); }
    const Vector& y() const;

    FeatureMatrix select(const std::vector<std::string>& keep) const;
    FeatureMatrix without(const std::string& name) const;
    FeatureMatrix take_rows(const std::vector<std::size_t>& rows) const;
    void append(const std::string& name, const Vector& col);
    void append(const FeatureMatrix& other);

    // Throws DataError when names and columns disagree or a value is not finite.
    void validate() const;

    // Header row then one row per sample; a "target" column trails when present.
    void write_csv(std::ostream& out) const;
};

} // namespace thermo
