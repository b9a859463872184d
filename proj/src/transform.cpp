#include "thermoreg/transform.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace thermo {

Index Standardizer::index_of(const std::string& name) const
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw DataError("standardizer was not fitted on column '" + name + "'");
    }
    return static_cast<Index>(it - names.begin());
}

Standardizer fit_standardizer(const FeatureMatrix& m, const std::vector<std::string>& columns)
{
    if (m.rows() < 1) {
        throw DataError("cannot fit a standardizer on zero rows");
    }
    Standardizer s;
    s.names = columns.empty() ? m.names : columns;
    const auto k = static_cast<Index>(s.names.size());
    s.means.resize(k);
    s.stds.resize(k);
    const double n = static_cast<double>(m.rows());
    for (Index j = 0; j < k; ++j) {
        const auto& name = s.names[static_cast<std::size_t>(j)];
        const Vector col = m.column(name);
        const double mean = col.sum() / n;
        const double var = (col.array() - mean).square().sum() / n;
        // relative floor so a column of identical large values still counts as constant
        const double scale = std::max(1.0, std::abs(mean));
        if (!(var > 0.0) || std::sqrt(var) <= 1e-12 * scale) {
            throw DataError("zero variance in column '" + name + "'");
        }
        s.means(j) = mean;
        s.stds(j) = std::sqrt(var);
    }
    return s;
}

FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& m, bool strict)
{
    if (strict) {
        for (const auto& name : m.names) {
            s.index_of(name);
        }
    }
    FeatureMatrix out = m;
    for (std::size_t j = 0; j < s.names.size(); ++j) {
        const Index col = m.index_of(s.names[j]);
        const auto jj = static_cast<Index>(j);
        out.values.col(col) = (m.values.col(col).array() - s.means(jj)) / s.stds(jj);
    }
    return out;
}

FeatureMatrix invert_standardizer(const Standardizer& s, const FeatureMatrix& m)
{
    FeatureMatrix out = m;
    for (std::size_t j = 0; j < s.names.size(); ++j) {
        const Index col = m.index_of(s.names[j]);
        const auto jj = static_cast<Index>(j);
        out.values.col(col) = m.values.col(col).array() * s.stds(jj) + s.means(jj);
    }
    return out;
}

Vector encode_ordinal(const std::vector<std::string>& labels, const OrdinalMap& map, const std::string& variable)
{
    Vector out(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = map.find(labels[i]);
        if (it == map.end()) {
            throw DataError("unknown category '" + labels[i] + "' for '" + variable + "' at row " +
                            std::to_string(i + 1));
        }
        out(static_cast<Index>(i)) = it->second;
    }
    return out;
}

std::vector<std::string> OneHotMap::column_names() const
{
    std::vector<std::string> out;
    out.reserve(categories.size());
    for (const auto& c : categories) {
        out.push_back(variable + "_" + c);
    }
    return out;
}

OneHotMap fit_onehot(const std::string& variable, const std::vector<std::string>& labels)
{
    if (labels.empty()) {
        throw DataError("cannot one-hot encode an empty column '" + variable + "'");
    }
    std::set<std::string> distinct(labels.begin(), labels.end());
    return OneHotMap{variable, {distinct.begin(), distinct.end()}};
}

FeatureMatrix encode_onehot(const OneHotMap& map, const std::vector<std::string>& labels)
{
    Matrix values = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(map.categories.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::lower_bound(map.categories.begin(), map.categories.end(), labels[i]);
        if (it == map.categories.end() || *it != labels[i]) {
            warn("unseen category '" + labels[i] + "' for '" + map.variable + "' encoded as all zeros");
            continue;
        }
        values(static_cast<Index>(i), static_cast<Index>(it - map.categories.begin())) = 1.0;
    }
    return FeatureMatrix(std::move(values), map.column_names());
}

FeatureMatrix encode_onehot(const std::string& variable, const std::vector<std::string>& labels)
{
    return encode_onehot(fit_onehot(variable, labels), labels);
}

std::string square_name(const std::string& feature) { return feature + "^2"; }

std::string interaction_name(const std::string& a, const std::string& b) { return a + "*" + b; }

std::string replica_name(const std::string& feature, int k) { return feature + "_rep" + std::to_string(k); }

FeatureMatrix add_polynomial(const FeatureMatrix& m, const std::string& a, const std::string& b)
{
    const Vector x = m.column(a);
    const Vector y = m.column(b);
    FeatureMatrix out = m;
    out.append(square_name(a), x.array().square().matrix());
    out.append(square_name(b), y.array().square().matrix());
    out.append(interaction_name(a, b), x.cwiseProduct(y));
    return out;
}

FeatureMatrix replicate_feature(const FeatureMatrix& m, const std::string& feature, int extra_copies)
{
    if (extra_copies < 0) {
        throw ConfigError("replica count must be non-negative");
    }
    const Vector x = m.column(feature);
    FeatureMatrix out = m;
    for (int k = 1; k <= extra_copies; ++k) {
        out.append(replica_name(feature, k), x);
    }
    return out;
}

} // namespace thermo
