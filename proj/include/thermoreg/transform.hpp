#pragma once

#include "thermoreg/feature_matrix.hpp"
#include "thermoreg/schema.hpp"

#include <string>
#include <vector>

namespace thermo {

// Per-column z-scoring with the population standard deviation.
struct Standardizer {
    std::vector<std::string> names;
    Vector means;
    Vector stds;

    Index index_of(const std::string& name) const;
};

// Fits on the named columns (all columns when `columns` is empty).
// A zero-variance column is an error naming that column.
Standardizer fit_standardizer(const FeatureMatrix& m, const std::vector<std::string>& columns = {});

// Standardizes the fitted columns of `m`. With `strict`, every column of
// `m` must have been fitted; otherwise unfitted columns pass through.
FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& m, bool strict = true);
FeatureMatrix invert_standardizer(const Standardizer& s, const FeatureMatrix& m);

Vector encode_ordinal(const std::vector<std::string>& labels, const OrdinalMap& map, const std::string& variable);

struct OneHotMap {
    std::string variable;
    std::vector<std::string> categories; // lexicographic

    std::vector<std::string> column_names() const;
};

OneHotMap fit_onehot(const std::string& variable, const std::vector<std::string>& labels);

// Unseen labels produce an all-zero indicator row and a warning.
FeatureMatrix encode_onehot(const OneHotMap& map, const std::vector<std::string>& labels);
FeatureMatrix encode_onehot(const std::string& variable, const std::vector<std::string>& labels);

std::string square_name(const std::string& feature);
std::string interaction_name(const std::string& a, const std::string& b);
std::string replica_name(const std::string& feature, int k);

// Appends a^2, b^2 and a*b, in that order.
FeatureMatrix add_polynomial(const FeatureMatrix& m, const std::string& a, const std::string& b);

// Appends `extra_copies` exact copies named "<feature>_rep<k>".
FeatureMatrix replicate_feature(const FeatureMatrix& m, const std::string& feature, int extra_copies);

} // namespace thermo
