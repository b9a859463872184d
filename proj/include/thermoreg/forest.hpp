#pragma once

#include "thermoreg/common.hpp"

#include <cstdint>
#include <vector>

namespace thermo {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // mean target of the node's samples

    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct ForestOptions {
    int n_estimators = 100;
    int max_features = 0; // 0 selects ceil(d / 3)
    int max_depth = 0;    // 0 means unlimited
    int min_samples_leaf = 1;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<RegressionTree> trees;

    Vector predict(const Matrix& x) const;
};

// Variance-reduction CART tree grown on the given sample indices.
RegressionTree grow_tree(const Matrix& x, const Vector& y, std::vector<Index> samples, const ForestOptions& opt,
                         std::uint64_t seed);

ForestModel fit_forest(const Matrix& x, const Vector& y, const ForestOptions& opt);

} // namespace thermo
