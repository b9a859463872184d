#include "thermoreg/forest.hpp"

#include "thermoreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermo {

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const
{
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(node)];
        node = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

Vector ForestModel::predict(const Matrix& x) const
{
    Vector out = Vector::Zero(x.rows());
    for (const auto& tree : trees) {
        for (Index i = 0; i < x.rows(); ++i) {
            out(i) += tree.predict_row(x.row(i));
        }
    }
    return out / static_cast<double>(trees.size());
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    std::size_t left_count = 0;
    double score = -INFINITY;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Vector& y, const ForestOptions& opt, std::uint64_t seed)
        : x_(x), y_(y), opt_(opt), rng_(seed)
    {
        const int d = static_cast<int>(x.cols());
        mtry_ = opt.max_features > 0 ? std::min(opt.max_features, d) : std::max(1, (d + 2) / 3);
    }

    RegressionTree build(std::vector<Index> samples)
    {
        tree_.nodes.clear();
        grow(samples, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<Index>& samples, int depth)
    {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double sum = 0.0;
        for (auto s : samples) {
            sum += y_(s);
        }
        tree_.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(samples.size());

        const bool pure = std::all_of(samples.begin(), samples.end(), [&](Index s) { return y_(s) == y_(samples[0]); });
        const bool depth_done = opt_.max_depth > 0 && depth >= opt_.max_depth;
        if (pure || depth_done || samples.size() < 2 * static_cast<std::size_t>(opt_.min_samples_leaf)) {
            return id;
        }
        const Split split = find_split(samples);
        if (split.feature < 0) {
            return id;
        }
        std::vector<Index> left;
        std::vector<Index> right;
        for (auto s : samples) {
            (x_(s, split.feature) <= split.threshold ? left : right).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    // Visits features in random order until `mtry_` non-constant ones were scored.
    Split find_split(const std::vector<Index>& samples)
    {
        std::vector<int> order(static_cast<std::size_t>(x_.cols()));
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(order);

        const std::size_t n = samples.size();
        const auto min_leaf = static_cast<std::size_t>(opt_.min_samples_leaf);
        double total = 0.0;
        for (auto s : samples) {
            total += y_(s);
        }
        Split best;
        int scored = 0;
        std::vector<std::pair<double, double>> pts(n);
        for (int f : order) {
            if (scored >= mtry_) {
                break;
            }
            for (std::size_t k = 0; k < n; ++k) {
                pts[k] = {x_(samples[k], f), y_(samples[k])};
            }
            std::sort(pts.begin(), pts.end());
            if (pts.front().first == pts.back().first) {
                continue;
            }
            ++scored;
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += pts[k].second;
                const std::size_t nl = k + 1;
                const std::size_t nr = n - nl;
                if (pts[k].first == pts[k + 1].first || nl < min_leaf || nr < min_leaf) {
                    continue;
                }
                const double right_sum = total - left_sum;
                // maximizing this is equivalent to minimizing the children's SSE
                const double score = left_sum * left_sum / static_cast<double>(nl) +
                                     right_sum * right_sum / static_cast<double>(nr);
                if (score > best.score) {
                    best.score = score;
                    best.feature = f;
                    best.left_count = nl;
                    double mid = 0.5 * (pts[k].first + pts[k + 1].first);
                    if (mid >= pts[k + 1].first) {
                        mid = pts[k].first;
                    }
                    best.threshold = mid;
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const Vector& y_;
    const ForestOptions& opt_;
    Rng rng_;
    int mtry_ = 1;
    RegressionTree tree_;
};

} // namespace

RegressionTree grow_tree(const Matrix& x, const Vector& y, std::vector<Index> samples, const ForestOptions& opt,
                         std::uint64_t seed)
{
    if (samples.empty()) {
        throw DataError("cannot grow a tree on zero samples");
    }
    return TreeBuilder(x, y, opt, seed).build(std::move(samples));
}

ForestModel fit_forest(const Matrix& x, const Vector& y, const ForestOptions& opt)
{
    if (opt.n_estimators < 1) {
        throw ConfigError("n_estimators must be at least 1");
    }
    if (opt.min_samples_leaf < 1) {
        throw ConfigError("min_samples_leaf must be at least 1");
    }
    const Index n = x.rows();
    if (n == 0) {
        throw DataError("forest on zero rows");
    }
    ForestModel model;
    model.trees.reserve(static_cast<std::size_t>(opt.n_estimators));
    for (int t = 0; t < opt.n_estimators; ++t) {
        const auto tree_seed = derive_seed(opt.seed, static_cast<std::uint64_t>(t));
        std::vector<Index> samples(static_cast<std::size_t>(n));
        if (opt.bootstrap) {
            Rng boot(derive_seed(tree_seed, 0xB007));
            for (auto& s : samples) {
                s = static_cast<Index>(boot.uniform_index(static_cast<std::uint64_t>(n)));
            }
        } else {
            std::iota(samples.begin(), samples.end(), Index{0});
        }
        model.trees.push_back(grow_tree(x, y, std::move(samples), opt, tree_seed));
    }
    return model;
}

} // namespace thermo
