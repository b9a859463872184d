#include "thermoreg/selection.hpp"

#include "thermoreg/csv.hpp"
#include "thermoreg/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace thermo {
namespace {

constexpr double kTie = 1e-12;

std::string join_names(const std::vector<std::string>& names)
{
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += (i ? "+" : "") + names[i];
    }
    return out;
}

bool is_constant(const Vector& v)
{
    return v.size() == 0 || v.maxCoeff() - v.minCoeff() <= 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
}

std::string rmse_text(double v) { return std::isnan(v) ? std::string() : format_double(v); }

} // namespace

double pearson(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw DataError("pearson inputs differ in length");
    }
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double na = da.norm();
    const double nb = db.norm();
    if (na == 0.0 || nb == 0.0 || is_constant(a) || is_constant(b)) {
        return 0.0;
    }
    return std::clamp(da.dot(db) / (na * nb), -1.0, 1.0);
}

std::vector<RankingEntry> pearson_rank(const FeatureMatrix& m)
{
    if (m.rows() < 2) {
        throw DataError("correlation ranking needs at least 2 rows");
    }
    const Vector& y = m.y();
    if (is_constant(y)) {
        throw DataError("correlation ranking needs a non-constant target");
    }
    std::vector<RankingEntry> out;
    for (Index j = 0; j < m.cols(); ++j) {
        const Vector col = m.values.col(j);
        if (is_constant(col)) {
            warn("feature '" + m.names[static_cast<std::size_t>(j)] + "' is constant; correlation scored 0");
        }
        out.push_back({m.names[static_cast<std::size_t>(j)], std::abs(pearson(col, y))});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    return out;
}

double cv_ols_rmse(const FeatureMatrix& m, const FoldPlan& plan)
{
    return cross_validate(EstimatorSpec(Family::linear, {{"l2", 0.0}}), m, plan).rmse_mean;
}

std::vector<RankingEntry> single_feature_rmse(const FeatureMatrix& m, const FoldPlan& plan)
{
    if (plan.rows() != m.rows()) {
        throw ConfigError("fold plan does not match the matrix row count");
    }
    std::vector<RankingEntry> out;
    for (const auto& name : m.names) {
        const auto one = m.select({name});
        bool degenerate = false;
        double total = 0.0;
        for (int f = 0; f < plan.n_folds && !degenerate; ++f) {
            const auto train_rows = plan.train_rows(f);
            const auto test_rows = plan.test_rows(f);
            if (train_rows.size() < 2 || test_rows.empty()) {
                degenerate = true;
                break;
            }
            const auto train = one.take_rows(train_rows);
            if (is_constant(train.values.col(0))) {
                degenerate = true;
                break;
            }
            const auto test = one.take_rows(test_rows);
            const auto model = solve_least_squares(train.values, train.y());
            total += compute_metrics(test.y(), model.predict(test.values)).rmse;
        }
        if (degenerate) {
            warn("feature '" + name + "' is constant within a fold; skipped from RMSE ranking");
            continue;
        }
        out.push_back({name, std::abs(pearson(one.values.col(0), m.y())), total / plan.n_folds});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rmse < b.rmse; });
    return out;
}

SubsetSearchResult exhaustive_subset_search(const FeatureMatrix& m, const std::vector<std::string>& candidates,
                                            const FoldPlan& plan)
{
    if (candidates.size() > 20) {
        throw ConfigError("subset search over " + std::to_string(candidates.size()) +
                          " candidates exceeds the limit of 20");
    }
    for (const auto& c : candidates) {
        m.index_of(c);
    }
    SubsetSearchResult r;
    r.candidate_features = candidates;
    for (const auto& n : m.names) {
        if (std::find(candidates.begin(), candidates.end(), n) == candidates.end()) {
            r.base_features.push_back(n);
        }
    }
    const std::size_t total = std::size_t{1} << candidates.size();
    std::size_t best = 0;
    std::vector<std::string> best_sorted;
    for (std::size_t mask = 0; mask < total; ++mask) {
        SubsetEvaluation e;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (mask & (std::size_t{1} << c)) {
                e.subset.push_back(candidates[c]);
            }
        }
        std::vector<std::string> columns;
        for (const auto& n : m.names) {
            const bool is_cand = std::find(candidates.begin(), candidates.end(), n) != candidates.end();
            if (!is_cand || std::find(e.subset.begin(), e.subset.end(), n) != e.subset.end()) {
                columns.push_back(n);
            }
        }
        e.rmse = cv_ols_rmse(m.select(columns), plan);
        auto sorted = e.subset;
        std::sort(sorted.begin(), sorted.end());
        if (mask == 0) {
            best_sorted = sorted;
        } else {
            const auto& cur = r.per_subset[best];
            bool better = e.rmse < cur.rmse - kTie;
            if (!better && std::abs(e.rmse - cur.rmse) <= kTie) {
                better = sorted.size() < best_sorted.size() ||
                         (sorted.size() == best_sorted.size() && sorted < best_sorted);
            }
            if (better) {
                best = mask;
                best_sorted = sorted;
            }
        }
        r.per_subset.push_back(std::move(e));
    }
    r.best_subset = r.per_subset[best].subset;
    r.best_rmse = r.per_subset[best].rmse;
    return r;
}

SbsTrace sbs(const FeatureMatrix& m, Index target_size, const FoldPlan& plan)
{
    if (target_size < 1 || target_size >= m.cols()) {
        throw ConfigError("SBS target size " + std::to_string(target_size) + " must be in [1, " +
                          std::to_string(m.cols() - 1) + "]");
    }
    SbsTrace t;
    t.start_set = m.names;
    auto current = m.names;
    while (static_cast<Index>(current.size()) > target_size) {
        SbsStep step;
        std::size_t best = 0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            auto keep = current;
            keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(i));
            const double rmse = cv_ols_rmse(m.select(keep), plan);
            step.candidates.emplace_back(current[i], rmse);
            if (i == 0) {
                continue;
            }
            const auto& b = step.candidates[best];
            if (rmse < b.second - kTie || (std::abs(rmse - b.second) <= kTie && current[i] < b.first)) {
                best = i;
            }
        }
        step.removed = step.candidates[best].first;
        step.rmse = step.candidates[best].second;
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
        t.steps.push_back(std::move(step));
    }
    t.final_set = current;
    return t;
}

void write_ranking_csv(std::ostream& out, const std::vector<RankingEntry>& rows)
{
    write_csv_row(out, {"rank", "feature", "score", "rmse"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        write_csv_row(out, {std::to_string(i + 1), rows[i].feature, format_double(rows[i].score),
                            rmse_text(rows[i].rmse)});
    }
}

void write_subsets_csv(std::ostream& out, const SubsetSearchResult& r)
{
    write_csv_row(out, {"mask", "size", "subset", "rmse", "best"});
    for (std::size_t i = 0; i < r.per_subset.size(); ++i) {
        const auto& e = r.per_subset[i];
        write_csv_row(out, {std::to_string(i), std::to_string(e.subset.size()), join_names(e.subset),
                            format_double(e.rmse), e.subset == r.best_subset ? "1" : "0"});
    }
}

void write_sbs_csv(std::ostream& out, const SbsTrace& t)
{
    write_csv_row(out, {"step", "removed", "rmse_after_removal", "remaining"});
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        write_csv_row(out, {std::to_string(i + 1), t.steps[i].removed, format_double(t.steps[i].rmse),
                            std::to_string(t.start_set.size() - i - 1)});
    }
}

nlohmann::json ranking_json(const std::vector<RankingEntry>& rows)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json e{{"feature", r.feature}, {"score", r.score}};
        e["rmse"] = std::isnan(r.rmse) ? nlohmann::json(nullptr) : nlohmann::json(r.rmse);
        out.push_back(e);
    }
    return out;
}

nlohmann::json subsets_json(const SubsetSearchResult& r)
{
    nlohmann::json subsets = nlohmann::json::array();
    for (const auto& e : r.per_subset) {
        subsets.push_back({{"subset", e.subset}, {"rmse", e.rmse}});
    }
    return {{"base_features", r.base_features},
            {"candidate_features", r.candidate_features},
            {"best_subset", r.best_subset},
            {"best_rmse", r.best_rmse},
            {"evaluations", r.per_subset.size()},
            {"subsets", subsets}};
}

nlohmann::json sbs_json(const SbsTrace& t)
{
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        nlohmann::json cands = nlohmann::json::object();
        for (const auto& [name, rmse] : s.candidates) {
            cands[name] = rmse;
        }
        steps.push_back({{"removed", s.removed}, {"rmse", s.rmse}, {"candidates", cands}});
    }
    return {{"start_set", t.start_set}, {"steps", steps}, {"final_set", t.final_set}};
}

} // namespace thermo
