#pragma once

#include "thermoreg/evaluation.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace thermo {

struct RankingEntry {
    std::string feature;
    double score = 0.0; // |Pearson r| with the target
    double rmse = std::numeric_limits<double>::quiet_NaN();
};

// Pearson coefficient; 0 when either side is constant.
double pearson(const Vector& a, const Vector& b);

// Sorted by descending score; equal scores keep column order.
std::vector<RankingEntry> pearson_rank(const FeatureMatrix& m);

// One-variable OLS per feature, RMSE averaged over the folds. Sorted by
// ascending RMSE. Features constant within a training fold are skipped.
std::vector<RankingEntry> single_feature_rmse(const FeatureMatrix& m, const FoldPlan& plan);

// Mean fold RMSE of ordinary least squares on all columns of `m`.
double cv_ols_rmse(const FeatureMatrix& m, const FoldPlan& plan);

struct SubsetEvaluation {
    std::vector<std::string> subset; // candidate names in candidate order
    double rmse = 0.0;
};

struct SubsetSearchResult {
    std::vector<std::string> base_features;
    std::vector<std::string> candidate_features;
    std::vector<std::string> best_subset;
    double best_rmse = 0.0;
    std::vector<SubsetEvaluation> per_subset; // indexed by candidate bitmask
};

// Evaluates base plus every subset of `candidates` with OLS. Columns of `m`
// that are not candidates form the base. Ties go to the smaller subset,
// then to the lexicographically smaller sorted name list.
SubsetSearchResult exhaustive_subset_search(const FeatureMatrix& m, const std::vector<std::string>& candidates,
                                            const FoldPlan& plan);

struct SbsStep {
    std::string removed;
    double rmse = 0.0;
    // Validation RMSE of every removal considered at this step.
    std::vector<std::pair<std::string, double>> candidates;
};

struct SbsTrace {
    std::vector<std::string> start_set;
    std::vector<SbsStep> steps;
    std::vector<std::string> final_set;
};

// Greedy backward elimination with OLS validation RMSE. Ties within 1e-12
// remove the lexicographically smallest name.
SbsTrace sbs(const FeatureMatrix& m, Index target_size, const FoldPlan& plan);

void write_ranking_csv(std::ostream& out, const std::vector<RankingEntry>& rows);
void write_subsets_csv(std::ostream& out, const SubsetSearchResult& r);
void write_sbs_csv(std::ostream& out, const SbsTrace& t);
nlohmann::json ranking_json(const std::vector<RankingEntry>& rows);
nlohmann::json subsets_json(const SubsetSearchResult& r);
nlohmann::json sbs_json(const SbsTrace& t);

} // namespace thermo
