#pragma once

#include "thermoreg/csv.hpp"
#include "thermoreg/schema.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace thermo {

struct DataColumn {
    enum class Kind { numeric, categorical };

    std::string name;
    Kind kind = Kind::numeric;
    std::vector<double> numbers;     // numeric columns
    std::vector<std::string> labels; // categorical columns

    bool operator==(const DataColumn&) const = default;
};

// Fully populated table: numeric features, text categoricals, numeric target.
struct CleanDataset {
    std::vector<DataColumn> columns;
    std::string target_name;
    std::vector<double> target;
    std::size_t n_rows = 0;

    const DataColumn* find(const std::string& name) const;
    const DataColumn& numeric(const std::string& name) const;
    const DataColumn& categorical(const std::string& name) const;
    std::vector<std::string> numeric_names() const;
    std::vector<std::string> categorical_names() const;

    CleanDataset subset(const std::vector<std::size_t>& rows) const;

    // Feature columns in order, target last.
    RawTable to_raw() const;
    // Schema that reloads the emitted CSV into an identical dataset.
    Schema schema() const;

    bool operator==(const CleanDataset&) const = default;
};

// Drops entirely empty columns, then every row with a remaining missing
// cell. Columns the schema ignores play no part in either step.
CleanDataset clean(const RawTable& table, const Schema& schema);

// Replaces each group of round columns with their per-row mean, placed at
// the position of the group's first member and named by the group base.
CleanDataset average_rounds(const CleanDataset& ds, const std::vector<RoundGroup>& groups);

struct SplitSpec {
    double test_fraction = 290.0 / 959.0;
    std::uint64_t seed = 42;
    bool stratify = false;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Train size is round(n * (1 - f)); both index sets are sorted ascending.
// Stratified splits spread the test rows evenly over the target's order.
SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec, const std::vector<double>* target = nullptr);
std::pair<CleanDataset, CleanDataset> split(const CleanDataset& ds, const SplitSpec& spec);

void write_clean_csv(std::ostream& out, const CleanDataset& ds);
void write_clean_csv(const std::filesystem::path& path, const CleanDataset& ds);
CleanDataset read_clean_csv(std::istream& in, const std::string& target_name,
                            const std::vector<std::string>& categorical);

// load + clean + average_rounds using the schema's groups.
CleanDataset load_dataset(const std::filesystem::path& path, const Schema& schema);

} // namespace thermo
