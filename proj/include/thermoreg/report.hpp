#pragma once

#include "thermoreg/evaluation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermo {

// One table row. mae/mse are seed means; rmse = sqrt(mse). The seed
// columns summarize per-seed RMSE.
struct ReportRow {
    std::string label;
    std::optional<Index> count;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double rmse_seed_mean = 0.0;
    double rmse_seed_std = 0.0;
    std::vector<double> rmse_per_seed;
    std::string status = "ok";
    nlohmann::json manifest = nlohmann::json::object();

    bool operator==(const ReportRow&) const;
};

// Aggregates per-seed metrics into a row. Seeds that produced no metrics
// are skipped; a row with none left has NaN metrics.
ReportRow aggregate_row(const std::string& label, std::optional<Index> count, const std::vector<Metrics>& per_seed);

struct ReportTable {
    std::string title;
    std::string evaluation; // which protocol produced the numbers
    std::vector<std::string> notes;
    std::vector<ReportRow> rows;
    nlohmann::json provenance = nlohmann::json::object();

    const ReportRow* find(const std::string& label) const;
    bool operator==(const ReportTable&) const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Provenance block: seeds, config hash, software version, schema manifest.
nlohmann::json make_provenance(const nlohmann::json& config, const std::vector<std::uint64_t>& seeds,
                               const nlohmann::json& schema_manifest);

void write_report_csv(std::ostream& out, const ReportTable& t);
nlohmann::json report_to_json(const ReportTable& t);
ReportTable report_from_json(const nlohmann::json& j);

enum class ReportFormat { csv, json, both };
ReportFormat parse_report_format(const std::string& text);

// Writes <dir>/<stem>.csv and/or <dir>/<stem>.json; returns the paths.
std::vector<std::filesystem::path> emit_report(const ReportTable& t, const std::filesystem::path& dir,
                                               const std::string& stem, ReportFormat format);

// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace thermo
