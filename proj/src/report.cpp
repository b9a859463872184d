#include "thermoreg/report.hpp"

#include "thermoreg/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace thermo {
namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double null_or_number(const nlohmann::json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::string number_text(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

} // namespace

bool ReportRow::operator==(const ReportRow& o) const
{
    if (rmse_per_seed.size() != o.rmse_per_seed.size()) {
        return false;
    }
    for (std::size_t i = 0; i < rmse_per_seed.size(); ++i) {
        if (!same_double(rmse_per_seed[i], o.rmse_per_seed[i])) {
            return false;
        }
    }
    return label == o.label && count == o.count && same_double(mae, o.mae) && same_double(mse, o.mse) &&
           same_double(rmse, o.rmse) && same_double(rmse_seed_mean, o.rmse_seed_mean) &&
           same_double(rmse_seed_std, o.rmse_seed_std) && status == o.status && manifest == o.manifest;
}

ReportRow aggregate_row(const std::string& label, std::optional<Index> count, const std::vector<Metrics>& per_seed)
{
    ReportRow row;
    row.label = label;
    row.count = count;
    if (per_seed.empty()) {
        row.mae = row.mse = row.rmse = row.rmse_seed_mean = row.rmse_seed_std = std::nan("");
        return row;
    }
    double mae = 0.0;
    double mse = 0.0;
    for (const auto& m : per_seed) {
        mae += m.mae;
        mse += m.mse;
        row.rmse_per_seed.push_back(m.rmse);
    }
    row.mae = mae / static_cast<double>(per_seed.size());
    row.mse = mse / static_cast<double>(per_seed.size());
    row.rmse = std::sqrt(row.mse);
    const auto ms = mean_std(row.rmse_per_seed);
    row.rmse_seed_mean = ms.mean;
    row.rmse_seed_std = ms.std;
    return row;
}

const ReportRow* ReportTable::find(const std::string& label) const
{
    for (const auto& r : rows) {
        if (r.label == label) {
            return &r;
        }
    }
    return nullptr;
}

bool ReportTable::operator==(const ReportTable& o) const
{
    return title == o.title && evaluation == o.evaluation && notes == o.notes && rows == o.rows &&
           provenance == o.provenance;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

nlohmann::json make_provenance(const nlohmann::json& config, const std::vector<std::uint64_t>& seeds,
                               const nlohmann::json& schema_manifest)
{
    return {{"seeds", seeds},
            {"config_hash", hex64(fnv1a64(config.dump()))},
            {"config", config},
            {"software_version", version_string()},
            {"schema", schema_manifest}};
}

void write_report_csv(std::ostream& out, const ReportTable& t)
{
    write_csv_row(out, {"label", "count", "mae", "mse", "rmse", "rmse_seed_mean", "rmse_seed_std", "status"});
    for (const auto& r : t.rows) {
        write_csv_row(out, {r.label, r.count ? std::to_string(*r.count) : std::string(), number_text(r.mae),
                            number_text(r.mse), number_text(r.rmse), number_text(r.rmse_seed_mean),
                            number_text(r.rmse_seed_std), r.status});
    }
}

nlohmann::json report_to_json(const ReportTable& t)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json seeds = nlohmann::json::array();
        for (double v : r.rmse_per_seed) {
            seeds.push_back(number_or_null(v));
        }
        rows.push_back({{"label", r.label},
                        {"count", r.count ? nlohmann::json(*r.count) : nlohmann::json(nullptr)},
                        {"mae", number_or_null(r.mae)},
                        {"mse", number_or_null(r.mse)},
                        {"rmse", number_or_null(r.rmse)},
                        {"rmse_seed_mean", number_or_null(r.rmse_seed_mean)},
                        {"rmse_seed_std", number_or_null(r.rmse_seed_std)},
                        {"rmse_per_seed", seeds},
                        {"status", r.status},
                        {"manifest", r.manifest}});
    }
    return {{"title", t.title},
            {"evaluation", t.evaluation},
            {"notes", t.notes},
            {"rows", rows},
            {"provenance", t.provenance}};
}

ReportTable report_from_json(const nlohmann::json& j)
{
    try {
        ReportTable t;
        t.title = j.at("title").get<std::string>();
        t.evaluation = j.value("evaluation", std::string());
        t.notes = j.value("notes", std::vector<std::string>{});
        t.provenance = j.value("provenance", nlohmann::json::object());
        for (const auto& r : j.at("rows")) {
            ReportRow row;
            row.label = r.at("label").get<std::string>();
            if (!r.at("count").is_null()) {
                row.count = r.at("count").get<Index>();
            }
            row.mae = null_or_number(r.at("mae"));
            row.mse = null_or_number(r.at("mse"));
            row.rmse = null_or_number(r.at("rmse"));
            row.rmse_seed_mean = null_or_number(r.at("rmse_seed_mean"));
            row.rmse_seed_std = null_or_number(r.at("rmse_seed_std"));
            for (const auto& v : r.at("rmse_per_seed")) {
                row.rmse_per_seed.push_back(null_or_number(v));
            }
            row.status = r.value("status", std::string("ok"));
            row.manifest = r.value("manifest", nlohmann::json::object());
            t.rows.push_back(std::move(row));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report JSON: ") + e.what());
    }
}

ReportFormat parse_report_format(const std::string& text)
{
    if (text == "csv") {
        return ReportFormat::csv;
    }
    if (text == "json") {
        return ReportFormat::json;
    }
    if (text == "both") {
        return ReportFormat::both;
    }
    throw ConfigError("unknown report format '" + text + "' (expected csv, json or both)");
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw ConfigError("failed writing '" + path.string() + "'");
    }
}

std::vector<std::filesystem::path> emit_report(const ReportTable& t, const std::filesystem::path& dir,
                                               const std::string& stem, ReportFormat format)
{
    std::vector<std::filesystem::path> written;
    if (format != ReportFormat::json) {
        std::ostringstream csv;
        write_report_csv(csv, t);
        written.push_back(dir / (stem + ".csv"));
        write_text_file(written.back(), csv.str());
    }
    if (format != ReportFormat::csv) {
        written.push_back(dir / (stem + ".json"));
        write_text_file(written.back(), report_to_json(t).dump(2) + "\n");
    }
    return written;
}

} // namespace thermo
