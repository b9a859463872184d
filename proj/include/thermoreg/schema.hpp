#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace thermo {

enum class RoleKind { feature, round_group, categorical, target, ignore };

struct ColumnRole {
    RoleKind kind = RoleKind::ignore;
    std::string group; // output column name for round_group members

    bool operator==(const ColumnRole&) const = default;
};

// "feature", "round-group:<base>", "categorical", "target", "ignore"
ColumnRole parse_role(const std::string& text);
std::string role_text(const ColumnRole& role);

struct RoundGroup {
    std::string base;
    std::vector<std::string> members;
};

using OrdinalMap = std::map<std::string, int>;

// Age ranges in increasing order.
const OrdinalMap& default_age_map();

// Maps raw CSV column names to roles. Entries for columns absent from a
// table are skipped, so one schema serves both the four-round release and
// single-round extracts of it.
struct Schema {
    std::string name = "custom";
    std::string target;
    ColumnRole default_role{RoleKind::ignore, {}};
    std::vector<std::pair<std::string, ColumnRole>> columns;
    std::map<std::string, OrdinalMap> ordinal_maps;
    std::string std_convention = "population";

    ColumnRole role_of(const std::string& column) const;
    bool mentions(const std::string& column) const;

    // Groups restricted to the given present columns; groups with no
    // present member are omitted. Order follows first appearance.
    std::vector<RoundGroup> round_groups(const std::vector<std::string>& present) const;
    std::vector<RoundGroup> round_groups() const;

    const OrdinalMap& ordinal_map(const std::string& variable) const;

    nlohmann::json to_json() const;
    static Schema from_json(const nlohmann::json& j);
    static Schema load(const std::filesystem::path& path);
};

// Layout of the FLIR_groups1and2 release: 27 thermal sites recorded over
// four rounds, environmental readings, demographics, and the two oral
// targets. Averaged outputs carry the names the feature recipes use
// (T_Max_1, canthi4Max_1, T_offset, ...).
Schema default_flir_schema();

// Thermal sites as (raw round prefix, averaged output name).
struct ThermalSite {
    std::string prefix;
    std::string output;
};
const std::vector<ThermalSite>& flir_thermal_sites();
std::string flir_round_column(const ThermalSite& site, int round);

} // namespace thermo
