#include "thermoreg/schema.hpp"

#include "thermoreg/common.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace thermo {

ColumnRole parse_role(const std::string& text)
{
    static const std::string group_prefix = "round-group:";
    if (text == "feature") {
        return {RoleKind::feature, {}};
    }
    if (text == "categorical") {
        return {RoleKind::categorical, {}};
    }
    if (text == "target") {
        return {RoleKind::target, {}};
    }
    if (text == "ignore") {
        return {RoleKind::ignore, {}};
    }
    if (text.rfind(group_prefix, 0) == 0 && text.size() > group_prefix.size()) {
        return {RoleKind::round_group, text.substr(group_prefix.size())};
    }
    throw ConfigError("unknown column role '" + text + "'");
}

std::string role_text(const ColumnRole& role)
{
    switch (role.kind) {
    case RoleKind::feature:
        return "feature";
    case RoleKind::round_group:
        return "round-group:" + role.group;
    case RoleKind::categorical:
        return "categorical";
    case RoleKind::target:
        return "target";
    case RoleKind::ignore:
        return "ignore";
    }
    return "ignore";
}

const OrdinalMap& default_age_map()
{
    static const OrdinalMap map{
        {"18-20", 0}, {"21-25", 1}, {"26-30", 2}, {"31-40", 3},
        {"41-50", 4}, {"51-60", 5}, {">60", 6},   {">70", 7},
    };
    return map;
}

ColumnRole Schema::role_of(const std::string& column) const
{
    if (column == target) {
        return {RoleKind::target, {}};
    }
    for (const auto& [name, role] : columns) {
        if (name == column) {
            return role;
        }
    }
    return default_role;
}

bool Schema::mentions(const std::string& column) const
{
    if (column == target) {
        return true;
    }
    for (const auto& entry : columns) {
        if (entry.first == column) {
            return true;
        }
    }
    return false;
}

std::vector<RoundGroup> Schema::round_groups(const std::vector<std::string>& present) const
{
    std::set<std::string> have(present.begin(), present.end());
    std::vector<RoundGroup> groups;
    for (const auto& [name, role] : columns) {
        if (role.kind != RoleKind::round_group || !have.contains(name)) {
            continue;
        }
        auto it = std::find_if(groups.begin(), groups.end(), [&](const RoundGroup& g) { return g.base == role.group; });
        if (it == groups.end()) {
            groups.push_back({role.group, {name}});
        } else {
            it->members.push_back(name);
        }
    }
    return groups;
}

std::vector<RoundGroup> Schema::round_groups() const
{
    std::vector<std::string> all;
    for (const auto& entry : columns) {
        all.push_back(entry.first);
    }
    return round_groups(all);
}

const OrdinalMap& Schema::ordinal_map(const std::string& variable) const
{
    if (auto it = ordinal_maps.find(variable); it != ordinal_maps.end()) {
        return it->second;
    }
    if (variable == "Age") {
        return default_age_map();
    }
    throw ConfigError("no ordinal map for variable '" + variable + "'");
}

nlohmann::json Schema::to_json() const
{
    nlohmann::json j;
    j["format_version"] = 1;
    j["name"] = name;
    j["target"] = target;
    j["default_role"] = role_text(default_role);
    j["std_convention"] = std_convention;
    // ordered array so the manifest hash is stable
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [col, role] : columns) {
        cols.push_back({{"column", col}, {"role", role_text(role)}});
    }
    j["columns"] = cols;
    nlohmann::json maps = nlohmann::json::object();
    for (const auto& [var, map] : ordinal_maps) {
        maps[var] = map;
    }
    j["ordinal_maps"] = maps;
    return j;
}

Schema Schema::from_json(const nlohmann::json& j)
{
    try {
        Schema s;
        s.name = j.value("name", std::string("custom"));
        s.target = j.at("target").get<std::string>();
        s.default_role = parse_role(j.value("default_role", std::string("ignore")));
        s.std_convention = j.value("std_convention", std::string("population"));
        if (s.std_convention != "population") {
            throw ConfigError("schema: only the population standard deviation convention is supported");
        }
        const auto& cols = j.at("columns");
        std::set<std::string> seen;
        auto add = [&](const std::string& col, const std::string& role) {
            if (!seen.insert(col).second) {
                throw ConfigError("schema: column '" + col + "' listed twice");
            }
            s.columns.emplace_back(col, parse_role(role));
        };
        if (cols.is_array()) {
            for (const auto& entry : cols) {
                add(entry.at("column").get<std::string>(), entry.at("role").get<std::string>());
            }
        } else {
            for (const auto& [col, role] : cols.items()) {
                add(col, role.get<std::string>());
            }
        }
        if (j.contains("ordinal_maps")) {
            for (const auto& [var, map] : j.at("ordinal_maps").items()) {
                s.ordinal_maps[var] = map.get<OrdinalMap>();
            }
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
}

Schema Schema::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open schema '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("schema '" + path.string() + "': " + e.what());
    }
    return from_json(j);
}

const std::vector<ThermalSite>& flir_thermal_sites()
{
    static const std::vector<ThermalSite> sites{
        {"T_offset", "T_offset"},
        {"Max1R13_", "Max1R13_1"},
        {"Max1L13_", "Max1L13_1"},
        {"aveAllR13_", "aveAllR13_1"},
        {"aveAllL13_", "aveAllL13_1"},
        {"T_RC", "T_RC_1"},
        {"T_RC_Dry", "T_RC_Dry_1"},
        {"T_RC_Wet", "T_RC_Wet_1"},
        {"T_RC_Max", "T_RC_Max_1"},
        {"T_LC", "T_LC_1"},
        {"T_LC_Dry", "T_LC_Dry_1"},
        {"T_LC_Wet", "T_LC_Wet_1"},
        {"T_LC_Max", "T_LC_Max_1"},
        {"RCC", "RCC_1"},
        {"LCC", "LCC_1"},
        {"canthiMax", "canthiMax_1"},
        {"canthi4Max", "canthi4Max_1"},
        {"T_FHCC", "T_FHCC_1"},
        {"T_FHRC", "T_FHRC_1"},
        {"T_FHLC", "T_FHLC_1"},
        {"T_FHBC", "T_FHBC_1"},
        {"T_FHTC", "T_FHTC_1"},
        {"T_FH_Max", "T_FH_Max_1"},
        {"T_FHC_Max", "T_FHC_Max_1"},
        {"T_Max", "T_Max_1"},
        {"T_OR", "T_OR_1"},
        {"T_OR_Max", "T_OR_Max_1"},
    };
    return sites;
}

std::string flir_round_column(const ThermalSite& site, int round)
{
    return site.prefix + std::to_string(round);
}

Schema default_flir_schema()
{
    Schema s;
    s.name = "flir-groups1and2";
    s.target = "aveOralM";
    s.columns.emplace_back("SubjectID", ColumnRole{RoleKind::ignore, {}});
    for (const auto& site : flir_thermal_sites()) {
        for (int round = 1; round <= 4; ++round) {
            s.columns.emplace_back(flir_round_column(site, round), ColumnRole{RoleKind::round_group, site.output});
        }
    }
    for (const char* col : {"Gender", "Age", "Ethnicity"}) {
        s.columns.emplace_back(col, ColumnRole{RoleKind::categorical, {}});
    }
    for (const char* col : {"T_atm", "Humidity", "Distance"}) {
        s.columns.emplace_back(col, ColumnRole{RoleKind::feature, {}});
    }
    for (const char* col : {"Cosmetics", "Time", "Date", "aveOralF"}) {
        s.columns.emplace_back(col, ColumnRole{RoleKind::ignore, {}});
    }
    s.ordinal_maps["Age"] = default_age_map();
    return s;
}

} // namespace thermo
