#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace thermo {

struct Missing {
    bool operator==(const Missing&) const = default;
};

// A parsed CSV cell: missing marker, number, or free text.
using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }
inline bool is_number(const Cell& c) { return std::holds_alternative<double>(c); }
inline bool is_text(const Cell& c) { return std::holds_alternative<std::string>(c); }

// Text form of a cell as the CSV writer would emit it (missing -> "").
std::string cell_text(const Cell& c);

// Classifies one raw field. Blank, "NA" and any-case "NaN" are missing;
// fields that parse fully as a double become numbers.
Cell parse_cell(const std::string& field);

struct RawColumn {
    std::string name;
    std::vector<Cell> cells;

    // True when every non-missing cell is numeric.
    bool numeric() const;
    bool all_missing() const;
};

struct RawTable {
    std::vector<RawColumn> columns;
    std::size_t n_rows = 0;

    const RawColumn* find(const std::string& name) const;
    std::vector<std::string> names() const;
};

// Reads RFC 4180 style CSV (comma, double-quote escaping, one header row).
RawTable read_csv(std::istream& in, const std::string& source_name = "<stream>");
RawTable load_csv(const std::filesystem::path& path);

// Splits CSV text into records of raw fields.
std::vector<std::vector<std::string>> split_csv_records(std::istream& in);

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
void write_csv(std::ostream& out, const RawTable& table);

} // namespace thermo
