#include "thermoreg/csv.hpp"

#include "thermoreg/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace thermo {
namespace {

std::string trim(const std::string& s)
{
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool iequals(const std::string& a, const char* b)
{
    std::size_t n = std::char_traits<char>::length(b);
    if (a.size() != n) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

} // namespace

std::string cell_text(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    return {};
}

Cell parse_cell(const std::string& field)
{
    std::string t = trim(field);
    if (t.empty() || t == "NA" || iequals(t, "nan")) {
        return Missing{};
    }
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') {
        ++first;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) {
        return value;
    }
    return field;
}

bool RawColumn::numeric() const
{
    return std::none_of(cells.begin(), cells.end(), [](const Cell& c) { return is_text(c); });
}

bool RawColumn::all_missing() const
{
    return std::all_of(cells.begin(), cells.end(), [](const Cell& c) { return is_missing(c); });
}

const RawColumn* RawTable::find(const std::string& name) const
{
    for (const auto& col : columns) {
        if (col.name == name) {
            return &col;
        }
    }
    return nullptr;
}

std::vector<std::string> RawTable::names() const
{
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& col : columns) {
        out.push_back(col.name);
    }
    return out;
}

std::vector<std::vector<std::string>> split_csv_records(std::istream& in)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool first_char = true;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // a lone empty field is a blank line
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    char ch = 0;
    while (in.get(ch)) {
        if (first_char) {
            first_char = false;
            // UTF-8 byte order mark
            if (static_cast<unsigned char>(ch) == 0xEF) {
                char b1 = 0;
                char b2 = 0;
                if (in.get(b1) && in.get(b2) && static_cast<unsigned char>(b1) == 0xBB && static_cast<unsigned char>(b2) == 0xBF) {
                    continue;
                }
                throw DataError("csv: malformed byte order mark");
            }
        }
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (field_started && !field.empty()) {
                field.push_back(ch);
            } else {
                in_quotes = true;
                field_started = true;
            }
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (in.peek() == '\n') {
                in.get(ch);
            }
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(ch);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted field");
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }
    return records;
}

RawTable read_csv(std::istream& in, const std::string& source_name)
{
    auto records = split_csv_records(in);
    if (records.empty()) {
        throw DataError(source_name + ": missing header row");
    }
    RawTable table;
    std::set<std::string> seen;
    for (const auto& name : records.front()) {
        std::string clean_name = trim(name);
        if (!seen.insert(clean_name).second) {
            throw DataError(source_name + ": duplicate header name '" + clean_name + "'");
        }
        table.columns.push_back(RawColumn{clean_name, {}});
    }
    const std::size_t width = table.columns.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != width) {
            throw DataError(source_name + ": row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                            " fields, header has " + std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) {
            table.columns[c].cells.push_back(parse_cell(rec[c]));
        }
    }
    table.n_rows = records.size() - 1;
    return table;
}

RawTable load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return read_csv(in, path.string());
}

std::string csv_escape(const std::string& field)
{
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                           std::isspace(static_cast<unsigned char>(field.back())))) {
        needs_quotes = true;
    }
    if (!needs_quotes) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

void write_csv(std::ostream& out, const RawTable& table)
{
    write_csv_row(out, table.names());
    std::vector<std::string> row(table.columns.size());
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            row[c] = cell_text(table.columns[c].cells[r]);
        }
        write_csv_row(out, row);
    }
}

} // namespace thermo
