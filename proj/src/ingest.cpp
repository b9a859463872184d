#include "thermoreg/ingest.hpp"

#include "thermoreg/common.hpp"
#include "thermoreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace thermo {

const DataColumn* CleanDataset::find(const std::string& name) const
{
    for (const auto& col : columns) {
        if (col.name == name) {
            return &col;
        }
    }
    return nullptr;
}

const DataColumn& CleanDataset::numeric(const std::string& name) const
{
    const auto* col = find(name);
    if (col == nullptr) {
        throw DataError("dataset has no column '" + name + "'");
    }
    if (col->kind != DataColumn::Kind::numeric) {
        throw DataError("column '" + name + "' is categorical, expected numeric");
    }
    return *col;
}

const DataColumn& CleanDataset::categorical(const std::string& name) const
{
    const auto* col = find(name);
    if (col == nullptr) {
        throw DataError("dataset has no column '" + name + "'");
    }
    if (col->kind != DataColumn::Kind::categorical) {
        throw DataError("column '" + name + "' is numeric, expected categorical");
    }
    return *col;
}

std::vector<std::string> CleanDataset::numeric_names() const
{
    std::vector<std::string> out;
    for (const auto& col : columns) {
        if (col.kind == DataColumn::Kind::numeric) {
            out.push_back(col.name);
        }
    }
    return out;
}

std::vector<std::string> CleanDataset::categorical_names() const
{
    std::vector<std::string> out;
    for (const auto& col : columns) {
        if (col.kind == DataColumn::Kind::categorical) {
            out.push_back(col.name);
        }
    }
    return out;
}

CleanDataset CleanDataset::subset(const std::vector<std::size_t>& rows) const
{
    CleanDataset out;
    out.target_name = target_name;
    out.n_rows = rows.size();
    out.target.reserve(rows.size());
    for (auto r : rows) {
        if (r >= n_rows) {
            throw DataError("row index out of range");
        }
        out.target.push_back(target[r]);
    }
    for (const auto& col : columns) {
        DataColumn c{col.name, col.kind, {}, {}};
        if (col.kind == DataColumn::Kind::numeric) {
            c.numbers.reserve(rows.size());
            for (auto r : rows) {
                c.numbers.push_back(col.numbers[r]);
            }
        } else {
            c.labels.reserve(rows.size());
            for (auto r : rows) {
                c.labels.push_back(col.labels[r]);
            }
        }
        out.columns.push_back(std::move(c));
    }
    return out;
}

RawTable CleanDataset::to_raw() const
{
    RawTable t;
    t.n_rows = n_rows;
    for (const auto& col : columns) {
        RawColumn rc{col.name, {}};
        rc.cells.reserve(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (col.kind == DataColumn::Kind::numeric) {
                rc.cells.emplace_back(col.numbers[r]);
            } else {
                rc.cells.emplace_back(col.labels[r]);
            }
        }
        t.columns.push_back(std::move(rc));
    }
    RawColumn tc{target_name, {}};
    for (double v : target) {
        tc.cells.emplace_back(v);
    }
    t.columns.push_back(std::move(tc));
    return t;
}

Schema CleanDataset::schema() const
{
    Schema s;
    s.name = "clean-dataset";
    s.target = target_name;
    for (const auto& col : columns) {
        s.columns.emplace_back(col.name, ColumnRole{col.kind == DataColumn::Kind::numeric ? RoleKind::feature
                                                                                         : RoleKind::categorical,
                                                    {}});
    }
    return s;
}

CleanDataset clean(const RawTable& table, const Schema& schema)
{
    const RawColumn* target_col = table.find(schema.target);
    if (schema.target.empty() || target_col == nullptr) {
        throw DataError("target column '" + schema.target + "' not found");
    }
    if (target_col->all_missing()) {
        throw DataError("target column '" + schema.target + "' is empty");
    }

    struct Kept {
        const RawColumn* raw;
        DataColumn::Kind kind;
    };
    std::vector<Kept> kept;
    std::vector<std::string> dropped_empty;
    std::vector<std::string> unmapped;
    for (const auto& col : table.columns) {
        if (&col == target_col) {
            continue;
        }
        if (!schema.mentions(col.name)) {
            unmapped.push_back(col.name);
        }
        ColumnRole role = schema.role_of(col.name);
        if (role.kind == RoleKind::ignore) {
            continue;
        }
        if (role.kind == RoleKind::target) {
            continue;
        }
        if (col.all_missing()) {
            dropped_empty.push_back(col.name);
            continue;
        }
        auto kind = role.kind == RoleKind::categorical ? DataColumn::Kind::categorical : DataColumn::Kind::numeric;
        kept.push_back({&col, kind});
    }
    if (!dropped_empty.empty()) {
        std::string msg = "dropped empty columns:";
        for (const auto& n : dropped_empty) {
            msg += " " + n;
        }
        warn(msg);
    }
    if (!unmapped.empty() && schema.default_role.kind == RoleKind::ignore) {
        std::string msg = "columns not in schema (ignored):";
        for (const auto& n : unmapped) {
            msg += " " + n;
        }
        warn(msg);
    }

    auto bad_row = [&](std::size_t r) {
        const Cell& t = target_col->cells[r];
        if (is_missing(t)) {
            return true;
        }
        for (const auto& k : kept) {
            if (is_missing(k.raw->cells[r])) {
                return true;
            }
        }
        return false;
    };

    CleanDataset ds;
    ds.target_name = target_col->name;
    for (const auto& k : kept) {
        ds.columns.push_back(DataColumn{k.raw->name, k.kind, {}, {}});
    }
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        if (bad_row(r)) {
            continue;
        }
        const Cell& t = target_col->cells[r];
        if (!is_number(t) || !std::isfinite(std::get<double>(t))) {
            throw DataError("target '" + ds.target_name + "' row " + std::to_string(r + 1) + ": non-numeric value '" +
                            cell_text(t) + "'");
        }
        ds.target.push_back(std::get<double>(t));
        for (std::size_t c = 0; c < kept.size(); ++c) {
            const Cell& cell = kept[c].raw->cells[r];
            auto& out = ds.columns[c];
            if (out.kind == DataColumn::Kind::categorical) {
                out.labels.push_back(cell_text(cell));
                continue;
            }
            if (!is_number(cell) || !std::isfinite(std::get<double>(cell))) {
                throw DataError("column '" + out.name + "' row " + std::to_string(r + 1) + ": non-numeric value '" +
                                cell_text(cell) + "'");
            }
            out.numbers.push_back(std::get<double>(cell));
        }
    }
    ds.n_rows = ds.target.size();
    if (ds.n_rows == 0) {
        throw DataError("cleaning dropped every row");
    }
    return ds;
}

CleanDataset average_rounds(const CleanDataset& ds, const std::vector<RoundGroup>& groups)
{
    std::map<std::string, std::size_t> member_group;
    std::set<std::string> bases;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].members.empty()) {
            throw DataError("round group '" + groups[g].base + "' has no members");
        }
        if (!bases.insert(groups[g].base).second) {
            throw DataError("round group '" + groups[g].base + "' defined twice");
        }
        for (const auto& m : groups[g].members) {
            const auto* col = ds.find(m);
            if (col == nullptr) {
                throw DataError("round group '" + groups[g].base + "' references missing column '" + m + "'");
            }
            if (col->kind != DataColumn::Kind::numeric) {
                throw DataError("round group '" + groups[g].base + "' references categorical column '" + m + "'");
            }
            if (!member_group.emplace(m, g).second) {
                throw DataError("column '" + m + "' belongs to overlapping round groups");
            }
        }
    }
    for (const auto& col : ds.columns) {
        if (bases.contains(col.name) && !member_group.contains(col.name)) {
            throw DataError("round group output '" + col.name + "' collides with an existing column");
        }
    }

    CleanDataset out;
    out.target_name = ds.target_name;
    out.target = ds.target;
    out.n_rows = ds.n_rows;
    std::vector<bool> emitted(groups.size(), false);
    for (const auto& col : ds.columns) {
        auto it = member_group.find(col.name);
        if (it == member_group.end()) {
            out.columns.push_back(col);
            continue;
        }
        const std::size_t g = it->second;
        if (emitted[g]) {
            continue;
        }
        emitted[g] = true;
        const auto& group = groups[g];
        DataColumn avg{group.base, DataColumn::Kind::numeric, std::vector<double>(ds.n_rows, 0.0), {}};
        for (const auto& m : group.members) {
            const auto& src = ds.find(m)->numbers;
            for (std::size_t r = 0; r < ds.n_rows; ++r) {
                avg.numbers[r] += src[r];
            }
        }
        const double k = static_cast<double>(group.members.size());
        for (auto& v : avg.numbers) {
            v /= k;
        }
        out.columns.push_back(std::move(avg));
    }
    return out;
}

SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec, const std::vector<double>* target)
{
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw ConfigError("test fraction must lie in (0, 1)");
    }
    if (n_rows < 2) {
        throw DataError("cannot split fewer than 2 rows");
    }
    auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n_rows) * (1.0 - spec.test_fraction)));
    n_train = std::clamp<std::size_t>(n_train, 1, n_rows - 1);
    const std::size_t n_test = n_rows - n_train;

    Rng rng(spec.seed);
    auto order = iota_indices(n_rows);
    rng.shuffle(order);

    SplitIndices out;
    if (spec.stratify) {
        if (target == nullptr || target->size() != n_rows) {
            throw ConfigError("stratified split needs the target column");
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return (*target)[a] < (*target)[b]; });
        // systematic sampling along the target order
        for (std::size_t i = 0; i < n_rows; ++i) {
            const std::size_t before = i * n_test / n_rows;
            const std::size_t after = (i + 1) * n_test / n_rows;
            (after > before ? out.test : out.train).push_back(order[i]);
        }
    } else {
        out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<CleanDataset, CleanDataset> split(const CleanDataset& ds, const SplitSpec& spec)
{
    auto idx = split_indices(ds.n_rows, spec, &ds.target);
    return {ds.subset(idx.train), ds.subset(idx.test)};
}

void write_clean_csv(std::ostream& out, const CleanDataset& ds)
{
    write_csv(out, ds.to_raw());
}

void write_clean_csv(const std::filesystem::path& path, const CleanDataset& ds)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    write_clean_csv(out, ds);
}

CleanDataset read_clean_csv(std::istream& in, const std::string& target_name,
                            const std::vector<std::string>& categorical)
{
    RawTable raw = read_csv(in, "clean csv");
    Schema s;
    s.target = target_name;
    s.default_role = {RoleKind::feature, {}};
    for (const auto& c : categorical) {
        s.columns.emplace_back(c, ColumnRole{RoleKind::categorical, {}});
    }
    for (const auto& col : raw.columns) {
        if (col.name != target_name && !s.mentions(col.name)) {
            s.columns.emplace_back(col.name, ColumnRole{RoleKind::feature, {}});
        }
    }
    return clean(raw, s);
}

CleanDataset load_dataset(const std::filesystem::path& path, const Schema& schema)
{
    CleanDataset ds = clean(load_csv(path), schema);
    std::vector<std::string> present;
    for (const auto& col : ds.columns) {
        present.push_back(col.name);
    }
    return average_rounds(ds, schema.round_groups(present));
}

} // namespace thermo
