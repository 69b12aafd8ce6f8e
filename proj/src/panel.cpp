#include "rulemine/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "rulemine/csv.hpp"

namespace rulemine {

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

int parse_int_field(std::string_view text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("invalid date: non-numeric component");
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw std::runtime_error("invalid date: '" + std::string(text) +
                                 "' (expected YYYY-MM-DD)");
    Date d;
    try {
        d.year = parse_int_field(text.substr(0, 4));
        d.month = parse_int_field(text.substr(5, 2));
        d.day = parse_int_field(text.substr(8, 2));
    } catch (const std::exception&) {
        throw std::runtime_error("invalid date: '" + std::string(text) +
                                 "' (expected YYYY-MM-DD)");
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw std::runtime_error("invalid date: '" + std::string(text) + "' (out of range)");
    return d;
}

std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

bool panel_row_less(const PanelEntry& a, const PanelEntry& b) {
    if (a.stock != b.stock) return a.stock < b.stock;
    return a.date < b.date;
}

DateIndex build_date_index(const PanelIndex& index) {
    DateIndex out;
    out.dates.reserve(index.size());
    for (const auto& e : index.entries) out.dates.push_back(e.date);
    std::sort(out.dates.begin(), out.dates.end());
    out.dates.erase(std::unique(out.dates.begin(), out.dates.end()), out.dates.end());
    out.ordinal.reserve(index.size());
    for (const auto& e : index.entries) {
        auto it = std::lower_bound(out.dates.begin(), out.dates.end(), e.date);
        out.ordinal.push_back(static_cast<std::uint32_t>(it - out.dates.begin()));
    }
    return out;
}

namespace {

struct RawPanel {
    std::vector<std::string> value_names;
    PanelIndex index;
    std::vector<std::vector<double>> columns;  // columns[j][row]
};

// Shared loader for every Date,Stock,<value...> file: parses, sorts into
// panel row order and rejects duplicate (date, stock) pairs.
RawPanel load_raw_panel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "Date" || header[1] != "Stock")
        throw std::runtime_error("bad header in " + path.string() +
                                 " (expected Date,Stock,<value>...)");

    RawPanel raw;
    raw.value_names.assign(header.begin() + 2, header.end());
    const std::size_t d = raw.value_names.size();
    raw.columns.resize(d);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        PanelEntry e;
        e.date = parse_date(fields[0]);
        e.stock = fields[1];
        if (e.stock.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": empty stock identifier");
        raw.index.entries.push_back(std::move(e));
        for (std::size_t j = 0; j < d; ++j) {
            if (fields[2 + j].empty())
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": missing value in column " + raw.value_names[j]);
            try {
                raw.columns[j].push_back(parse_double(fields[2 + j]));
            } catch (const std::exception& ex) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                         ex.what());
            }
        }
    }
    if (raw.index.entries.empty()) throw std::runtime_error("empty panel: " + path.string());

    std::vector<std::size_t> perm(raw.index.entries.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return panel_row_less(raw.index.entries[a], raw.index.entries[b]);
    });

    RawPanel sorted;
    sorted.value_names = raw.value_names;
    sorted.index.entries.reserve(perm.size());
    sorted.columns.assign(d, {});
    for (auto& col : sorted.columns) col.reserve(perm.size());
    for (std::size_t p : perm) {
        sorted.index.entries.push_back(std::move(raw.index.entries[p]));
        for (std::size_t j = 0; j < d; ++j) sorted.columns[j].push_back(raw.columns[j][p]);
    }
    for (std::size_t i = 1; i < sorted.index.entries.size(); ++i) {
        if (sorted.index.entries[i] == sorted.index.entries[i - 1])
            throw std::runtime_error("duplicate index entry: (" +
                                     to_string(sorted.index.entries[i].date) + ", " +
                                     sorted.index.entries[i].stock + ") in " + path.string());
    }
    return sorted;
}

}  // namespace

PanelColumn load_panel_column(const std::filesystem::path& path) {
    RawPanel raw = load_raw_panel(path);
    if (raw.value_names.size() != 1)
        throw std::runtime_error(path.string() + ": expected exactly one value column, got " +
                                 std::to_string(raw.value_names.size()));
    PanelColumn col;
    col.index = std::move(raw.index);
    col.values = std::move(raw.columns[0]);
    col.name = std::move(raw.value_names[0]);
    return col;
}

Dataset load_dataset(const std::filesystem::path& target_path,
                     const std::filesystem::path& features_path) {
    PanelColumn target = load_panel_column(target_path);
    RawPanel feats = load_raw_panel(features_path);

    if (feats.index.entries != target.index.entries) {
        if (feats.index.size() != target.index.size())
            throw std::runtime_error("index mismatch: " + target_path.string() + " has " +
                                     std::to_string(target.index.size()) + " rows, " +
                                     features_path.string() + " has " +
                                     std::to_string(feats.index.size()));
        for (std::size_t i = 0; i < feats.index.size(); ++i) {
            if (feats.index.entries[i] != target.index.entries[i])
                throw std::runtime_error(
                    "index mismatch at row " + std::to_string(i) + ": target has (" +
                    to_string(target.index.entries[i].date) + ", " +
                    target.index.entries[i].stock + "), features have (" +
                    to_string(feats.index.entries[i].date) + ", " +
                    feats.index.entries[i].stock + ")");
        }
    }

    std::unordered_map<std::string, int> seen;
    for (const auto& name : feats.value_names) {
        if (++seen[name] > 1) throw std::runtime_error("duplicate feature name: " + name);
        if (name.find(',') != std::string::npos || name.find('\'') != std::string::npos)
            throw std::runtime_error("feature name contains ',' or '\'': " + name);
    }

    Dataset ds;
    ds.index = std::move(target.index);
    ds.y = std::move(target.values);
    ds.target_name = std::move(target.name);
    ds.feature_names = std::move(feats.value_names);
    ds.features = std::move(feats.columns);
    return ds;
}

std::vector<double> compute_bin_edges(std::span<const double> values, std::size_t m_n) {
    if (m_n < 1) throw std::runtime_error("bin count must be at least 1");
    if (values.empty()) throw std::runtime_error("cannot bin an empty value vector");
    const std::size_t n = values.size();
    if (n < m_n)
        throw std::runtime_error("fewer points (" + std::to_string(n) + ") than bins (" +
                                 std::to_string(m_n) + ")");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    edges.reserve(m_n - 1);
    for (std::size_t k = 1; k < m_n; ++k) {
        // order statistic at ceil(k*n/m_n), computed exactly in integers
        std::size_t idx = (k * n + m_n - 1) / m_n;
        edges.push_back(sorted[idx - 1]);
    }
    return edges;
}

BinEdges compute_all_bin_edges(const Dataset& ds, std::size_t m_n) {
    BinEdges edges;
    edges.bin_count = m_n;
    edges.per_feature.reserve(ds.d());
    for (const auto& col : ds.features) edges.per_feature.push_back(compute_bin_edges(col, m_n));
    return edges;
}

DiscretizedDataset discretize(const Dataset& ds, const BinEdges& edges) {
    if (edges.per_feature.size() != ds.d())
        throw std::runtime_error("edge set does not match the feature count");
    if (edges.bin_count < 1 || edges.bin_count > 256)
        throw std::runtime_error("bin count must be in [1, 256]");
    DiscretizedDataset dd;
    dd.index = ds.index;
    dd.bin_count = edges.bin_count;
    dd.bins.resize(ds.d());
    for (std::size_t j = 0; j < ds.d(); ++j) {
        const auto& cuts = edges.per_feature[j];
        if (cuts.size() + 1 != edges.bin_count)
            throw std::runtime_error("edge count does not match the bin count");
        auto& out = dd.bins[j];
        out.reserve(ds.n());
        for (double v : ds.features[j]) {
            auto it = std::lower_bound(cuts.begin(), cuts.end(), v);
            out.push_back(static_cast<std::uint8_t>(it - cuts.begin()));
        }
    }
    return dd;
}

DiscretizedDataset discretize_dataset(const Dataset& ds, std::size_t m_n, bool per_stock) {
    if (!per_stock) return discretize(ds, compute_all_bin_edges(ds, m_n));

    if (m_n < 1 || m_n > 256) throw std::runtime_error("bin count must be in [1, 256]");
    DiscretizedDataset dd;
    dd.index = ds.index;
    dd.bin_count = m_n;
    dd.bins.assign(ds.d(), std::vector<std::uint8_t>(ds.n()));
    // entries are sorted by stock, so each stock is one contiguous block
    std::size_t begin = 0;
    while (begin < ds.n()) {
        std::size_t end = begin + 1;
        while (end < ds.n() && ds.index.entries[end].stock == ds.index.entries[begin].stock)
            ++end;
        for (std::size_t j = 0; j < ds.d(); ++j) {
            std::span<const double> block(ds.features[j].data() + begin, end - begin);
            std::vector<double> cuts;
            try {
                cuts = compute_bin_edges(block, m_n);
            } catch (const std::exception& ex) {
                throw std::runtime_error("stock " + ds.index.entries[begin].stock + ": " +
                                         ex.what());
            }
            for (std::size_t i = begin; i < end; ++i) {
                auto it = std::lower_bound(cuts.begin(), cuts.end(), ds.features[j][i]);
                dd.bins[j][i] = static_cast<std::uint8_t>(it - cuts.begin());
            }
        }
        begin = end;
    }
    return dd;
}

}  // namespace rulemine
