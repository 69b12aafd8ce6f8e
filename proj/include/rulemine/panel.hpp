#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rulemine {

// Calendar date, ISO-8601 only. Comparable, so (stock, date) ordering and
// month grouping need no timezone or locale machinery.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    auto operator<=>(const Date&) const = default;
};

Date parse_date(std::string_view text);
std::string to_string(const Date& d);

// One observation point of the panel.
struct PanelEntry {
    Date date;
    std::string stock;
    auto operator<=>(const PanelEntry&) const = default;
};

// Panel row order: stock ascending, then date ascending. The defaulted
// comparison above is field order (date first), so sorting and searching
// panels goes through this instead.
bool panel_row_less(const PanelEntry& a, const PanelEntry& b);

// The (date x stock) index shared by the target and every feature.
// Entries are unique and sorted by (stock ascending, date ascending).
struct PanelIndex {
    std::vector<PanelEntry> entries;
    std::size_t size() const { return entries.size(); }
};

// Distinct sorted dates of a PanelIndex plus, for every row, the position of
// its date in that list. Built once and reused by the rolling criterion.
struct DateIndex {
    std::vector<Date> dates;
    std::vector<std::uint32_t> ordinal;  // per row, index into dates
};

DateIndex build_date_index(const PanelIndex& index);

// A single named value column over a panel index (target or realized returns).
struct PanelColumn {
    PanelIndex index;
    std::vector<double> values;
    std::string name;
};

struct Dataset {
    PanelIndex index;
    std::vector<double> y;
    std::string target_name;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> features;  // features[j][row]

    std::size_t n() const { return index.size(); }
    std::size_t d() const { return feature_names.size(); }
};

// Per-feature quantile cut points: exactly bin_count - 1 non-decreasing
// values per feature.
struct BinEdges {
    std::size_t bin_count = 0;
    std::vector<std::vector<double>> per_feature;
};

// The discretized feature matrix every rule evaluation runs on. Bin indices
// are stored as bytes, which caps bin_count at 255.
struct DiscretizedDataset {
    PanelIndex index;
    std::size_t bin_count = 0;
    std::vector<std::vector<std::uint8_t>> bins;  // bins[j][row]

    std::size_t n() const { return index.size(); }
    std::size_t d() const { return bins.size(); }
};

// Loads one Date,Stock,<value> CSV, sorted and validated.
PanelColumn load_panel_column(const std::filesystem::path& path);

// Loads the target file (exactly one value column) and the feature file,
// checks that both carry the identical (Date, Stock) index.
Dataset load_dataset(const std::filesystem::path& target_path,
                     const std::filesystem::path& features_path);

// Empirical quantiles at levels k/m_n, k = 1..m_n-1, using the inverted-CDF
// definition: the order statistic at ceil(q * n). No interpolation.
std::vector<double> compute_bin_edges(std::span<const double> values, std::size_t m_n);

BinEdges compute_all_bin_edges(const Dataset& ds, std::size_t m_n);

// Maps every value to the count of edges strictly below it; a value equal to
// a cut point falls in the lower bin.
DiscretizedDataset discretize(const Dataset& ds, const BinEdges& edges);

// Convenience wrapper: pooled quantiles by default; per_stock computes edges
// from each stock's own rows instead.
DiscretizedDataset discretize_dataset(const Dataset& ds, std::size_t m_n, bool per_stock = false);

}  // namespace rulemine
