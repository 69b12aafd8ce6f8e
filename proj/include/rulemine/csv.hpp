#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulemine/evaluation.hpp"
#include "rulemine/panel.hpp"
#include "rulemine/rule.hpp"

namespace rulemine {

std::string format_double(double v);  // shortest exact round-trip form
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

std::string csv_escape(const std::string& field);
std::vector<std::string> split_csv_line(const std::string& line);

// One exported rule. Bin indices and other numerics are kept as written so
// a file survives a read/write round trip byte for byte.
struct RuleRecord {
    std::string name;
    std::vector<std::string> feature_names;
    std::vector<std::uint8_t> bmins;
    std::vector<std::uint8_t> bmaxs;
    double cov = 0.0;
    double pred = 0.0;
    double crit_mean = 0.0;
    double crit_min = 0.0;
    double crit_max = 0.0;
    double pvalue = 0.0;
};

RuleRecord to_record(const Rule& rule, std::size_t ordinal,
                     std::span<const std::string> feature_names);

// Rebuilds the condition of a record given the panel's feature name order.
Condition record_condition(const RuleRecord& rec, std::span<const std::string> feature_names);

// Columns: name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,pvalue
// with the list cells styled as ['X[1]', 'X[2]'] / [3, 0].
void write_rules_csv(const std::filesystem::path& path, std::span<const RuleRecord> records);
std::vector<RuleRecord> read_rules_csv(const std::filesystem::path& path);

// Date,Stock,prediction — prediction empty on rows no rule activates on.
void write_predictions_csv(const std::filesystem::path& path, const PredictionPanel& preds);
PredictionPanel read_predictions_csv(const std::filesystem::path& path);

// rebalance_date,stock — one row per held stock; empty months write no rows.
void write_holdings_csv(const std::filesystem::path& path, std::span<const Portfolio> portfolios);

// Date,cumulative_return
void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& series);

// The discretized matrix as Date,Stock,<feature...> with integer bin cells.
// The bin count is not stored in the file; the reader takes it from the
// caller and rejects any out-of-range cell.
struct BinsFile {
    DiscretizedDataset dd;
    std::vector<std::string> feature_names;
};

void write_bins_csv(const std::filesystem::path& path, const DiscretizedDataset& dd,
                    std::span<const std::string> feature_names);
BinsFile read_bins_csv(const std::filesystem::path& path, std::size_t bin_count);

}  // namespace rulemine
