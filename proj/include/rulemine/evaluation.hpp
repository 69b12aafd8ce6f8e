#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rulemine/activation.hpp"
#include "rulemine/panel.hpp"
#include "rulemine/rule.hpp"

namespace rulemine {

// Per-row model output. has[i] == 0 marks rows no rule activates on; their
// values[i] is meaningless and serialized as an empty cell.
struct PredictionPanel {
    PanelIndex index;
    std::vector<double> values;
    std::vector<std::uint8_t> has;
};

// How the activated rules' conclusions fold into one number; swappable the
// same way the criterion is. Empty means the default: their plain mean.
using PredictionAggregator = std::function<double(std::span<const double>)>;

// Aggregates, per row, the predictions of all rules activating there.
PredictionPanel predict_panel(std::span<const Rule> rules,
                              std::span<const ActivationVector> activations,
                              const PanelIndex& index,
                              const PredictionAggregator& aggregate = {});

PredictionPanel predict_panel(std::span<const Rule> rules, const DiscretizedDataset& dd,
                              const PredictionAggregator& aggregate = {});

struct Portfolio {
    Date rebalance;
    std::vector<std::string> stocks;  // sorted by prediction desc, stock asc
};

// True for the first date of its (year, month) among `dates` (ascending).
bool is_first_business_day(std::span<const Date> dates, std::size_t i);

// One portfolio per month: on each first business day, the top_k stocks with
// the best prediction among those predicted that day. Months where nothing
// is predicted yield an empty portfolio.
std::vector<Portfolio> build_portfolios(const PredictionPanel& preds, std::size_t top_k);

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;  // cumulative, one per date from the first rebalance on
};

// Equal-weight daily portfolio returns accumulated additively (or
// compounded) across every returns-panel date from the first rebalance
// onward. Holding a stock with no return row on some date is an error.
ReturnSeries cumulative_return(std::span<const Portfolio> portfolios,
                               const PanelColumn& returns, bool compound = false);

}  // namespace rulemine
