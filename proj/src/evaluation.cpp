#include "rulemine/evaluation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace rulemine {

PredictionPanel predict_panel(std::span<const Rule> rules,
                              std::span<const ActivationVector> activations,
                              const PanelIndex& index, const PredictionAggregator& aggregate) {
    if (rules.empty()) throw std::runtime_error("empty ruleset");
    if (rules.size() != activations.size())
        throw std::runtime_error("rule and activation counts disagree");
    const std::size_t n = index.size();
    for (const auto& act : activations)
        if (act.size() != n) throw std::runtime_error("activation length mismatch");

    PredictionPanel panel;
    panel.index = index;
    panel.values.assign(n, 0.0);
    panel.has.assign(n, 0);

    std::vector<double> active;
    active.reserve(rules.size());
    for (std::size_t i = 0; i < n; ++i) {
        active.clear();
        for (std::size_t r = 0; r < rules.size(); ++r)
            if (activations[r].test(i)) active.push_back(rules[r].prediction);
        if (active.empty()) continue;
        panel.has[i] = 1;
        if (aggregate) {
            panel.values[i] = aggregate(active);
        } else {
            double sum = 0.0;
            for (double v : active) sum += v;
            panel.values[i] = sum / static_cast<double>(active.size());
        }
    }
    return panel;
}

PredictionPanel predict_panel(std::span<const Rule> rules, const DiscretizedDataset& dd,
                              const PredictionAggregator& aggregate) {
    std::vector<ActivationVector> acts;
    acts.reserve(rules.size());
    for (const Rule& r : rules) acts.push_back(evaluate_condition(r.condition, dd));
    return predict_panel(rules, acts, dd.index, aggregate);
}

bool is_first_business_day(std::span<const Date> dates, std::size_t i) {
    if (i >= dates.size()) throw std::runtime_error("date position out of range");
    if (i == 0) return true;
    return dates[i].year != dates[i - 1].year || dates[i].month != dates[i - 1].month;
}

std::vector<Portfolio> build_portfolios(const PredictionPanel& preds, std::size_t top_k) {
    if (top_k < 1) throw std::runtime_error("portfolio size must be at least 1");
    if (preds.values.size() != preds.index.size() || preds.has.size() != preds.index.size())
        throw std::runtime_error("prediction panel shape mismatch");

    const DateIndex didx = build_date_index(preds.index);
    std::vector<std::vector<std::size_t>> rows_by_date(didx.dates.size());
    for (std::size_t i = 0; i < preds.index.size(); ++i)
        rows_by_date[didx.ordinal[i]].push_back(i);

    std::vector<Portfolio> portfolios;
    for (std::size_t p = 0; p < didx.dates.size(); ++p) {
        if (!is_first_business_day(didx.dates, p)) continue;
        Portfolio pf;
        pf.rebalance = didx.dates[p];
        std::vector<std::size_t> rows;
        for (std::size_t i : rows_by_date[p])
            if (preds.has[i]) rows.push_back(i);
        std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            if (preds.values[a] != preds.values[b]) return preds.values[a] > preds.values[b];
            return preds.index.entries[a].stock < preds.index.entries[b].stock;
        });
        const std::size_t take = std::min(top_k, rows.size());
        pf.stocks.reserve(take);
        for (std::size_t i = 0; i < take; ++i)
            pf.stocks.push_back(preds.index.entries[rows[i]].stock);
        portfolios.push_back(std::move(pf));
    }
    return portfolios;
}

ReturnSeries cumulative_return(std::span<const Portfolio> portfolios,
                               const PanelColumn& returns, bool compound) {
    ReturnSeries series;
    if (portfolios.empty()) return series;
    for (std::size_t i = 1; i < portfolios.size(); ++i)
        if (!(portfolios[i - 1].rebalance < portfolios[i].rebalance))
            throw std::runtime_error("portfolios are not in ascending rebalance order");

    // stock -> contiguous [begin, end) block of the (stock, date)-sorted index
    std::map<std::string, std::pair<std::size_t, std::size_t>> blocks;
    {
        std::size_t begin = 0;
        while (begin < returns.index.size()) {
            std::size_t end = begin + 1;
            while (end < returns.index.size() &&
                   returns.index.entries[end].stock == returns.index.entries[begin].stock)
                ++end;
            blocks[returns.index.entries[begin].stock] = {begin, end};
            begin = end;
        }
    }
    auto lookup = [&](const std::string& stock, const Date& date) -> double {
        auto bit = blocks.find(stock);
        if (bit != blocks.end()) {
            const auto [begin, end] = bit->second;
            auto first = returns.index.entries.begin() + static_cast<std::ptrdiff_t>(begin);
            auto last = returns.index.entries.begin() + static_cast<std::ptrdiff_t>(end);
            auto it = std::lower_bound(first, last, date, [](const PanelEntry& e, const Date& d) {
                return e.date < d;
            });
            if (it != last && it->date == date)
                return returns.values[static_cast<std::size_t>(it -
                                                               returns.index.entries.begin())];
        }
        throw std::runtime_error("no return for stock " + stock + " on " + to_string(date));
    };

    const DateIndex didx = build_date_index(returns.index);
    const Date first = portfolios[0].rebalance;
    std::size_t current = 0;
    double cum = 0.0;
    for (const Date& day : didx.dates) {
        if (day < first) continue;
        while (current + 1 < portfolios.size() && !(day < portfolios[current + 1].rebalance))
            ++current;
        const auto& held = portfolios[current].stocks;
        double daily = 0.0;
        if (!held.empty()) {
            double sum = 0.0;
            for (const auto& stock : held) sum += lookup(stock, day);
            daily = sum / static_cast<double>(held.size());
        }
        if (compound)
            cum = (1.0 + cum) * (1.0 + daily) - 1.0;
        else
            cum += daily;
        series.dates.push_back(day);
        series.values.push_back(cum);
    }
    return series;
}

}  // namespace rulemine
