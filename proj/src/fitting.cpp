#include "rulemine/fitting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rulemine/rule.hpp"

namespace rulemine {

Objective objective_from_string(std::string_view s) {
    if (s == "maximize") return Objective::maximize;
    if (s == "minimize") return Objective::minimize;
    throw std::runtime_error("unknown objective: '" + std::string(s) +
                             "' (expected maximize or minimize)");
}

std::string_view to_string(Objective o) {
    return o == Objective::maximize ? "maximize" : "minimize";
}

std::string_view to_string(GateCondition c) {
    switch (c) {
        case GateCondition::coverage: return "coverage";
        case GateCondition::criterion_mean: return "criterion_mean";
        case GateCondition::criterion_asymmetry: return "criterion_asymmetry";
        case GateCondition::significance: return "significance";
    }
    return "?";
}

double predict_value(const ActivationVector& a, std::span<const double> y) {
    if (a.size() != y.size()) throw std::runtime_error("target length mismatch");
    if (a.ones() == 0) throw std::runtime_error("no activated points");
    double sum = 0.0;
    // row order, skipping empty words
    const auto& words = a.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            sum += y[w * 64 + static_cast<std::size_t>(b)];
            bits &= bits - 1;
        }
    }
    return sum / static_cast<double>(a.ones());
}

std::vector<double> criterion_sequence(const ActivationVector& a, std::span<const double> y,
                                       const DateIndex& dates, const CriterionSpec& spec) {
    const std::size_t n = a.size();
    if (y.size() != n || dates.ordinal.size() != n)
        throw std::runtime_error("criterion input length mismatch");
    if (spec.window < 1) throw std::runtime_error("window must be at least 1");
    const std::size_t n_dates = dates.dates.size();
    if (spec.window > n_dates)
        throw std::runtime_error("window (" + std::to_string(spec.window) +
                                 ") larger than distinct-date count (" +
                                 std::to_string(n_dates) + ")");

    // per-date partial sums over activated rows only
    std::vector<double> date_sum(n_dates, 0.0);
    std::vector<std::size_t> date_count(n_dates, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!a.test(i)) continue;
        date_sum[dates.ordinal[i]] += y[i];
        ++date_count[dates.ordinal[i]];
    }

    std::vector<double> out;
    out.reserve(n_dates - spec.window + 1);
    for (std::size_t start = 0; start + spec.window <= n_dates; ++start) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = start; j < start + spec.window; ++j) {
            sum += date_sum[j];
            count += date_count[j];
        }
        out.push_back(count == 0 ? 0.0 : sum / static_cast<double>(count));
    }
    return out;
}

std::vector<double> criterion_sequence(const ActivationVector& a, std::span<const double> y,
                                       const PanelIndex& index, const CriterionSpec& spec) {
    return criterion_sequence(a, y, build_date_index(index), spec);
}

double significance_from_stats(std::size_t ones, double activated_mean, double y_mean,
                               double y_range) {
    if (y_range <= 0.0) return 1.0;
    const double dev = std::abs(activated_mean - y_mean);
    const double p =
        2.0 * std::exp(-2.0 * static_cast<double>(ones) * dev * dev / (y_range * y_range));
    return std::min(1.0, p);
}

double significance_test(const ActivationVector& a, std::span<const double> y) {
    if (y.empty()) throw std::runtime_error("empty target");
    const double activated_mean = predict_value(a, y);
    double sum = 0.0;
    for (double v : y) sum += v;
    const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    return significance_from_stats(a.ones(), activated_mean, sum / static_cast<double>(y.size()),
                                   *mx - *mn);
}

GateVerdict gate_rule(double coverage, const CriterionProvider& criterion,
                      const PValueProvider& pvalue, const Thresholds& th,
                      const CriterionSpec& spec) {
    if (!(coverage > th.cov_min)) return {false, GateCondition::coverage};

    const std::span<const double> seq = criterion();
    const double mean = seq_mean(seq);
    const bool maximize = spec.objective == Objective::maximize;
    if (maximize ? !(mean > th.K) : !(mean < th.K))
        return {false, GateCondition::criterion_mean};

    const double lo = std::abs(seq_min(seq));
    const double hi = std::abs(seq_max(seq));
    if (maximize ? !(lo < hi) : !(hi < lo)) return {false, GateCondition::criterion_asymmetry};

    if (!(pvalue() <= th.alpha)) return {false, GateCondition::significance};
    return {true, std::nullopt};
}

namespace {

std::map<std::string, CriterionFn>& criterion_registry() {
    static std::map<std::string, CriterionFn> reg = {
        {"rolling_mean",
         [](const ActivationVector& a, std::span<const double> y, const DateIndex& dates,
            const CriterionSpec& spec) { return criterion_sequence(a, y, dates, spec); }},
    };
    return reg;
}

}  // namespace

const CriterionFn& criterion_by_name(const std::string& name) {
    auto& reg = criterion_registry();
    auto it = reg.find(name);
    if (it == reg.end()) throw std::runtime_error("unknown criterion: '" + name + "'");
    return it->second;
}

void register_criterion(const std::string& name, CriterionFn fn) {
    if (name.empty()) throw std::runtime_error("criterion name must not be empty");
    if (!fn) throw std::runtime_error("criterion function must not be empty");
    criterion_registry()[name] = std::move(fn);
}

std::vector<std::string> criterion_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : criterion_registry()) names.push_back(name);
    return names;
}

}  // namespace rulemine
