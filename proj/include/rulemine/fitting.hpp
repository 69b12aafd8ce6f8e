#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rulemine/activation.hpp"
#include "rulemine/panel.hpp"

namespace rulemine {

enum class Objective { maximize, minimize };

Objective objective_from_string(std::string_view s);
std::string_view to_string(Objective o);

// Rolling-window criterion settings. The window counts distinct dates, not
// rows; the objective decides the direction of the gate comparisons.
struct CriterionSpec {
    std::string name = "rolling_mean";
    std::size_t window = 1;
    Objective objective = Objective::maximize;
};

struct Thresholds {
    double cov_min = 0.05;
    double K = 0.0;
    double alpha = 0.05;
};

enum class GateCondition { coverage, criterion_mean, criterion_asymmetry, significance };

std::string_view to_string(GateCondition c);

struct GateVerdict {
    bool passed = false;
    std::optional<GateCondition> failed;
};

// Mean of y over activated rows. Throws "no activated points" when the
// vector is empty; callers treat that as a gate failure.
double predict_value(const ActivationVector& a, std::span<const double> y);

// Rolling conditional mean: for every window of `window` consecutive
// distinct dates (stride 1), the mean of y over rows that are activated and
// dated inside the window; windows with no activated row emit 0. Stands in
// for a pluggable, problem-specific criterion behind the same interface.
std::vector<double> criterion_sequence(const ActivationVector& a, std::span<const double> y,
                                       const DateIndex& dates, const CriterionSpec& spec);
std::vector<double> criterion_sequence(const ActivationVector& a, std::span<const double> y,
                                       const PanelIndex& index, const CriterionSpec& spec);

// Distribution-free significance of the rule-conditional mean against the
// global mean of y, via the Hoeffding concentration bound: with range
// R = max(y)-min(y) and deviation D = |mean(y on activated) - mean(y)|,
// p = min(1, 2 exp(-2 * ones * D^2 / R^2)); R = 0 gives p = 1.
double significance_test(const ActivationVector& a, std::span<const double> y);
double significance_from_stats(std::size_t ones, double activated_mean, double y_mean,
                               double y_range);

// Lazy attribute providers. gate_rule calls them only when the earlier
// conditions passed, which is what makes the threshold pruning cheap: a rule
// failing on coverage never computes its criterion, one failing on the
// criterion never runs the significance test. Tests hook counters in here.
using CriterionProvider = std::function<std::span<const double>()>;
using PValueProvider = std::function<double()>;

// Applies the four acceptance conditions in order and stops at the first
// failure:
//   1. coverage > cov_min
//   2. mean(criterion) > K when maximizing, < K when minimizing
//   3. |min(criterion)| < |max(criterion)| when maximizing, mirrored otherwise
//   4. p-value <= alpha
GateVerdict gate_rule(double coverage, const CriterionProvider& criterion,
                      const PValueProvider& pvalue, const Thresholds& th,
                      const CriterionSpec& spec);

// Criterion plug-in registry, keyed by the `criterion` config value.
using CriterionFn = std::function<std::vector<double>(
    const ActivationVector&, std::span<const double>, const DateIndex&, const CriterionSpec&)>;

const CriterionFn& criterion_by_name(const std::string& name);
void register_criterion(const std::string& name, CriterionFn fn);
std::vector<std::string> criterion_names();

}  // namespace rulemine
