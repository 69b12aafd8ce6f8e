#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rulemine/activation.hpp"
#include "rulemine/fitting.hpp"
#include "rulemine/rule.hpp"

namespace rulemine {

// Rule indices ordered best-first by the criterion mean: descending under
// maximize, ascending under minimize. Ties fall back to higher coverage,
// then to the lexicographic canonical condition string.
std::vector<std::size_t> sort_order_by_crit(std::span<const Rule> rules, Objective objective);

// Greedy covering pass over rules already in best-first order. A rule is
// kept when the coverage of its overlap with the union of earlier keepers
// is at most gamma times its own coverage. Returns the kept rules'
// original indices, in acceptance order.
std::vector<std::size_t> select_from_sorted(std::span<const Rule> rules,
                                            std::span<const ActivationVector> activations,
                                            std::span<const std::size_t> order,
                                            double gamma);

std::vector<std::size_t> select_indices(std::span<const Rule> rules,
                                        std::span<const ActivationVector> activations,
                                        Objective objective, double gamma);

// Runs the covering pass separately on the positive-prediction and
// negative-prediction partitions; returns positives' picks first.
std::vector<std::size_t> select_signed_indices(std::span<const Rule> rules,
                                               std::span<const ActivationVector> activations,
                                               Objective objective, double gamma);

std::vector<Rule> select_rules(std::span<const Rule> rules,
                               std::span<const ActivationVector> activations,
                               Objective objective, double gamma);

std::vector<Rule> select_rules_signed(std::span<const Rule> rules,
                                      std::span<const ActivationVector> activations,
                                      Objective objective, double gamma);

}  // namespace rulemine
