#include "rulemine/selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace rulemine {

namespace {

struct SortKey {
    double mean;
    double cov;
    std::string canon;
};

std::vector<std::size_t> order_subset(std::span<const Rule> rules,
                                      std::vector<std::size_t> candidates,
                                      Objective objective) {
    std::vector<SortKey> keys(rules.size());
    for (std::size_t i : candidates)
        keys[i] = {seq_mean(rules[i].criterion_seq), rules[i].coverage,
                   canonical_string(rules[i].condition)};
    const bool maximize = objective == Objective::maximize;
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a].mean != keys[b].mean)
            return maximize ? keys[a].mean > keys[b].mean : keys[a].mean < keys[b].mean;
        if (keys[a].cov != keys[b].cov) return keys[a].cov > keys[b].cov;
        return keys[a].canon < keys[b].canon;
    });
    return candidates;
}

void check_shapes(std::span<const Rule> rules, std::span<const ActivationVector> activations) {
    if (rules.size() != activations.size())
        throw std::runtime_error("rule and activation counts disagree");
    for (std::size_t i = 1; i < activations.size(); ++i)
        if (activations[i].size() != activations[0].size())
            throw std::runtime_error("activation length mismatch");
}

}  // namespace

std::vector<std::size_t> sort_order_by_crit(std::span<const Rule> rules, Objective objective) {
    std::vector<std::size_t> all(rules.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return order_subset(rules, std::move(all), objective);
}

std::vector<std::size_t> select_from_sorted(std::span<const Rule> rules,
                                            std::span<const ActivationVector> activations,
                                            std::span<const std::size_t> order,
                                            double gamma) {
    check_shapes(rules, activations);
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::runtime_error("gamma must be strictly between 0 and 1");
    std::vector<std::size_t> kept;
    if (order.empty()) return kept;

    const std::size_t n = activations[0].size();
    std::vector<std::uint8_t> covered(n, 0);
    for (std::size_t idx : order) {
        const ActivationVector& act = activations[idx];
        std::size_t overlap = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (covered[i] && act.test(i)) ++overlap;
        const double overlap_cov = static_cast<double>(overlap) / static_cast<double>(n);
        const double own_cov = static_cast<double>(act.ones()) / static_cast<double>(n);
        if (overlap_cov <= gamma * own_cov) {
            kept.push_back(idx);
            for (std::size_t i = 0; i < n; ++i)
                if (act.test(i)) covered[i] = 1;
        }
    }
    return kept;
}

std::vector<std::size_t> select_indices(std::span<const Rule> rules,
                                        std::span<const ActivationVector> activations,
                                        Objective objective, double gamma) {
    return select_from_sorted(rules, activations, sort_order_by_crit(rules, objective), gamma);
}

std::vector<std::size_t> select_signed_indices(std::span<const Rule> rules,
                                               std::span<const ActivationVector> activations,
                                               Objective objective, double gamma) {
    std::vector<std::size_t> positive, negative;
    for (std::size_t i = 0; i < rules.size(); ++i)
        (rule_sign(rules[i]) == '+' ? positive : negative).push_back(i);

    std::vector<std::size_t> kept =
        select_from_sorted(rules, activations,
                           order_subset(rules, std::move(positive), objective), gamma);
    const std::vector<std::size_t> neg =
        select_from_sorted(rules, activations,
                           order_subset(rules, std::move(negative), objective), gamma);
    kept.insert(kept.end(), neg.begin(), neg.end());
    return kept;
}

namespace {

std::vector<Rule> pick(std::span<const Rule> rules, std::span<const std::size_t> indices) {
    std::vector<Rule> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(rules[i]);
    return out;
}

}  // namespace

std::vector<Rule> select_rules(std::span<const Rule> rules,
                               std::span<const ActivationVector> activations,
                               Objective objective, double gamma) {
    return pick(rules, select_indices(rules, activations, objective, gamma));
}

std::vector<Rule> select_rules_signed(std::span<const Rule> rules,
                                      std::span<const ActivationVector> activations,
                                      Objective objective, double gamma) {
    return pick(rules, select_signed_indices(rules, activations, objective, gamma));
}

}  // namespace rulemine
