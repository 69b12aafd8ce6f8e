#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rulemine/activation.hpp"
#include "rulemine/panel.hpp"

namespace rulemine {

// Conjunction of per-feature bin intervals. A rule is fully identified by
// the hyper-rectangle its condition carves, so conditions are kept in one
// canonical form: feature indices strictly increasing, one interval each,
// and never the trivial full range [0, bin_count-1].
struct Condition {
    std::vector<std::uint32_t> features;
    std::vector<std::uint8_t> bmins;
    std::vector<std::uint8_t> bmaxs;

    std::size_t length() const { return features.size(); }
    bool operator==(const Condition&) const = default;
};

// Throws if the canonical-form invariants do not hold for the given bin count.
void validate_condition(const Condition& cond, std::size_t bin_count);

// "f<idx>:<bmin>-<bmax>" segments joined by ';', e.g. "f0:1-2;f2:0-1".
// This string is the cache key: its hash names the activation file.
std::string canonical_string(const Condition& cond);

// Bit i set iff every per-feature interval contains row i's bin.
ActivationVector evaluate_condition(const Condition& cond, const DiscretizedDataset& dd);

}  // namespace rulemine
