#pragma once

#include <span>
#include <string>
#include <vector>

#include "rulemine/condition.hpp"

namespace rulemine {

// A fitted rule: the condition plus the four attributes computed on the
// learning sample. The activation vector itself is not stored here; it lives
// in the on-disk cache or is recomputed from the condition.
struct Rule {
    Condition condition;
    double prediction = 0.0;
    double coverage = 0.0;
    std::vector<double> criterion_seq;
    double pvalue = 1.0;
};

// '+' iff prediction > 0; an exactly-zero prediction counts as '-'.
char rule_sign(const Rule& r);

// Table-style rule name: r_<ordinal>(<length>)<sign>.
std::string canonical_name(const Rule& r, std::size_t ordinal);

double seq_mean(std::span<const double> seq);
double seq_min(std::span<const double> seq);
double seq_max(std::span<const double> seq);

// All rules over one fixed feature combination; the unit of parallel work.
struct RuleSet {
    std::vector<std::uint32_t> signature;  // sorted feature indices
    std::vector<Rule> rules;

    bool empty() const { return rules.empty(); }
};

}  // namespace rulemine
