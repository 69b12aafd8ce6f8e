#include "rulemine/counting.hpp"

#include <stdexcept>

namespace rulemine {

IntervalMode interval_mode_from_string(std::string_view s) {
    if (s == "full") return IntervalMode::full;
    if (s == "half") return IntervalMode::half;
    throw std::runtime_error("unknown interval mode: '" + std::string(s) +
                             "' (expected full or half)");
}

std::string_view to_string(IntervalMode m) { return m == IntervalMode::full ? "full" : "half"; }

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::runtime_error("rule count overflow");
    return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw std::runtime_error("rule count overflow");
    return out;
}

}  // namespace

std::uint64_t rules_per_feature(std::uint64_t m_n, IntervalMode mode) {
    if (m_n < 1) throw std::runtime_error("bin count must be at least 1");
    // both forms are 0 at m_n = 1: a single bin admits no non-trivial interval
    if (mode == IntervalMode::full) return checked_mul(m_n, m_n + 1) / 2 - 1;
    return checked_mul(2, m_n - 1);
}

RuleCounts count_rules(std::uint64_t d, std::uint64_t m_n, std::uint64_t l_max,
                       IntervalMode mode) {
    if (d < 1) throw std::runtime_error("feature count must be at least 1");
    if (l_max < 1) throw std::runtime_error("maximum rule length must be at least 1");
    const std::uint64_t q = rules_per_feature(m_n, mode);

    RuleCounts counts;
    std::uint64_t rulesets = 1;      // C(d, l), updated incrementally
    std::uint64_t rules_per_set = 1; // q^l
    for (std::uint64_t l = 1; l <= l_max && l <= d; ++l) {
        // C(d, l) = C(d, l-1) * (d - l + 1) / l, exact at every step
        rulesets = checked_mul(rulesets, d - l + 1) / l;
        rules_per_set = checked_mul(rules_per_set, q);
        LengthCount lc;
        lc.length = l;
        lc.rulesets = rulesets;
        lc.rules_per_set = rules_per_set;
        lc.rules = checked_mul(rulesets, rules_per_set);
        counts.total = checked_add(counts.total, lc.rules);
        counts.per_length.push_back(lc);
    }
    return counts;
}

}  // namespace rulemine
