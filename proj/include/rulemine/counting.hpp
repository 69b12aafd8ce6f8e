#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rulemine {

// full: every non-trivial contiguous bin range; half: only ranges anchored
// at bin 0 or bin m_n-1.
enum class IntervalMode { full, half };

IntervalMode interval_mode_from_string(std::string_view s);
std::string_view to_string(IntervalMode m);

// Candidate rules per feature for one interval mode:
//   full  m_n (m_n + 1) / 2 - 1
//   half  2 (m_n - 1)
std::uint64_t rules_per_feature(std::uint64_t m_n, IntervalMode mode);

struct LengthCount {
    std::uint64_t length = 0;
    std::uint64_t rules = 0;          // candidates of this length
    std::uint64_t rulesets = 0;       // feature combinations, C(d, length)
    std::uint64_t rules_per_set = 0;  // (rules per feature)^length
};

struct RuleCounts {
    std::vector<LengthCount> per_length;
    std::uint64_t total = 0;
};

// Closed-form candidate counts per length, exact in 64-bit integers; throws
// on overflow rather than wrapping.
RuleCounts count_rules(std::uint64_t d, std::uint64_t m_n, std::uint64_t l_max,
                       IntervalMode mode);

}  // namespace rulemine
