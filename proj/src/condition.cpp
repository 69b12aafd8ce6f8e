#include "rulemine/condition.hpp"

#include <stdexcept>

namespace rulemine {

void validate_condition(const Condition& cond, std::size_t bin_count) {
    const std::size_t k = cond.features.size();
    if (k == 0) throw std::runtime_error("empty condition");
    if (cond.bmins.size() != k || cond.bmaxs.size() != k)
        throw std::runtime_error("condition arity mismatch");
    if (bin_count < 1) throw std::runtime_error("bin count must be at least 1");
    for (std::size_t j = 0; j < k; ++j) {
        if (j > 0 && cond.features[j] <= cond.features[j - 1])
            throw std::runtime_error("condition features are not strictly increasing");
        if (cond.bmins[j] > cond.bmaxs[j] || cond.bmaxs[j] >= bin_count)
            throw std::runtime_error("bin interval out of range");
        if (cond.bmins[j] == 0 && cond.bmaxs[j] == bin_count - 1)
            throw std::runtime_error("trivial full-range interval");
    }
}

std::string canonical_string(const Condition& cond) {
    std::string out;
    for (std::size_t j = 0; j < cond.features.size(); ++j) {
        if (j > 0) out += ';';
        out += 'f';
        out += std::to_string(cond.features[j]);
        out += ':';
        out += std::to_string(static_cast<unsigned>(cond.bmins[j]));
        out += '-';
        out += std::to_string(static_cast<unsigned>(cond.bmaxs[j]));
    }
    return out;
}

ActivationVector evaluate_condition(const Condition& cond, const DiscretizedDataset& dd) {
    validate_condition(cond, dd.bin_count);
    for (std::uint32_t f : cond.features)
        if (f >= dd.d())
            throw std::runtime_error("feature index out of range: " + std::to_string(f));

    const std::size_t n = dd.n();
    ActivationVector a(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < cond.features.size(); ++j) {
            const std::uint8_t b = dd.bins[cond.features[j]][i];
            if (b < cond.bmins[j] || b > cond.bmaxs[j]) {
                hit = false;
                break;
            }
        }
        if (hit) a.set(i);
    }
    return a;
}

}  // namespace rulemine
