#include "rulemine/rule.hpp"

#include <algorithm>
#include <stdexcept>

namespace rulemine {

char rule_sign(const Rule& r) { return r.prediction > 0.0 ? '+' : '-'; }

std::string canonical_name(const Rule& r, std::size_t ordinal) {
    return "r_" + std::to_string(ordinal) + "(" + std::to_string(r.condition.length()) + ")" +
           rule_sign(r);
}

double seq_mean(std::span<const double> seq) {
    if (seq.empty()) throw std::runtime_error("empty criterion sequence");
    double sum = 0.0;
    for (double v : seq) sum += v;
    return sum / static_cast<double>(seq.size());
}

double seq_min(std::span<const double> seq) {
    if (seq.empty()) throw std::runtime_error("empty criterion sequence");
    return *std::min_element(seq.begin(), seq.end());
}

double seq_max(std::span<const double> seq) {
    if (seq.empty()) throw std::runtime_error("empty criterion sequence");
    return *std::max_element(seq.begin(), seq.end());
}

}  // namespace rulemine
