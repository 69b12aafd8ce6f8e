#include <doctest.h>

#include <random>

#include "rulemine/selection.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace rulemine;

namespace {

Rule stub_rule(std::uint32_t feature, std::uint8_t lo, std::uint8_t hi, double crit_mean,
               double cov, double pred = 1.0) {
    Rule r;
    r.condition = {{feature}, {lo}, {hi}};
    r.prediction = pred;
    r.coverage = cov;
    r.criterion_seq = {crit_mean};
    return r;
}

// rules plus matching random activations, each with the stated coverage
struct Fixture {
    std::vector<Rule> rules;
    std::vector<ActivationVector> acts;
    std::vector<std::vector<int>> bits;
};

Fixture random_fixture(std::size_t n_rules, std::size_t n, std::uint64_t seed) {
    Fixture fx;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> density(0.05, 0.6);
    std::uniform_real_distribution<double> crit(-1.0, 1.0);
    for (std::size_t i = 0; i < n_rules; ++i) {
        auto act = testsup::random_activation(n, density(rng), rng());
        if (act.ones() == 0) act.set(i % n);
        Rule r;
        r.condition = {{static_cast<std::uint32_t>(i)},
                       {0},
                       {static_cast<std::uint8_t>(1 + i % 2)}};
        r.coverage = coverage(act);
        r.criterion_seq = {crit(rng)};
        r.prediction = crit(rng);
        std::vector<int> bits(n);
        for (std::size_t j = 0; j < n; ++j) bits[j] = act.test(j);
        fx.rules.push_back(std::move(r));
        fx.acts.push_back(std::move(act));
        fx.bits.push_back(std::move(bits));
    }
    return fx;
}

}  // namespace

TEST_CASE("rules order by criterion mean with documented tie-breaks") {
    SUBCASE("maximize sorts descending") {
        const std::vector<Rule> rules{stub_rule(0, 0, 0, 0.1, 0.5), stub_rule(1, 0, 0, 0.5, 0.5),
                                      stub_rule(2, 0, 0, 0.3, 0.5)};
        CHECK(sort_order_by_crit(rules, Objective::maximize) ==
              std::vector<std::size_t>{1, 2, 0});
    }
    SUBCASE("minimize sorts ascending") {
        const std::vector<Rule> rules{stub_rule(0, 0, 0, 0.1, 0.5), stub_rule(1, 0, 0, 0.5, 0.5),
                                      stub_rule(2, 0, 0, 0.3, 0.5)};
        CHECK(sort_order_by_crit(rules, Objective::minimize) ==
              std::vector<std::size_t>{0, 2, 1});
    }
    SUBCASE("equal means prefer higher coverage") {
        const std::vector<Rule> rules{stub_rule(0, 0, 0, 0.4, 0.1), stub_rule(1, 0, 0, 0.4, 0.3)};
        CHECK(sort_order_by_crit(rules, Objective::maximize) == std::vector<std::size_t>{1, 0});
    }
    SUBCASE("full ties settle on the canonical condition string") {
        // f0:1-1 sorts before f1:0-0 lexicographically
        const std::vector<Rule> rules{stub_rule(1, 0, 0, 0.4, 0.2), stub_rule(0, 1, 1, 0.4, 0.2)};
        CHECK(sort_order_by_crit(rules, Objective::maximize) == std::vector<std::size_t>{1, 0});
        // stable across input permutation
        const std::vector<Rule> swapped{rules[1], rules[0]};
        CHECK(sort_order_by_crit(swapped, Objective::maximize) ==
              std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("covering keeps a lone rule") {
    Fixture fx = random_fixture(1, 50, 3);
    CHECK(select_indices(fx.rules, fx.acts, Objective::maximize, 0.2) ==
          std::vector<std::size_t>{0});
}

TEST_CASE("identical activations admit only the best rule") {
    const auto act = testsup::random_activation(40, 0.5, 11);
    std::vector<Rule> rules{stub_rule(0, 0, 0, 0.9, coverage(act)),
                            stub_rule(1, 0, 0, 0.1, coverage(act))};
    const std::vector<ActivationVector> acts{act, act};
    // overlap ratio of the second rule is 1 > gamma = 0.5
    CHECK(select_indices(rules, acts, Objective::maximize, 0.5) ==
          std::vector<std::size_t>{0});
}

TEST_CASE("covering matches the pseudocode transcription on random fixtures") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Fixture fx = random_fixture(10, 100, 100 + seed);
        const auto order = sort_order_by_crit(fx.rules, Objective::maximize);
        const auto got = select_from_sorted(fx.rules, fx.acts, order, 0.3);
        const auto want = oracle::covering_select(fx.bits, order, 0.3);
        CHECK(got == want);
    }
}

TEST_CASE("every acceptance decision replays against the inequality") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Fixture fx = random_fixture(12, 80, 500 + seed);
        const double gamma = 0.25;
        const auto order = sort_order_by_crit(fx.rules, Objective::maximize);
        const auto kept = select_from_sorted(fx.rules, fx.acts, order, gamma);
        // replay: walk the sorted order, maintain the covered union, and
        // confirm accept/reject one decision at a time
        std::vector<int> covered(80, 0);
        std::size_t kept_pos = 0;
        for (std::size_t idx : order) {
            std::size_t own = 0, overlap = 0;
            for (std::size_t i = 0; i < 80; ++i)
                if (fx.bits[idx][i]) {
                    ++own;
                    overlap += covered[i];
                }
            const bool accept = static_cast<double>(overlap) / 80.0 <=
                                gamma * (static_cast<double>(own) / 80.0);
            const bool was_kept = kept_pos < kept.size() && kept[kept_pos] == idx;
            CHECK(accept == was_kept);
            if (accept) {
                ++kept_pos;
                for (std::size_t i = 0; i < 80; ++i)
                    if (fx.bits[idx][i]) covered[i] = 1;
            }
        }
        CHECK(kept_pos == kept.size());
    }
}

TEST_CASE("signed selection scans the sign partitions independently") {
    SUBCASE("all positive predictions reduce to the plain scan") {
        Fixture fx = random_fixture(8, 60, 77);
        for (auto& r : fx.rules) r.prediction = std::abs(r.prediction) + 0.1;
        CHECK(select_signed_indices(fx.rules, fx.acts, Objective::maximize, 0.3) ==
              select_indices(fx.rules, fx.acts, Objective::maximize, 0.3));
    }
    SUBCASE("opposite-sign rules never compete for coverage") {
        const auto act = testsup::random_activation(40, 0.5, 19);
        std::vector<Rule> rules{stub_rule(0, 0, 0, 0.9, coverage(act), +1.0),
                                stub_rule(1, 0, 0, 0.8, coverage(act), -1.0)};
        const std::vector<ActivationVector> acts{act, act};
        CHECK(select_signed_indices(rules, acts, Objective::maximize, 0.5) ==
              std::vector<std::size_t>{0, 1});  // positives first, then negatives
    }
    SUBCASE("zero predictions land in the negative partition") {
        const auto act = testsup::random_activation(40, 0.5, 23);
        std::vector<Rule> rules{stub_rule(0, 0, 0, 0.9, coverage(act), 0.0),
                                stub_rule(1, 0, 0, 0.8, coverage(act), +1.0)};
        const std::vector<ActivationVector> acts{act, act};
        CHECK(select_signed_indices(rules, acts, Objective::maximize, 0.5) ==
              std::vector<std::size_t>{1, 0});
    }
}

TEST_CASE("selection validates its inputs") {
    Fixture fx = random_fixture(3, 30, 41);
    CHECK_THROWS(select_indices(fx.rules, fx.acts, Objective::maximize, 0.0));
    CHECK_THROWS(select_indices(fx.rules, fx.acts, Objective::maximize, 1.0));
    CHECK_THROWS(select_indices(fx.rules, fx.acts, Objective::maximize, -0.3));
    fx.acts.pop_back();
    CHECK_THROWS(select_indices(fx.rules, fx.acts, Objective::maximize, 0.3));
}

TEST_CASE("select_rules returns the picked rules in acceptance order") {
    Fixture fx = random_fixture(6, 50, 59);
    const auto idx = select_indices(fx.rules, fx.acts, Objective::maximize, 0.3);
    const auto rules = select_rules(fx.rules, fx.acts, Objective::maximize, 0.3);
    REQUIRE(rules.size() == idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        CHECK(rules[i].condition == fx.rules[idx[i]].condition);
}
