#include <doctest.h>

#include <cmath>

#include "rulemine/fitting.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace rulemine;

TEST_CASE("prediction is the conditional mean") {
    const std::vector<double> y{1, 2, 3, 4};
    CHECK(predict_value(testsup::make_activation({1, 0, 1, 0}), y) == 2.0);
    CHECK(predict_value(testsup::make_activation({1, 1, 1, 1}), y) == 2.5);
    CHECK_THROWS_WITH_AS(predict_value(ActivationVector(4), y),
                         doctest::Contains("no activated points"), std::runtime_error);
}

TEST_CASE("prediction matches a scalar-loop oracle") {
    const auto y = testsup::make_values(100, 41);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto a = testsup::random_activation(100, 0.3, seed);
        if (a.ones() == 0) continue;
        std::vector<int> bits(100);
        for (std::size_t i = 0; i < 100; ++i) bits[i] = a.test(i);
        CHECK(predict_value(a, y) ==
              doctest::Approx(oracle::mean_on(bits, y)).epsilon(1e-12));
    }
}

TEST_CASE("rolling criterion on hand-checkable panels") {
    SUBCASE("window 1 over one stock gives the per-date values") {
        const PanelIndex index = testsup::make_index(3, 1);
        ActivationVector all(3);
        for (std::size_t i = 0; i < 3; ++i) all.set(i);
        const std::vector<double> y{1, 2, 3};
        CHECK(criterion_sequence(all, y, index, {"rolling_mean", 1, Objective::maximize}) ==
              std::vector<double>{1, 2, 3});
    }
    SUBCASE("window covering every date gives one global mean") {
        const PanelIndex index = testsup::make_index(4, 2);
        ActivationVector all(8);
        for (std::size_t i = 0; i < 8; ++i) all.set(i);
        const auto y = testsup::make_values(8, 5);
        const auto seq =
            criterion_sequence(all, y, index, {"rolling_mean", 4, Objective::maximize});
        REQUIRE(seq.size() == 1);
        double mean = 0;
        for (double v : y) mean += v;
        mean /= 8;
        CHECK(seq[0] == doctest::Approx(mean).epsilon(1e-12));
    }
    SUBCASE("windows with no activated rows emit zero") {
        const PanelIndex index = testsup::make_index(3, 1);
        auto a = ActivationVector(3);
        a.set(0);  // only the first date
        const std::vector<double> y{5, 6, 7};
        CHECK(criterion_sequence(a, y, index, {"rolling_mean", 1, Objective::maximize}) ==
              std::vector<double>{5, 0, 0});
    }
    SUBCASE("window longer than the date range is rejected") {
        const PanelIndex index = testsup::make_index(3, 1);
        ActivationVector a(3);
        a.set(0);
        const std::vector<double> y{1, 2, 3};
        CHECK_THROWS(
            criterion_sequence(a, y, index, {"rolling_mean", 4, Objective::maximize}));
    }
}

TEST_CASE("rolling criterion matches the double-loop oracle") {
    const PanelIndex index = testsup::make_index(6, 2);
    const auto y = testsup::make_values(12, 77);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto a = testsup::random_activation(12, 0.5, seed);
        std::vector<int> bits(12);
        for (std::size_t i = 0; i < 12; ++i) bits[i] = a.test(i);
        for (std::size_t window : {1u, 2u, 3u, 6u}) {
            const auto got = criterion_sequence(
                a, y, index, {"rolling_mean", window, Objective::maximize});
            const auto want = oracle::criterion(bits, y, index, window);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("significance bound") {
    SUBCASE("zero deviation and zero range give p = 1") {
        CHECK(significance_from_stats(50, 0.3, 0.3, 1.0) == 1.0);
        CHECK(significance_from_stats(50, 0.3, 0.1, 0.0) == 1.0);  // constant target
    }
    SUBCASE("pinned direct evaluation") {
        // ones=100, |D|=0.2, R=1  ->  2 exp(-2*100*0.04) = 2 exp(-8)
        CHECK(significance_from_stats(100, 0.5, 0.3, 1.0) ==
              doctest::Approx(0.0006709252558050237).epsilon(1e-12));
    }
    SUBCASE("bound saturates at 1") {
        CHECK(significance_from_stats(1, 0.31, 0.3, 10.0) == 1.0);
    }
    SUBCASE("vector form agrees with the stats form") {
        const std::vector<double> y{0, 1, 0, 1, 0, 1, 0, 1};
        const auto a = testsup::make_activation({1, 1, 1, 0, 0, 0, 0, 0});
        const double got = significance_test(a, y);
        // activated mean 1/3, global mean 1/2, range 1, ones 3
        CHECK(got == doctest::Approx(oracle::pvalue(3, 0.5 - 1.0 / 3.0, 1.0)).epsilon(1e-12));
    }
}

namespace {

struct CountingProviders {
    int criterion_calls = 0;
    int pvalue_calls = 0;
    std::vector<double> seq;
    double p = 0.0;

    CriterionProvider criterion() {
        return [this]() -> std::span<const double> {
            ++criterion_calls;
            return seq;
        };
    }
    PValueProvider pvalue() {
        return [this] {
            ++pvalue_calls;
            return p;
        };
    }
};

}  // namespace

TEST_CASE("gate applies the four conditions in order with early exit") {
    const Thresholds th;  // cov_min 0.05, K 0, alpha 0.05
    const CriterionSpec maximize{"rolling_mean", 1, Objective::maximize};

    SUBCASE("coverage failure computes nothing else") {
        CountingProviders cp;
        const auto verdict = gate_rule(0.04, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(!verdict.passed);
        CHECK(verdict.failed == GateCondition::coverage);
        CHECK(cp.criterion_calls == 0);
        CHECK(cp.pvalue_calls == 0);
    }
    SUBCASE("all four conditions hold") {
        CountingProviders cp;
        cp.seq = {1, 2, 3};
        cp.p = 0.01;
        const auto verdict = gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(verdict.passed);
        CHECK(!verdict.failed.has_value());
        CHECK(cp.criterion_calls == 1);
        CHECK(cp.pvalue_calls == 1);
    }
    SUBCASE("criterion mean at or below K fails before significance") {
        CountingProviders cp;
        cp.seq = {-1, 1};  // mean 0, not > K = 0
        const auto verdict = gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(verdict.failed == GateCondition::criterion_mean);
        CHECK(cp.pvalue_calls == 0);
    }
    SUBCASE("asymmetry: |min| must stay below |max| when maximizing") {
        CountingProviders cp;
        cp.seq = {-5, 4, 4.5};  // mean clears K, the downside spike does not
        const auto verdict = gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(verdict.failed == GateCondition::criterion_asymmetry);
        CHECK(cp.pvalue_calls == 0);
    }
    SUBCASE("a negative-mean sequence falls at the mean check, not asymmetry") {
        CountingProviders cp;
        cp.seq = {-5, 1, 2};  // |min| >= |max| too, but the mean gate comes first
        const auto verdict = gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(verdict.failed == GateCondition::criterion_mean);
        CHECK(cp.pvalue_calls == 0);
    }
    SUBCASE("significance is the last gate") {
        CountingProviders cp;
        cp.seq = {1, 2, 3};
        cp.p = 0.06;
        const auto verdict = gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize);
        CHECK(verdict.failed == GateCondition::significance);
        CHECK(cp.pvalue_calls == 1);
    }
    SUBCASE("boundary: p exactly alpha passes") {
        CountingProviders cp;
        cp.seq = {1, 2, 3};
        cp.p = 0.05;
        CHECK(gate_rule(0.5, cp.criterion(), cp.pvalue(), th, maximize).passed);
    }
    SUBCASE("boundary: coverage exactly cov_min fails") {
        CountingProviders cp;
        CHECK(gate_rule(0.05, cp.criterion(), cp.pvalue(), th, maximize).failed ==
              GateCondition::coverage);
    }
    SUBCASE("minimize mirrors the direction checks") {
        const CriterionSpec minimize{"rolling_mean", 1, Objective::minimize};
        CountingProviders cp;
        cp.seq = {-3, -1, 2};  // mean < 0, |max|=2 < |min|=3
        cp.p = 0.01;
        CHECK(gate_rule(0.5, cp.criterion(), cp.pvalue(), th, minimize).passed);
        CountingProviders cp2;
        cp2.seq = {-1, 5};  // mean positive under minimize
        CHECK(gate_rule(0.5, cp2.criterion(), cp2.pvalue(), th, minimize).failed ==
              GateCondition::criterion_mean);
        CountingProviders cp3;
        cp3.seq = {-1, -2, 2.5};  // mean negative but |max| >= |min|
        CHECK(gate_rule(0.5, cp3.criterion(), cp3.pvalue(), th, minimize).failed ==
              GateCondition::criterion_asymmetry);
    }
}

TEST_CASE("early exit holds over a large randomized fixture") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> level(-1.0, 1.0);
    const Thresholds th;
    const CriterionSpec spec{"rolling_mean", 1, Objective::maximize};
    int coverage_fails = 0, criterion_fails = 0;
    for (int i = 0; i < 1500; ++i) {
        CountingProviders cp;
        const double mid = level(rng);
        cp.seq = {mid - unit(rng), mid, mid + unit(rng)};
        cp.p = unit(rng);
        const double cov = unit(rng) * 0.2;
        const auto verdict = gate_rule(cov, cp.criterion(), cp.pvalue(), th, spec);
        if (verdict.failed == GateCondition::coverage) {
            ++coverage_fails;
            CHECK(cp.criterion_calls == 0);
            CHECK(cp.pvalue_calls == 0);
        } else if (verdict.failed == GateCondition::criterion_mean ||
                   verdict.failed == GateCondition::criterion_asymmetry) {
            ++criterion_fails;
            CHECK(cp.pvalue_calls == 0);
        }
    }
    // the fixture must actually exercise both early exits
    CHECK(coverage_fails > 100);
    CHECK(criterion_fails > 100);
}

TEST_CASE("objective and gate names round-trip") {
    CHECK(objective_from_string("maximize") == Objective::maximize);
    CHECK(objective_from_string("minimize") == Objective::minimize);
    CHECK_THROWS(objective_from_string("upward"));
    CHECK(to_string(Objective::maximize) == "maximize");
    CHECK(to_string(GateCondition::coverage) == "coverage");
    CHECK(to_string(GateCondition::significance) == "significance");
}

TEST_CASE("criterion registry resolves and extends") {
    CHECK_NOTHROW(criterion_by_name("rolling_mean"));
    CHECK_THROWS_WITH_AS(criterion_by_name("bogus"), doctest::Contains("unknown criterion"),
                         std::runtime_error);
    register_criterion("test_constant",
                       [](const ActivationVector&, std::span<const double>, const DateIndex&,
                          const CriterionSpec&) { return std::vector<double>{1.0}; });
    const auto names = criterion_names();
    CHECK(std::find(names.begin(), names.end(), "rolling_mean") != names.end());
    CHECK(std::find(names.begin(), names.end(), "test_constant") != names.end());
    const PanelIndex index = testsup::make_index(2, 1);
    const auto seq = criterion_by_name("test_constant")(
        ActivationVector(2), std::vector<double>{0, 0}, build_date_index(index),
        {"test_constant", 1, Objective::maximize});
    CHECK(seq == std::vector<double>{1.0});
}
