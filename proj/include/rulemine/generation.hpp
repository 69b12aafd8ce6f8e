#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rulemine/cache.hpp"
#include "rulemine/counting.hpp"
#include "rulemine/fitting.hpp"
#include "rulemine/panel.hpp"
#include "rulemine/rule.hpp"

namespace rulemine {

struct GenerationConfig {
    std::size_t m_n = 5;
    std::size_t l_max = 2;
    IntervalMode interval_mode = IntervalMode::full;
    Thresholds thresholds;
    CriterionSpec criterion;
    unsigned workers = 1;
    std::filesystem::path cache_dir = "activation_cache";
    bool keep_cache = false;
    bool no_prune = false;  // disables all gates; rules only need a non-empty activation
};

// One scheduled ruleset build: combine the length-(l-1) ruleset `left` with
// the length-1 ruleset of feature `right`. The dedup rule right > max(left)
// gives every signature exactly one producing task.
struct TaskSpec {
    std::vector<std::uint32_t> signature;
    std::vector<std::uint32_t> left;
    std::uint32_t right = 0;
};

TaskSpec make_task_spec(std::vector<std::uint32_t> left, std::uint32_t right);

// All combination tasks for one step, given the non-empty left signatures
// and the features with a non-empty length-1 ruleset. Pairs with an empty
// source are never created. Output is sorted by signature.
std::vector<TaskSpec> schedule_step(const std::vector<std::vector<std::uint32_t>>& left_signatures,
                                    const std::vector<std::uint32_t>& right_features);

// The non-trivial [bmin, bmax] intervals for one feature, in enumeration
// order. full: bmin-major; half: [0, b] for b < m_n-1 then [a, m_n-1].
std::vector<std::pair<std::uint8_t, std::uint8_t>> enumerate_intervals(std::size_t m_n,
                                                                       IntervalMode mode);

// Shared read-only inputs for fitting tasks.
struct FitEnv {
    const DiscretizedDataset& dd;
    std::span<const double> y;
    const DateIndex& dates;
    const GenerationConfig& cfg;
    const CriterionFn& criterion;
    double y_mean = 0.0;
    double y_range = 0.0;
};

FitEnv make_fit_env(const DiscretizedDataset& dd, std::span<const double> y,
                    const DateIndex& dates, const GenerationConfig& cfg);

// Fits one candidate condition whose activation vector is already evaluated.
// Returns the rule when it passes the gate (or always, under no_prune, as
// long as at least one row is activated).
std::optional<Rule> fit_candidate(Condition cond, const ActivationVector& act,
                                  const FitEnv& env);

struct TaskResult {
    RuleSet set;
    std::uint64_t candidates = 0;
    std::vector<std::pair<std::string, std::string>> cached;  // condition -> file
    double seconds = 0.0;
};

// Enumerates, evaluates, fits and gates every interval on one feature;
// survivors' activation vectors go to the cache.
TaskResult generate_length1(std::uint32_t feature, const FitEnv& env,
                            const ActivationCache& cache);

// Products every left rule with every surviving length-1 rule of
// right_feature, ANDing the cached activation vectors from disk.
TaskResult combine_rulesets(const RuleSet& left, std::uint32_t right_feature,
                            const RuleSet& right, const FitEnv& env,
                            const ActivationCache& cache);

struct LengthStats {
    std::uint64_t candidates = 0;
    std::uint64_t survivors = 0;
};

struct TaskTiming {
    std::vector<std::uint32_t> signature;
    double seconds = 0.0;
};

struct GenerationReport {
    std::vector<LengthStats> per_length;
    std::vector<TaskTiming> task_times;
    double total_seconds = 0.0;
    std::filesystem::path csv_path;
};

// Runs all steps up to l_max with an inter-step barrier: step 1 schedules
// one task per feature, later steps one task per non-empty source pair under
// the right > max(left) rule. Tasks within a step run on up to cfg.workers
// threads that share nothing mutable; activation vectors move via the disk
// cache only. Survivors of every step are concatenated into out_csv in a
// canonical order (length, then signature, then enumeration order), so the
// output is byte-identical for any worker count. The cache directory is
// removed at the end unless cfg.keep_cache is set.
GenerationReport generate_all(const DiscretizedDataset& dd, std::span<const double> y,
                              const GenerationConfig& cfg,
                              const std::filesystem::path& out_csv,
                              std::span<const std::string> feature_names);

}  // namespace rulemine
