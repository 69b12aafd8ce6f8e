#include "rulemine/generation.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>

#include "rulemine/csv.hpp"
#include "rulemine/parallel.hpp"

namespace rulemine {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string signature_string(std::span<const std::uint32_t> signature) {
    std::string out;
    for (std::size_t i = 0; i < signature.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(signature[i]);
    }
    return out;
}

}  // namespace

TaskSpec make_task_spec(std::vector<std::uint32_t> left, std::uint32_t right) {
    if (left.empty()) throw std::runtime_error("task needs a non-empty left signature");
    for (std::size_t i = 1; i < left.size(); ++i)
        if (left[i] <= left[i - 1])
            throw std::runtime_error("left signature is not strictly increasing");
    if (right <= left.back())
        throw std::runtime_error("scheduling rule violated: right feature " +
                                 std::to_string(right) + " must exceed max of left signature");
    TaskSpec spec;
    spec.signature = left;
    spec.signature.push_back(right);
    spec.left = std::move(left);
    spec.right = right;
    return spec;
}

std::vector<TaskSpec> schedule_step(const std::vector<std::vector<std::uint32_t>>& left_signatures,
                                    const std::vector<std::uint32_t>& right_features) {
    std::vector<TaskSpec> tasks;
    for (const auto& left : left_signatures)
        for (std::uint32_t f : right_features)
            if (f > left.back()) tasks.push_back(make_task_spec(left, f));
    std::sort(tasks.begin(), tasks.end(),
              [](const TaskSpec& a, const TaskSpec& b) { return a.signature < b.signature; });
    for (std::size_t i = 1; i < tasks.size(); ++i)
        if (tasks[i].signature == tasks[i - 1].signature)
            throw std::runtime_error("duplicate task signature: " +
                                     signature_string(tasks[i].signature));
    return tasks;
}

std::vector<std::pair<std::uint8_t, std::uint8_t>> enumerate_intervals(std::size_t m_n,
                                                                       IntervalMode mode) {
    if (m_n < 1) throw std::runtime_error("bin count must be at least 1");
    if (m_n > 256) throw std::runtime_error("bin count must be in [1, 256]");

    // a single bin admits no non-trivial interval, so m_n = 1 yields nothing
    std::vector<std::pair<std::uint8_t, std::uint8_t>> out;
    const auto top = static_cast<std::uint8_t>(m_n - 1);
    if (mode == IntervalMode::full) {
        for (std::size_t lo = 0; lo < m_n; ++lo)
            for (std::size_t hi = lo; hi < m_n; ++hi) {
                if (lo == 0 && hi == m_n - 1) continue;
                out.emplace_back(static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi));
            }
    } else {
        for (std::size_t hi = 0; hi + 1 < m_n; ++hi)
            out.emplace_back(std::uint8_t{0}, static_cast<std::uint8_t>(hi));
        for (std::size_t lo = 1; lo < m_n; ++lo)
            out.emplace_back(static_cast<std::uint8_t>(lo), top);
    }
    return out;
}

FitEnv make_fit_env(const DiscretizedDataset& dd, std::span<const double> y,
                    const DateIndex& dates, const GenerationConfig& cfg) {
    if (y.size() != dd.n()) throw std::runtime_error("target length mismatch");
    if (y.empty()) throw std::runtime_error("empty target");
    double sum = 0.0;
    for (double v : y) sum += v;
    const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    return FitEnv{dd,
                  y,
                  dates,
                  cfg,
                  criterion_by_name(cfg.criterion.name),
                  sum / static_cast<double>(y.size()),
                  *mx - *mn};
}

std::optional<Rule> fit_candidate(Condition cond, const ActivationVector& act,
                                  const FitEnv& env) {
    const double cov = static_cast<double>(act.ones()) / static_cast<double>(act.size());

    std::vector<double> seq;
    double pred = 0.0;
    double pvalue = 1.0;
    auto compute_seq = [&]() -> std::span<const double> {
        seq = env.criterion(act, env.y, env.dates, env.cfg.criterion);
        return seq;
    };
    auto compute_pvalue = [&]() -> double {
        pred = predict_value(act, env.y);
        pvalue = significance_from_stats(act.ones(), pred, env.y_mean, env.y_range);
        return pvalue;
    };

    if (env.cfg.no_prune) {
        // every fittable candidate survives; a rule still needs at least one
        // activated point to carry a prediction at all
        if (act.ones() == 0) return std::nullopt;
        compute_seq();
        compute_pvalue();
    } else {
        const GateVerdict verdict =
            gate_rule(cov, compute_seq, compute_pvalue, env.cfg.thresholds, env.cfg.criterion);
        if (!verdict.passed) return std::nullopt;
    }
    return Rule{std::move(cond), pred, cov, std::move(seq), pvalue};
}

TaskResult generate_length1(std::uint32_t feature, const FitEnv& env,
                            const ActivationCache& cache) {
    const auto t0 = Clock::now();
    if (feature >= env.dd.d())
        throw std::runtime_error("feature index out of range: " + std::to_string(feature));

    TaskResult result;
    result.set.signature = {feature};
    for (const auto& [lo, hi] : enumerate_intervals(env.dd.bin_count, env.cfg.interval_mode)) {
        Condition cond{{feature}, {lo}, {hi}};
        const ActivationVector act = evaluate_condition(cond, env.dd);
        ++result.candidates;
        if (auto rule = fit_candidate(std::move(cond), act, env)) {
            const std::string file = cache.store(rule->condition, act);
            result.cached.emplace_back(canonical_string(rule->condition), file);
            result.set.rules.push_back(std::move(*rule));
        }
    }
    result.seconds = seconds_since(t0);
    return result;
}

TaskResult combine_rulesets(const RuleSet& left, std::uint32_t right_feature,
                            const RuleSet& right, const FitEnv& env,
                            const ActivationCache& cache) {
    const auto t0 = Clock::now();
    if (left.signature.empty()) throw std::runtime_error("left ruleset has no signature");
    if (right_feature <= left.signature.back())
        throw std::runtime_error("scheduling rule violated: right feature " +
                                 std::to_string(right_feature) +
                                 " must exceed max of left signature");
    if (right.signature != std::vector<std::uint32_t>{right_feature})
        throw std::runtime_error("right ruleset is not the length-1 set of feature " +
                                 std::to_string(right_feature));

    TaskResult result;
    result.set.signature = left.signature;
    result.set.signature.push_back(right_feature);

    std::vector<ActivationVector> right_acts;
    right_acts.reserve(right.rules.size());
    for (const Rule& rr : right.rules) right_acts.push_back(cache.load(rr.condition));

    for (const Rule& lr : left.rules) {
        const ActivationVector left_act = cache.load(lr.condition);
        for (std::size_t r = 0; r < right.rules.size(); ++r) {
            const Rule& rr = right.rules[r];
            ++result.candidates;
            const ActivationVector act = and_activation(left_act, right_acts[r]);
            Condition cond = lr.condition;
            cond.features.push_back(rr.condition.features[0]);
            cond.bmins.push_back(rr.condition.bmins[0]);
            cond.bmaxs.push_back(rr.condition.bmaxs[0]);
            if (auto rule = fit_candidate(std::move(cond), act, env)) {
                const std::string file = cache.store(rule->condition, act);
                result.cached.emplace_back(canonical_string(rule->condition), file);
                result.set.rules.push_back(std::move(*rule));
            }
        }
    }
    result.seconds = seconds_since(t0);
    return result;
}

GenerationReport generate_all(const DiscretizedDataset& dd, std::span<const double> y,
                              const GenerationConfig& cfg,
                              const std::filesystem::path& out_csv,
                              std::span<const std::string> feature_names) {
    const auto t0 = Clock::now();
    if (cfg.l_max < 1) throw std::runtime_error("maximum rule length must be at least 1");
    if (cfg.workers < 1) throw std::runtime_error("worker count must be at least 1");
    if (cfg.m_n != dd.bin_count)
        throw std::runtime_error("configured bin count (" + std::to_string(cfg.m_n) +
                                 ") does not match the data (" + std::to_string(dd.bin_count) +
                                 ")");
    if (feature_names.size() != dd.d())
        throw std::runtime_error("feature name count does not match the data");

    const DateIndex dates = build_date_index(dd.index);
    const FitEnv env = make_fit_env(dd, y, dates, cfg);
    if (cfg.criterion.window < 1 || cfg.criterion.window > dates.dates.size())
        throw std::runtime_error("window (" + std::to_string(cfg.criterion.window) +
                                 ") larger than distinct-date count (" +
                                 std::to_string(dates.dates.size()) + ")");

    std::filesystem::create_directories(cfg.cache_dir);
    const ActivationCache cache(cfg.cache_dir);
    cache.clear();

    GenerationReport report;
    report.csv_path = out_csv;
    std::vector<std::pair<std::string, std::string>> manifest;
    std::vector<std::vector<RuleSet>> sets_by_step;

    auto absorb = [&](std::vector<TaskResult>& results) {
        LengthStats stats;
        std::vector<RuleSet> sets;
        for (auto& res : results) {
            stats.candidates += res.candidates;
            stats.survivors += res.set.rules.size();
            report.task_times.push_back({res.set.signature, res.seconds});
            for (auto& entry : res.cached) manifest.push_back(std::move(entry));
            if (!res.set.rules.empty()) sets.push_back(std::move(res.set));
        }
        report.per_length.push_back(stats);
        sets_by_step.push_back(std::move(sets));
    };

    // step 1: one task per feature
    {
        std::vector<TaskResult> results(dd.d());
        run_parallel(dd.d(), cfg.workers, [&](std::size_t i) {
            try {
                results[i] =
                    generate_length1(static_cast<std::uint32_t>(i), env, cache);
            } catch (const std::exception& ex) {
                throw std::runtime_error("generation task [" + std::to_string(i) +
                                         "] failed: " + ex.what());
            }
        });
        absorb(results);
    }

    // steps l > 1: one task per non-empty (left, right) source pair
    for (std::size_t l = 2; l <= cfg.l_max; ++l) {
        const std::vector<RuleSet>& lefts = sets_by_step[l - 2];
        const std::vector<RuleSet>& ones = sets_by_step[0];

        std::map<std::vector<std::uint32_t>, const RuleSet*> left_by_sig;
        for (const RuleSet& s : lefts) left_by_sig[s.signature] = &s;
        std::map<std::uint32_t, const RuleSet*> right_by_feature;
        std::vector<std::uint32_t> right_features;
        for (const RuleSet& s : ones) {
            right_by_feature[s.signature[0]] = &s;
            right_features.push_back(s.signature[0]);
        }
        std::vector<std::vector<std::uint32_t>> left_sigs;
        left_sigs.reserve(lefts.size());
        for (const RuleSet& s : lefts) left_sigs.push_back(s.signature);

        const std::vector<TaskSpec> tasks = schedule_step(left_sigs, right_features);
        std::vector<TaskResult> results(tasks.size());
        run_parallel(tasks.size(), cfg.workers, [&](std::size_t t) {
            const TaskSpec& spec = tasks[t];
            try {
                results[t] = combine_rulesets(*left_by_sig.at(spec.left), spec.right,
                                              *right_by_feature.at(spec.right), env, cache);
            } catch (const std::exception& ex) {
                throw std::runtime_error("generation task [" +
                                         signature_string(spec.signature) +
                                         "] failed: " + ex.what());
            }
        });
        absorb(results);
    }

    // ordinals follow the canonical order the steps produced: length, then
    // signature, then interval enumeration
    std::vector<RuleRecord> records;
    std::size_t ordinal = 0;
    for (const auto& sets : sets_by_step)
        for (const RuleSet& set : sets)
            for (const Rule& rule : set.rules)
                records.push_back(to_record(rule, ordinal++, feature_names));
    write_rules_csv(out_csv, records);

    cache.write_manifest(manifest);
    if (!cfg.keep_cache) std::filesystem::remove_all(cfg.cache_dir);

    report.total_seconds = seconds_since(t0);
    return report;
}

}  // namespace rulemine
