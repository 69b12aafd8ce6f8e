#include "rulemine/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

#include <unistd.h>

namespace rulemine {

double amdahl_time(double p, double t1, double workers) {
    if (workers < 1.0) throw std::runtime_error("worker count must be at least 1");
    return ((1.0 - p) + p / workers) * t1;
}

double amdahl_speedup(double p, double workers) {
    if (workers < 1.0) throw std::runtime_error("worker count must be at least 1");
    return 1.0 / ((1.0 - p) + p / workers);
}

namespace {

// closed-form least-squares t1 for a fixed p, plus the resulting SSE
std::pair<double, double> amdahl_sse(double p, std::span<const double> workers,
                                     std::span<const double> seconds) {
    double num = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const double g = (1.0 - p) + p / workers[i];
        num += seconds[i] * g;
        denom += g * g;
    }
    const double t1 = num / denom;
    double sse = 0.0;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const double g = (1.0 - p) + p / workers[i];
        const double r = t1 * g - seconds[i];
        sse += r * r;
    }
    return {t1, sse};
}

}  // namespace

AmdahlFit fit_amdahl(std::span<const double> workers, std::span<const double> seconds) {
    if (workers.size() != seconds.size())
        throw std::runtime_error("measurement vectors disagree in length");
    if (workers.size() < 2) throw std::runtime_error("need at least 2 measurements");
    std::set<double> distinct(workers.begin(), workers.end());
    if (distinct.size() < 2) throw std::runtime_error("need at least 2 distinct worker counts");
    for (double c : workers)
        if (c < 1.0) throw std::runtime_error("worker count must be at least 1");
    for (double t : seconds)
        if (!(t >= 0.0)) throw std::runtime_error("measured time must be non-negative");

    // grid search on p with three refinement rounds; t1 is closed-form per p
    constexpr int kPoints = 2000;
    double lo = 0.0, hi = 1.0;
    double best_p = 0.0, best_t1 = 0.0, best_sse = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 4; ++round) {
        const double step = (hi - lo) / kPoints;
        for (int i = 0; i <= kPoints; ++i) {
            const double p = lo + step * i;
            const auto [t1, sse] = amdahl_sse(p, workers, seconds);
            if (sse < best_sse) {
                best_sse = sse;
                best_p = p;
                best_t1 = t1;
            }
        }
        lo = std::max(0.0, best_p - step);
        hi = std::min(1.0, best_p + step);
    }
    return {best_p, best_t1, std::sqrt(best_sse)};
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53 random bits into [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> synth_workload(std::size_t n_tasks, double fast_fraction, double bump,
                                   std::uint64_t seed) {
    if (n_tasks < 1) throw std::runtime_error("need at least 1 task");
    if (!(fast_fraction > 0.0 && fast_fraction < 1.0))
        throw std::runtime_error("fast_fraction must be strictly between 0 and 1");
    if (!(bump >= 0.0)) throw std::runtime_error("bump seconds must be non-negative");

    std::mt19937_64 rng(seed);
    auto n_fast =
        static_cast<std::size_t>(std::llround(fast_fraction * static_cast<double>(n_tasks)));
    n_fast = std::min(n_fast, n_tasks);

    std::vector<double> tasks;
    tasks.reserve(n_tasks);
    constexpr double kFastMean = 0.01;  // seconds
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < n_fast; ++i)
        tasks.push_back(-kFastMean * std::log(1.0 - uniform01(rng)));
    for (std::size_t i = n_fast; i < n_tasks; ++i) {
        const double u1 = 1.0 - uniform01(rng);  // (0, 1]
        const double u2 = uniform01(rng);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        tasks.push_back(std::max(0.0, bump + z * bump / 10.0));
    }
    // Fisher-Yates so the heavy tasks land at random queue positions
    for (std::size_t i = n_tasks - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(tasks[i], tasks[j]);
    }
    return tasks;
}

double simulate_schedule(std::span<const double> tasks, unsigned workers) {
    if (workers < 1) throw std::runtime_error("worker count must be at least 1");
    for (double t : tasks)
        if (!(t >= 0.0)) throw std::runtime_error("task durations must be non-negative");
    if (tasks.empty()) return 0.0;

    const std::size_t w = std::min<std::size_t>(workers, tasks.size());
    using Slot = std::pair<double, std::size_t>;  // (free time, worker id)
    std::priority_queue<Slot, std::vector<Slot>, std::greater<Slot>> free;
    for (std::size_t i = 0; i < w; ++i) free.emplace(0.0, i);

    double makespan = 0.0;
    for (double t : tasks) {
        auto [at, id] = free.top();
        free.pop();
        const double done = at + t;
        makespan = std::max(makespan, done);
        free.emplace(done, id);
    }
    return makespan;
}

std::vector<BenchMeasurement> run_benchmark(const DiscretizedDataset& dd,
                                            std::span<const double> y,
                                            const GenerationConfig& cfg,
                                            std::span<const unsigned> worker_counts,
                                            unsigned repeats) {
    if (worker_counts.empty()) throw std::runtime_error("need at least one worker count");
    if (repeats < 1) throw std::runtime_error("need at least one repeat");
    for (unsigned w : worker_counts)
        if (w < 1) throw std::runtime_error("worker count must be at least 1");

    std::vector<std::string> names(dd.d());
    for (std::size_t j = 0; j < names.size(); ++j) names[j] = "X[" + std::to_string(j) + "]";

    const std::filesystem::path scratch =
        std::filesystem::temp_directory_path() /
        ("rulemine_bench_" + std::to_string(::getpid()));
    std::filesystem::create_directories(scratch);

    std::vector<BenchMeasurement> rows;
    try {
        for (unsigned w : worker_counts) {
            for (unsigned r = 0; r < repeats; ++r) {
                GenerationConfig run_cfg = cfg;
                run_cfg.workers = w;
                run_cfg.cache_dir = scratch / "cache";
                run_cfg.keep_cache = false;
                const std::filesystem::path out =
                    scratch / ("rules_" + std::to_string(w) + "_" + std::to_string(r) + ".csv");
                const auto t0 = std::chrono::steady_clock::now();
                generate_all(dd, y, run_cfg, out, names);
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rows.push_back({w, r, secs});
            }
        }
    } catch (const std::exception& ex) {
        std::filesystem::remove_all(scratch);
        throw std::runtime_error(std::string("benchmark run failed: ") + ex.what());
    }
    std::filesystem::remove_all(scratch);
    return rows;
}

}  // namespace rulemine
