#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rulemine/generation.hpp"
#include "rulemine/panel.hpp"

namespace rulemine {

// t(c) = ((1 - p) + p / c) * t1
struct AmdahlFit {
    double p = 0.0;   // parallel fraction, in [0, 1]
    double t1 = 0.0;  // one-worker runtime
    double residual = 0.0;
};

double amdahl_time(double p, double t1, double workers);
double amdahl_speedup(double p, double workers);

// Least-squares fit of (p, t1) to measured (workers, seconds) pairs.
// Needs at least two distinct worker counts.
AmdahlFit fit_amdahl(std::span<const double> workers, std::span<const double> seconds);

// Task durations drawn as a heavy-tailed mix: a fast exponential mass plus
// a slow normal bump at `bump` seconds. Order is shuffled. Deterministic in
// the seed.
std::vector<double> synth_workload(std::size_t n_tasks, double fast_fraction, double bump,
                                   std::uint64_t seed);

// Greedy list scheduling: each task goes to the earliest-free worker, in
// input order. Returns the makespan.
double simulate_schedule(std::span<const double> tasks, unsigned workers);

struct BenchMeasurement {
    unsigned workers = 0;
    unsigned repeat = 0;
    double seconds = 0.0;
};

// Times generate_all on the given data, `repeats` runs per worker count,
// one run at a time. The rule CSVs go to throwaway files.
std::vector<BenchMeasurement> run_benchmark(const DiscretizedDataset& dd,
                                            std::span<const double> y,
                                            const GenerationConfig& cfg,
                                            std::span<const unsigned> worker_counts,
                                            unsigned repeats);

}  // namespace rulemine
