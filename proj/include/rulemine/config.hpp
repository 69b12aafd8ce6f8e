#pragma once

#include <filesystem>
#include <string>

#include "rulemine/generation.hpp"
#include "rulemine/selection.hpp"

namespace rulemine {

// Everything a full run needs, with the documented defaults. Sources are
// applied in order config file < RULEMINE_CACHE_DIR < command line.
struct RunConfig {
    std::size_t m_n = 5;
    std::size_t l_max = 2;
    IntervalMode interval_mode = IntervalMode::full;
    double cov_min = 0.05;
    double K = 0.0;
    double alpha = 0.05;
    std::string criterion = "rolling_mean";
    std::size_t window = 1;
    Objective objective = Objective::maximize;
    double gamma = 0.2;
    unsigned workers = 1;
    std::filesystem::path cache_dir = "activation_cache";
    bool keep_cache = false;
    bool no_prune = false;
    bool discretize_per_stock = false;
};

// key = value lines, '#' comments, blank lines ignored. Unknown or repeated
// keys are errors.
RunConfig load_config(const std::filesystem::path& path);

// Overlays RULEMINE_CACHE_DIR when set.
void apply_env(RunConfig& cfg);

GenerationConfig to_generation_config(const RunConfig& cfg);

}  // namespace rulemine
