#include "rulemine/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include "rulemine/csv.hpp"

namespace rulemine {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::runtime_error("config key " + key + ": expected true/false/1/0, got '" + value +
                             "'");
}

std::size_t parse_size(const std::string& value, const std::string& key) {
    try {
        return static_cast<std::size_t>(parse_u64(value));
    } catch (const std::exception&) {
        throw std::runtime_error("config key " + key + ": invalid integer '" + value + "'");
    }
}

double parse_real(const std::string& value, const std::string& key) {
    try {
        return parse_double(value);
    } catch (const std::exception&) {
        throw std::runtime_error("config key " + key + ": invalid number '" + value + "'");
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.m_n < 1 || cfg.m_n > 256)
        throw std::runtime_error("config key m_n: must be in [1, 256]");
    if (cfg.l_max < 1) throw std::runtime_error("config key l_max: must be at least 1");
    if (!(cfg.cov_min >= 0.0 && cfg.cov_min <= 1.0))
        throw std::runtime_error("config key cov_min: must be in [0, 1]");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::runtime_error("config key alpha: must be strictly between 0 and 1");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw std::runtime_error("config key gamma: must be strictly between 0 and 1");
    if (cfg.window < 1) throw std::runtime_error("config key window: must be at least 1");
    if (cfg.workers < 1) throw std::runtime_error("config key workers: must be at least 1");
    if (cfg.criterion.empty())
        throw std::runtime_error("config key criterion: must not be empty");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());

    RunConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": empty key");
        if (!seen.insert(key).second)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": duplicate config key: " + key);

        try {
            if (key == "m_n") cfg.m_n = parse_size(value, key);
            else if (key == "l_max") cfg.l_max = parse_size(value, key);
            else if (key == "interval_mode") cfg.interval_mode = interval_mode_from_string(value);
            else if (key == "cov_min") cfg.cov_min = parse_real(value, key);
            else if (key == "K") cfg.K = parse_real(value, key);
            else if (key == "alpha") cfg.alpha = parse_real(value, key);
            else if (key == "criterion") cfg.criterion = value;
            else if (key == "window") cfg.window = parse_size(value, key);
            else if (key == "objective") cfg.objective = objective_from_string(value);
            else if (key == "gamma") cfg.gamma = parse_real(value, key);
            else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_size(value, key));
            else if (key == "cache_dir") cfg.cache_dir = value;
            else if (key == "keep_cache") cfg.keep_cache = parse_bool(value, key);
            else if (key == "no_prune") cfg.no_prune = parse_bool(value, key);
            else if (key == "discretize_per_stock")
                cfg.discretize_per_stock = parse_bool(value, key);
            else throw std::runtime_error("unknown config key: " + key);
        } catch (const std::exception& ex) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
    validate(cfg);
    return cfg;
}

void apply_env(RunConfig& cfg) {
    if (const char* dir = std::getenv("RULEMINE_CACHE_DIR"); dir != nullptr && dir[0] != '\0')
        cfg.cache_dir = dir;
}

GenerationConfig to_generation_config(const RunConfig& cfg) {
    GenerationConfig gen;
    gen.m_n = cfg.m_n;
    gen.l_max = cfg.l_max;
    gen.interval_mode = cfg.interval_mode;
    gen.thresholds = Thresholds{cfg.cov_min, cfg.K, cfg.alpha};
    gen.criterion = CriterionSpec{cfg.criterion, cfg.window, cfg.objective};
    gen.workers = cfg.workers;
    gen.cache_dir = cfg.cache_dir;
    gen.keep_cache = cfg.keep_cache;
    gen.no_prune = cfg.no_prune;
    return gen;
}

}  // namespace rulemine
