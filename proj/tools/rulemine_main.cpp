#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rulemine/cache.hpp"
#include "rulemine/config.hpp"
#include "rulemine/counting.hpp"
#include "rulemine/csv.hpp"
#include "rulemine/evaluation.hpp"
#include "rulemine/generation.hpp"
#include "rulemine/panel.hpp"
#include "rulemine/parallel.hpp"
#include "rulemine/scaling.hpp"
#include "rulemine/selection.hpp"

namespace {

using namespace rulemine;

// Per-subcommand settings plumbing. Values resolve in the order
// built-in defaults < --config file < RULEMINE_CACHE_DIR < explicit flags.
struct CommonConfig {
    std::string config_path;
    std::size_t m_n = 0, l_max = 0, window = 0;
    std::string interval_mode, criterion, objective, cache_dir;
    double cov_min = 0, K = 0, alpha = 0, gamma = 0;
    unsigned workers = 0;
    bool keep_cache = false, no_prune = false, per_stock = false;

    CLI::Option *o_m_n = nullptr, *o_l_max = nullptr, *o_window = nullptr;
    CLI::Option *o_interval_mode = nullptr, *o_criterion = nullptr, *o_objective = nullptr;
    CLI::Option *o_cache_dir = nullptr, *o_cov_min = nullptr, *o_K = nullptr;
    CLI::Option *o_alpha = nullptr, *o_gamma = nullptr, *o_workers = nullptr;
    CLI::Option *o_keep_cache = nullptr, *o_no_prune = nullptr, *o_per_stock = nullptr;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "flat key=value config file");
        o_m_n = app.add_option("--m_n", m_n, "bin count per feature");
        o_l_max = app.add_option("--l_max", l_max, "maximum rule length");
        o_interval_mode =
            app.add_option("--interval_mode", interval_mode, "interval mode: full or half");
        o_cov_min = app.add_option("--cov_min", cov_min, "minimum coverage threshold");
        o_K = app.add_option("--K", K, "criterion mean threshold");
        o_alpha = app.add_option("--alpha", alpha, "significance level");
        o_criterion = app.add_option("--criterion", criterion, "criterion name");
        o_window = app.add_option("--window", window, "rolling window in distinct dates");
        o_objective = app.add_option("--objective", objective, "maximize or minimize");
        o_gamma = app.add_option("--gamma", gamma, "selection overlap rate, in (0,1)");
        o_workers = app.add_option("--workers", workers, "parallel worker count");
        o_cache_dir = app.add_option("--cache_dir", cache_dir, "activation cache directory");
        o_keep_cache = app.add_flag("--keep_cache", keep_cache,
                                    "keep cached activation vectors after generation");
        o_no_prune = app.add_flag("--no_prune", no_prune, "disable all acceptance gates");
        o_per_stock = app.add_flag("--discretize_per_stock", per_stock,
                                   "compute bin edges per stock instead of pooled");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        apply_env(cfg);
        if (o_m_n->count()) cfg.m_n = m_n;
        if (o_l_max->count()) cfg.l_max = l_max;
        if (o_interval_mode->count()) cfg.interval_mode = interval_mode_from_string(interval_mode);
        if (o_cov_min->count()) cfg.cov_min = cov_min;
        if (o_K->count()) cfg.K = K;
        if (o_alpha->count()) cfg.alpha = alpha;
        if (o_criterion->count()) cfg.criterion = criterion;
        if (o_window->count()) cfg.window = window;
        if (o_objective->count()) cfg.objective = objective_from_string(objective);
        if (o_gamma->count()) cfg.gamma = gamma;
        if (o_workers->count()) cfg.workers = workers;
        if (o_cache_dir->count()) cfg.cache_dir = cache_dir;
        if (o_keep_cache->count()) cfg.keep_cache = true;
        if (o_no_prune->count()) cfg.no_prune = true;
        if (o_per_stock->count()) cfg.discretize_per_stock = true;
        return cfg;
    }
};

// target panel plus the matching discretized matrix, index-checked
struct GenerateInputs {
    PanelColumn target;
    BinsFile bins;
};

GenerateInputs load_generate_inputs(const std::string& target_path, const std::string& bins_path,
                                    std::size_t m_n) {
    GenerateInputs in;
    in.target = load_panel_column(target_path);
    in.bins = read_bins_csv(bins_path, m_n);
    if (in.bins.dd.index.entries != in.target.index.entries)
        throw std::runtime_error("index mismatch between " + target_path + " and " + bins_path);
    return in;
}

// rules re-hydrated from a CSV: records, conditions resolved against the
// panel's feature names, and activation vectors re-evaluated in parallel
struct LoadedRules {
    std::vector<RuleRecord> records;
    std::vector<Rule> rules;
    std::vector<ActivationVector> activations;
};

LoadedRules load_rules_against(const std::string& rules_path, const BinsFile& bins,
                               unsigned workers) {
    LoadedRules out;
    out.records = read_rules_csv(rules_path);
    out.rules.reserve(out.records.size());
    for (const auto& rec : out.records) {
        Condition cond = record_condition(rec, bins.feature_names);
        validate_condition(cond, bins.dd.bin_count);
        out.rules.push_back(
            Rule{std::move(cond), rec.pred, rec.cov, {rec.crit_mean}, rec.pvalue});
    }
    out.activations.assign(out.rules.size(), ActivationVector{});
    run_parallel(out.rules.size(), workers, [&](std::size_t i) {
        out.activations[i] = evaluate_condition(out.rules[i].condition, bins.dd);
    });
    return out;
}

void cmd_discretize(const CommonConfig& common, const std::string& target_path,
                    const std::string& features_path, const std::string& out_path) {
    const RunConfig cfg = common.resolve();
    const Dataset ds = load_dataset(target_path, features_path);
    const DiscretizedDataset dd = discretize_dataset(ds, cfg.m_n, cfg.discretize_per_stock);
    write_bins_csv(out_path, dd, ds.feature_names);
    std::cout << "rows=" << dd.n() << " features=" << dd.d() << " bins=" << dd.bin_count
              << " out=" << out_path << "\n";
}

void cmd_count(const CommonConfig& common, std::uint64_t d) {
    const RunConfig cfg = common.resolve();
    const RuleCounts counts = count_rules(d, cfg.m_n, cfg.l_max, cfg.interval_mode);
    for (const auto& lc : counts.per_length)
        std::cout << "R" << lc.length << "=" << lc.rules << " rulesets" << lc.length << "="
                  << lc.rulesets << " rules_per_set" << lc.length << "=" << lc.rules_per_set
                  << "\n";
    std::cout << "total=" << counts.total << "\n";
}

void cmd_generate(const CommonConfig& common, const std::string& target_path,
                  const std::string& bins_path, const std::string& out_path) {
    const RunConfig cfg = common.resolve();
    const GenerateInputs in = load_generate_inputs(target_path, bins_path, cfg.m_n);
    const GenerationReport report = generate_all(in.bins.dd, in.target.values,
                                                 to_generation_config(cfg), out_path,
                                                 in.bins.feature_names);
    for (std::size_t l = 0; l < report.per_length.size(); ++l)
        std::cout << "length=" << l + 1 << " candidates=" << report.per_length[l].candidates
                  << " survivors=" << report.per_length[l].survivors << "\n";
    std::cout << "total_seconds=" << format_double(report.total_seconds)
              << " out=" << out_path << "\n";
}

void cmd_select(const CommonConfig& common, const std::string& rules_path,
                const std::string& bins_path, const std::string& out_path) {
    const RunConfig cfg = common.resolve();
    const BinsFile bins = read_bins_csv(bins_path, cfg.m_n);
    const LoadedRules loaded = load_rules_against(rules_path, bins, cfg.workers);
    const std::vector<std::size_t> picked =
        select_signed_indices(loaded.rules, loaded.activations, cfg.objective, cfg.gamma);
    std::vector<RuleRecord> out;
    out.reserve(picked.size());
    for (std::size_t i : picked) out.push_back(loaded.records[i]);
    write_rules_csv(out_path, out);
    std::cout << "rules_in=" << loaded.rules.size() << " selected=" << picked.size()
              << " out=" << out_path << "\n";
}

void cmd_predict(const CommonConfig& common, const std::string& rules_path,
                 const std::string& bins_path, const std::string& out_path) {
    const RunConfig cfg = common.resolve();
    const BinsFile bins = read_bins_csv(bins_path, cfg.m_n);
    const LoadedRules loaded = load_rules_against(rules_path, bins, cfg.workers);
    const PredictionPanel panel =
        predict_panel(loaded.rules, loaded.activations, bins.dd.index);
    write_predictions_csv(out_path, panel);
    std::size_t predicted = 0;
    for (std::uint8_t h : panel.has) predicted += h;
    std::cout << "rows=" << panel.index.size() << " predicted=" << predicted
              << " out=" << out_path << "\n";
}

void cmd_backtest(const std::string& predictions_path, const std::string& returns_path,
                  std::size_t top_k, bool compound, const std::string& out_path,
                  std::string holdings_path) {
    const PredictionPanel preds = read_predictions_csv(predictions_path);
    const PanelColumn returns = load_panel_column(returns_path);
    const std::vector<Portfolio> portfolios = build_portfolios(preds, top_k);
    const ReturnSeries series = cumulative_return(portfolios, returns, compound);
    write_returns_csv(out_path, series);
    if (holdings_path.empty()) {
        std::filesystem::path p(out_path);
        p.replace_extension();
        holdings_path = p.string() + "_holdings.csv";
    }
    write_holdings_csv(holdings_path, portfolios);
    std::cout << "months=" << portfolios.size() << " days=" << series.dates.size()
              << " out=" << out_path << " holdings=" << holdings_path << "\n";
}

void cmd_bench(const CommonConfig& common, const std::string& target_path,
               const std::string& bins_path, const std::vector<unsigned>& worker_counts,
               unsigned repeats, const std::string& out_path) {
    const RunConfig cfg = common.resolve();
    const GenerateInputs in = load_generate_inputs(target_path, bins_path, cfg.m_n);
    const std::vector<BenchMeasurement> rows = run_benchmark(
        in.bins.dd, in.target.values, to_generation_config(cfg), worker_counts, repeats);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << "workers,repeat,seconds\n";
    for (const auto& row : rows)
        out << row.workers << ',' << row.repeat << ',' << format_double(row.seconds) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed to write file: " + out_path);
    std::cout << "measurements=" << rows.size() << " out=" << out_path << "\n";
}

void cmd_fit_amdahl(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open file: " + in_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + in_path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "workers,repeat,seconds")
        throw std::runtime_error(in_path + ": unexpected header '" + line +
                                 "' (expected 'workers,repeat,seconds')");
    std::vector<double> workers, seconds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(in_path + ":" + std::to_string(line_no) +
                                     ": expected 3 fields");
        workers.push_back(parse_double(fields[0]));
        seconds.push_back(parse_double(fields[2]));
    }
    const AmdahlFit fit = fit_amdahl(workers, seconds);
    std::cout << "t1=" << format_double(fit.t1) << " p=" << format_double(fit.p)
              << " residual=" << format_double(fit.residual) << "\n";
}

void cmd_simulate(std::size_t n_tasks, double fast_fraction, double bump, std::uint64_t seed,
                  const std::vector<unsigned>& worker_counts) {
    const std::vector<double> tasks = synth_workload(n_tasks, fast_fraction, bump, seed);
    std::cout << "workers,makespan\n";
    for (unsigned w : worker_counts)
        std::cout << w << ',' << format_double(simulate_schedule(tasks, w)) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rule induction over (date, stock) panels"};
    app.require_subcommand(1);

    // discretize
    auto* discretize = app.add_subcommand("discretize", "bin features by empirical quantiles");
    CommonConfig discretize_cfg;
    discretize_cfg.attach(*discretize);
    std::string d_target, d_features, d_out;
    discretize->add_option("--target", d_target, "target panel CSV")->required();
    discretize->add_option("--features", d_features, "feature panel CSV")->required();
    discretize->add_option("--out", d_out, "output bins CSV")->required();
    discretize->callback([&] { cmd_discretize(discretize_cfg, d_target, d_features, d_out); });

    // count
    auto* count = app.add_subcommand("count", "closed-form candidate rule counts");
    CommonConfig count_cfg;
    count_cfg.attach(*count);
    std::uint64_t c_d = 0;
    count->add_option("--d", c_d, "feature count")->required();
    count->callback([&] { cmd_count(count_cfg, c_d); });

    // generate
    auto* generate = app.add_subcommand("generate", "enumerate, fit and gate candidate rules");
    CommonConfig generate_cfg;
    generate_cfg.attach(*generate);
    std::string g_target, g_bins, g_out;
    generate->add_option("--target", g_target, "target panel CSV")->required();
    generate->add_option("--bins", g_bins, "discretized feature CSV")->required();
    generate->add_option("--out", g_out, "output rules CSV")->required();
    generate->callback([&] { cmd_generate(generate_cfg, g_target, g_bins, g_out); });

    // select
    auto* select = app.add_subcommand("select", "covering selection over generated rules");
    CommonConfig select_cfg;
    select_cfg.attach(*select);
    std::string s_rules, s_bins, s_out;
    select->add_option("--rules", s_rules, "generated rules CSV")->required();
    select->add_option("--bins", s_bins, "discretized feature CSV")->required();
    select->add_option("--out", s_out, "output rules CSV")->required();
    select->callback([&] { cmd_select(select_cfg, s_rules, s_bins, s_out); });

    // predict
    auto* predict = app.add_subcommand("predict", "aggregate rule predictions per panel entry");
    CommonConfig predict_cfg;
    predict_cfg.attach(*predict);
    std::string p_rules, p_bins, p_out;
    predict->add_option("--rules", p_rules, "selected rules CSV")->required();
    predict->add_option("--bins", p_bins, "discretized feature CSV")->required();
    predict->add_option("--out", p_out, "output predictions CSV")->required();
    predict->callback([&] { cmd_predict(predict_cfg, p_rules, p_bins, p_out); });

    // backtest
    auto* backtest =
        app.add_subcommand("backtest", "monthly top-k equal-weight cumulative return");
    std::string b_preds, b_returns, b_out, b_holdings;
    std::size_t b_top_k = 40;
    bool b_compound = false;
    backtest->add_option("--predictions", b_preds, "predictions CSV")->required();
    backtest->add_option("--returns", b_returns, "realized daily returns panel CSV")->required();
    backtest->add_option("--top_k", b_top_k, "stocks per portfolio (default 40)");
    backtest->add_flag("--compound", b_compound, "compound daily returns geometrically");
    backtest->add_option("--out", b_out, "output cumulative return CSV")->required();
    backtest->add_option("--holdings_out", b_holdings,
                         "output holdings CSV (default: <out>_holdings.csv)");
    backtest->callback(
        [&] { cmd_backtest(b_preds, b_returns, b_top_k, b_compound, b_out, b_holdings); });

    // bench
    auto* bench = app.add_subcommand("bench", "time generation at several worker counts");
    CommonConfig bench_cfg;
    bench_cfg.attach(*bench);
    std::string be_target, be_bins, be_out;
    std::vector<unsigned> be_workers;
    unsigned be_repeats = 1;
    bench->add_option("--target", be_target, "target panel CSV")->required();
    bench->add_option("--bins", be_bins, "discretized feature CSV")->required();
    bench->add_option("--workers_list", be_workers, "worker counts to measure")
        ->required()
        ->delimiter(',');
    bench->add_option("--repeats", be_repeats, "runs per worker count (default 1)");
    bench->add_option("--out", be_out, "output measurements CSV")->required();
    bench->callback(
        [&] { cmd_bench(bench_cfg, be_target, be_bins, be_workers, be_repeats, be_out); });

    // fit-amdahl
    auto* fit = app.add_subcommand("fit-amdahl", "least-squares strong-scaling fit");
    std::string f_in;
    fit->add_option("--in", f_in, "bench measurements CSV")->required();
    fit->callback([&] { cmd_fit_amdahl(f_in); });

    // simulate
    auto* simulate =
        app.add_subcommand("simulate", "greedy scheduling makespan on a synthetic workload");
    std::size_t si_n_tasks = 0;
    double si_fast_fraction = 0.99, si_bump = 50.0;
    std::uint64_t si_seed = 0;
    std::vector<unsigned> si_workers;
    simulate->add_option("--n_tasks", si_n_tasks, "task count")->required();
    simulate->add_option("--fast_fraction", si_fast_fraction,
                         "share of near-zero tasks, in (0,1) (default 0.99)");
    simulate->add_option("--bump", si_bump, "mode of the slow-task bump in seconds (default 50)");
    simulate->add_option("--seed", si_seed, "workload seed (default 0)");
    simulate->add_option("--workers_list", si_workers, "worker counts to simulate")
        ->required()
        ->delimiter(',');
    simulate->callback(
        [&] { cmd_simulate(si_n_tasks, si_fast_fraction, si_bump, si_seed, si_workers); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
