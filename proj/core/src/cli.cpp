#include "debtnet/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>

#include "debtnet/balance_sheet.hpp"
#include "debtnet/dynamics.hpp"
#include "debtnet/errors.hpp"
#include "debtnet/experiment.hpp"
#include "debtnet/io.hpp"
#include "debtnet/reconstruction.hpp"
#include "debtnet/stability.hpp"

namespace debtnet::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Values from --config, validated against a fixed key set so that typos in
/// the file are rejected instead of silently ignored.
class ConfigFile {
public:
    ConfigFile() = default;

    explicit ConfigFile(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path.string());
        try {
            doc_ = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file " + path.string() + ": " + e.what());
        }
        if (!doc_.is_object()) throw ConfigError("config file must hold a JSON object");
        static const std::set<std::string> known = {
            "p",          "n_networks",    "n_shock_realizations",
            "p_shock",    "x_shock",       "rule",
            "alpha",      "base_seed",     "tol",
            "t_max",      "alpha_grid",    "x_shock_grid",
            "input",      "count",         "write_matrices",
            "n_banks",    "size_dispersion", "interbank_share",
            "equity_ratio", "normalize_by_p_shock"};
        for (const auto& [key, value] : doc_.items()) {
            if (!known.contains(key)) throw ConfigError("unknown config key: '" + key + "'");
        }
    }

    template <typename T>
    void apply(const char* key, T& target) const {
        if (!doc_.contains(key)) return;
        try {
            target = doc_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("config key '") + key + "' has the wrong type");
        }
    }

private:
    json doc_ = json::object();
};

struct CommonOptions {
    std::string config_path;
    std::string input_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_input) {
    cmd->add_option("--config", opts.config_path, "JSON config file; flags override it");
    if (needs_input)
        cmd->add_option("--input", opts.input_path, "balance-sheet CSV file");
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", opts.seed, "base seed (overrides config)");
    cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

fs::path prepare_out_dir(const CommonOptions& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_summary(const fs::path& dir, const json& summary) {
    std::ofstream out(dir / "summary.json");
    if (!out) throw RuntimeFailure("cannot write " + (dir / "summary.json").string());
    out << summary.dump(2) << '\n';
}

BankingSystem load_input(const CommonOptions& opts) {
    if (opts.input_path.empty())
        throw ConfigError("no input balance-sheet file given (--input or config 'input')");
    return load_balance_sheets(opts.input_path);
}

PropagationRule parse_rule(const std::string& name, double alpha) {
    if (name == "linear") return PropagationRule::linear();
    if (name == "furfine") return PropagationRule::furfine();
    if (name == "nonlinear") return PropagationRule::nonlinear(alpha);
    throw ConfigError("unknown rule '" + name + "' (expected linear, furfine or nonlinear)");
}

json scenario_echo(const ScenarioConfig& cfg) {
    json j;
    j["p"] = cfg.p;
    j["n_networks"] = cfg.n_networks;
    j["n_shock_realizations"] = cfg.n_shock_realizations;
    j["p_shock"] = cfg.p_shock;
    j["x_shock"] = cfg.x_shock;
    j["rule"] = cfg.rule.name();
    if (cfg.rule.kind == PropagationRule::Kind::nonlinear) j["alpha"] = cfg.rule.alpha;
    j["base_seed"] = cfg.base_seed;
    j["tol"] = cfg.tol;
    j["t_max"] = cfg.t_max;
    return j;
}

// ---- generate ----

int cmd_generate(const CommonOptions& opts, const ConfigFile& config, const CLI::App& cmd,
                 SyntheticParams params) {
    // Flags are bound directly into params; config fills only what was not
    // given on the command line.
    if (!cmd.count("--n")) config.apply("n_banks", params.n_banks);
    if (!cmd.count("--dispersion")) config.apply("size_dispersion", params.size_dispersion);
    if (!cmd.count("--interbank-share")) config.apply("interbank_share", params.interbank_share);
    if (!cmd.count("--equity-ratio")) config.apply("equity_ratio", params.equity_ratio);
    config.apply("base_seed", params.seed);
    if (cmd.count("--seed")) params.seed = opts.seed;

    const BankingSystem system = generate_synthetic(params);
    const fs::path dir = prepare_out_dir(opts);
    save_balance_sheets(system, dir / "balance_sheets.csv");

    json summary;
    summary["command"] = "generate";
    summary["config"] = {{"n_banks", params.n_banks},
                         {"seed", params.seed},
                         {"size_dispersion", params.size_dispersion},
                         {"interbank_share", params.interbank_share},
                         {"equity_ratio", params.equity_ratio}};
    summary["outputs"] = {{"balance_sheets", "balance_sheets.csv"}};
    summary["n_banks"] = system.size();
    write_summary(dir, summary);
    if (!opts.quiet)
        std::cerr << "generated " << system.size() << " banks -> "
                  << (dir / "balance_sheets.csv").string() << '\n';
    return kExitOk;
}

// ---- reconstruct ----

int cmd_reconstruct(const CommonOptions& opts, const ConfigFile& config, const CLI::App& cmd,
                    double p, int count, bool write_matrices) {
    if (!cmd.count("--p")) config.apply("p", p);
    if (!cmd.count("--count")) config.apply("count", count);
    if (!cmd.count("--write-matrices")) config.apply("write_matrices", write_matrices);
    CommonOptions eff = opts;
    if (!cmd.count("--input")) config.apply("input", eff.input_path);
    std::uint64_t seed = 1;
    config.apply("base_seed", seed);
    if (cmd.count("--seed")) seed = opts.seed;

    const BankingSystem system = load_input(eff);
    const auto samples = reconstruct_ensemble(system, p, count, seed);
    const DensityCalibration calib = calibrate_density(system, p);

    const fs::path dir = prepare_out_dir(opts);
    {
        std::ofstream out(dir / "reconstruction.csv");
        out << "sample,seed,edges,ras_residual,ras_converged\n";
        for (std::size_t k = 0; k < samples.size(); ++k) {
            long edges = 0;
            const auto& adj = samples[k].adjacency;
            for (Eigen::Index i = 0; i < adj.rows(); ++i)
                for (Eigen::Index j = 0; j < adj.cols(); ++j)
                    if (adj(i, j)) ++edges;
            out << k << ',' << samples[k].seed << ',' << edges << ','
                << format_double(samples[k].ras_residual) << ','
                << (samples[k].ras_converged ? 1 : 0) << '\n';
        }
    }
    if (write_matrices) {
        fs::create_directories(dir / "matrices");
        for (std::size_t k = 0; k < samples.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof(name), "network_%03zu.csv", k);
            std::ofstream out(dir / "matrices" / name);
            write_edge_list(samples[k].weights, out);
        }
    }

    json summary;
    summary["command"] = "reconstruct";
    summary["config"] = {{"input", eff.input_path}, {"p", p},      {"count", count},
                         {"base_seed", seed},       {"write_matrices", write_matrices}};
    summary["calibration"] = {{"z", std::isinf(calib.z) ? json("inf") : json(calib.z)},
                              {"expected_edges", calib.achieved_expected_edges}};
    summary["outputs"] = {{"reconstruction", "reconstruction.csv"}};
    write_summary(dir, summary);
    if (!opts.quiet)
        std::cerr << "reconstructed " << samples.size() << " networks at p=" << p << '\n';
    return kExitOk;
}

// ---- scenario assembly shared by run/sweep/stability ----

ScenarioConfig assemble_scenario(const ConfigFile& config, const CLI::App& cmd,
                                 const CommonOptions& opts, double p, int n_networks,
                                 int n_realizations, double p_shock, double x_shock,
                                 std::string rule_name, double alpha, double tol, int t_max) {
    ScenarioConfig cfg;
    config.apply("p", cfg.p);
    config.apply("n_networks", cfg.n_networks);
    config.apply("n_shock_realizations", cfg.n_shock_realizations);
    config.apply("p_shock", cfg.p_shock);
    config.apply("x_shock", cfg.x_shock);
    config.apply("base_seed", cfg.base_seed);
    config.apply("tol", cfg.tol);
    config.apply("t_max", cfg.t_max);
    std::string cfg_rule = "nonlinear";
    double cfg_alpha = 1.0;
    config.apply("rule", cfg_rule);
    config.apply("alpha", cfg_alpha);

    if (cmd.count("--p")) cfg.p = p;
    if (cmd.count("--n-networks")) cfg.n_networks = n_networks;
    if (cmd.count("--n-realizations")) cfg.n_shock_realizations = n_realizations;
    if (cmd.count("--p-shock")) cfg.p_shock = p_shock;
    if (cmd.count("--x-shock")) cfg.x_shock = x_shock;
    if (cmd.count("--seed")) cfg.base_seed = opts.seed;
    if (cmd.count("--tol")) cfg.tol = tol;
    if (cmd.count("--t-max")) cfg.t_max = t_max;
    if (cmd.count("--rule")) cfg_rule = rule_name;
    if (cmd.count("--alpha")) cfg_alpha = alpha;
    cfg.rule = parse_rule(cfg_rule, cfg_alpha);
    cfg.validate();
    return cfg;
}

// ---- run ----

int cmd_run(const CommonOptions& opts, const ConfigFile& config, const CLI::App& cmd,
            const ScenarioConfig& cfg) {
    CommonOptions eff = opts;
    if (!cmd.count("--input")) config.apply("input", eff.input_path);
    const BankingSystem system = load_input(eff);
    const EnsembleResult result = run_ensemble(system, cfg);

    const fs::path dir = prepare_out_dir(opts);
    {
        std::ofstream out(dir / "trajectory.csv");
        write_trajectory_table(result, out);
    }

    json summary;
    summary["command"] = "run";
    summary["config"] = scenario_echo(cfg);
    summary["config"]["input"] = eff.input_path;
    summary["outputs"] = {{"trajectory", "trajectory.csv"}};
    summary["results"] = {{"mean_H_inf", result.mean_H_inf},
                          {"stderr_H_inf", result.stderr_H_inf},
                          {"mean_H_initial", result.mean_H_initial},
                          {"n_runs", result.n_runs},
                          {"n_nonconverged", result.n_nonconverged},
                          {"n_failures", result.failures.size()}};
    write_summary(dir, summary);
    if (!opts.quiet)
        std::cerr << "ensemble of " << result.n_runs << " runs: mean H_inf=" << result.mean_H_inf
                  << " (stderr " << result.stderr_H_inf << ")\n";
    return kExitOk;
}

// ---- sweep ----

int cmd_sweep(const CommonOptions& opts, const ConfigFile& config, const CLI::App& cmd,
              const ScenarioConfig& cfg, std::vector<double> alpha_grid,
              std::vector<double> x_grid, bool normalize) {
    if (!cmd.count("--alpha-grid")) config.apply("alpha_grid", alpha_grid);
    if (!cmd.count("--x-shock-grid")) config.apply("x_shock_grid", x_grid);
    if (!cmd.count("--normalize-by-p-shock")) config.apply("normalize_by_p_shock", normalize);
    CommonOptions eff = opts;
    if (!cmd.count("--input")) config.apply("input", eff.input_path);
    if (alpha_grid.empty() || x_grid.empty())
        throw ConfigError("sweep needs non-empty alpha_grid and x_shock_grid");
    if (normalize) {
        // Grid given in total-shock units (as for p_shock = 1).
        for (double& x : x_grid)
            x = total_shock_normalizer(cfg.p_shock, {x, x}).first;
    }

    const BankingSystem system = load_input(eff);
    const SweepResult result = sweep_H_surface(system, cfg, alpha_grid, x_grid);

    const fs::path dir = prepare_out_dir(opts);
    {
        std::ofstream out(dir / "sweep.csv");
        write_sweep_table(result, out);
    }

    json summary;
    summary["command"] = "sweep";
    summary["config"] = scenario_echo(cfg);
    summary["config"]["input"] = eff.input_path;
    summary["config"]["alpha_grid"] = alpha_grid;
    summary["config"]["x_shock_grid"] = x_grid;
    summary["outputs"] = {{"sweep", "sweep.csv"}};
    write_summary(dir, summary);
    if (!opts.quiet)
        std::cerr << "sweep over " << result.cells.size() << " cells written\n";
    return kExitOk;
}

// ---- stability ----

int cmd_stability(const CommonOptions& opts, const ConfigFile& config, const CLI::App& cmd,
                  double p, int count) {
    if (!cmd.count("--p")) config.apply("p", p);
    if (!cmd.count("--count")) config.apply("count", count);
    CommonOptions eff = opts;
    if (!cmd.count("--input")) config.apply("input", eff.input_path);
    std::uint64_t seed = 1;
    config.apply("base_seed", seed);
    if (cmd.count("--seed")) seed = opts.seed;

    const BankingSystem system = load_input(eff);
    const auto samples = reconstruct_ensemble(system, p, count, seed);

    const fs::path dir = prepare_out_dir(opts);
    double sum_lambda = 0.0;
    double sum_alpha_crit = 0.0;
    {
        std::ofstream out(dir / "stability.csv");
        out << "sample,lambda_max,alpha_critical,iterations,residual,converged\n";
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const LeverageMatrix leverage = build_leverage(system, samples[k].weights);
            const StabilityReport report = assess(leverage.lambda);
            sum_lambda += report.lambda_max;
            sum_alpha_crit += report.alpha_critical;
            out << k << ',' << format_double(report.lambda_max) << ','
                << format_double(report.alpha_critical) << ',' << report.iterations << ','
                << format_double(report.residual) << ',' << (report.converged ? 1 : 0) << '\n';
        }
    }
    const double n = static_cast<double>(samples.size());

    json summary;
    summary["command"] = "stability";
    summary["config"] = {{"input", eff.input_path}, {"p", p}, {"count", count},
                         {"base_seed", seed}};
    summary["outputs"] = {{"stability", "stability.csv"}};
    summary["results"] = {{"mean_lambda_max", sum_lambda / n},
                          {"mean_alpha_critical",
                           std::isfinite(sum_alpha_crit / n) ? json(sum_alpha_crit / n)
                                                             : json("-inf")}};
    write_summary(dir, summary);
    if (!opts.quiet)
        std::cerr << "mean lambda_max=" << sum_lambda / n << " over " << samples.size()
                  << " samples\n";
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& argv) {
    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& s : argv) raw.push_back(s.c_str());
    return dispatch(static_cast<int>(raw.size()), raw.data());
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Interbank stress-testing engine: network reconstruction, "
                 "contagion dynamics and spectral stability analysis"};
    app.require_subcommand(1);

    CommonOptions gen_opts, rec_opts, run_opts, sweep_opts, stab_opts;

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic balance-sheet file");
    SyntheticParams gen_params;
    add_common(gen, gen_opts, false);
    gen->add_option("--n", gen_params.n_banks, "number of banks");
    gen->add_option("--dispersion", gen_params.size_dispersion, "sigma of log total assets");
    gen->add_option("--interbank-share", gen_params.interbank_share,
                    "interbank assets / total assets");
    gen->add_option("--equity-ratio", gen_params.equity_ratio, "equity / total assets");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "reconstruct an exposure-network ensemble");
    double rec_p = 0.05;
    int rec_count = 100;
    bool rec_matrices = false;
    add_common(rec, rec_opts, true);
    rec->add_option("--p", rec_p, "target connectivity in (0,1]");
    rec->add_option("--count", rec_count, "ensemble size");
    rec->add_flag("--write-matrices", rec_matrices, "serialize weight matrices as edge lists");

    // scenario flags shared by run/sweep
    struct ScenarioFlags {
        double p = 0.05, p_shock = 0.05, x_shock = 0.005, alpha = 1.0, tol = 1e-10;
        int n_networks = 100, n_realizations = 10, t_max = 10000;
        std::string rule = "nonlinear";
    };
    auto add_scenario = [](CLI::App* cmd, ScenarioFlags& f) {
        cmd->add_option("--p", f.p, "reconstruction connectivity");
        cmd->add_option("--n-networks", f.n_networks, "networks per ensemble");
        cmd->add_option("--n-realizations", f.n_realizations, "shock realizations per network");
        cmd->add_option("--p-shock", f.p_shock, "fraction of banks shocked");
        cmd->add_option("--x-shock", f.x_shock, "fractional external-asset devaluation");
        cmd->add_option("--rule", f.rule, "linear | furfine | nonlinear");
        cmd->add_option("--alpha", f.alpha, "non-linearity parameter");
        cmd->add_option("--tol", f.tol, "convergence tolerance");
        cmd->add_option("--t-max", f.t_max, "maximum propagation steps");
    };

    auto* runc = app.add_subcommand("run", "run one ensemble and write the trajectory table");
    ScenarioFlags run_flags;
    add_common(runc, run_opts, true);
    add_scenario(runc, run_flags);

    auto* sweep = app.add_subcommand("sweep", "H_infinity surface over (alpha, x_shock)");
    ScenarioFlags sweep_flags;
    std::vector<double> alpha_grid, x_grid;
    bool normalize = false;
    add_common(sweep, sweep_opts, true);
    add_scenario(sweep, sweep_flags);
    sweep->add_option("--alpha-grid", alpha_grid, "alpha grid values");
    sweep->add_option("--x-shock-grid", x_grid, "x_shock grid values");
    sweep->add_flag("--normalize-by-p-shock", normalize,
                    "treat the x_shock grid as total-shock units and divide by p_shock");

    auto* stab = app.add_subcommand("stability", "spectral stability per reconstructed sample");
    double stab_p = 0.05;
    int stab_count = 100;
    add_common(stab, stab_opts, true);
    stab->add_option("--p", stab_p, "reconstruction connectivity");
    stab->add_option("--count", stab_count, "ensemble size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (gen->parsed()) {
            ConfigFile config =
                gen_opts.config_path.empty() ? ConfigFile() : ConfigFile(gen_opts.config_path);
            return cmd_generate(gen_opts, config, *gen, gen_params);
        }
        if (rec->parsed()) {
            ConfigFile config =
                rec_opts.config_path.empty() ? ConfigFile() : ConfigFile(rec_opts.config_path);
            return cmd_reconstruct(rec_opts, config, *rec, rec_p, rec_count, rec_matrices);
        }
        if (runc->parsed()) {
            ConfigFile config =
                run_opts.config_path.empty() ? ConfigFile() : ConfigFile(run_opts.config_path);
            const ScenarioConfig cfg = assemble_scenario(
                config, *runc, run_opts, run_flags.p, run_flags.n_networks,
                run_flags.n_realizations, run_flags.p_shock, run_flags.x_shock, run_flags.rule,
                run_flags.alpha, run_flags.tol, run_flags.t_max);
            return cmd_run(run_opts, config, *runc, cfg);
        }
        if (sweep->parsed()) {
            ConfigFile config =
                sweep_opts.config_path.empty() ? ConfigFile() : ConfigFile(sweep_opts.config_path);
            const ScenarioConfig cfg = assemble_scenario(
                config, *sweep, sweep_opts, sweep_flags.p, sweep_flags.n_networks,
                sweep_flags.n_realizations, sweep_flags.p_shock, sweep_flags.x_shock,
                sweep_flags.rule, sweep_flags.alpha, sweep_flags.tol, sweep_flags.t_max);
            return cmd_sweep(sweep_opts, config, *sweep, cfg, alpha_grid, x_grid, normalize);
        }
        if (stab->parsed()) {
            ConfigFile config =
                stab_opts.config_path.empty() ? ConfigFile() : ConfigFile(stab_opts.config_path);
            return cmd_stability(stab_opts, config, *stab, stab_p, stab_count);
        }
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace debtnet::cli
