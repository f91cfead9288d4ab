#include "debtnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "debtnet/errors.hpp"
#include "debtnet/rng.hpp"

namespace debtnet {

void ScenarioConfig::validate() const {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must be in (0, 1]");
    if (n_networks < 1) throw ConfigError("n_networks must be >= 1");
    if (n_shock_realizations < 1) throw ConfigError("n_shock_realizations must be >= 1");
    if (!(p_shock > 0.0 && p_shock <= 1.0)) throw ConfigError("p_shock must be in (0, 1]");
    if (!(x_shock >= 0.0 && x_shock <= 1.0)) throw ConfigError("x_shock must be in [0, 1]");
    if (rule.kind == PropagationRule::Kind::nonlinear && rule.alpha < 0.0)
        throw ConfigError("alpha must be >= 0");
    if (tol <= 0.0) throw ConfigError("tol must be positive");
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
}

std::vector<int> sample_shock_set(int n_banks, double p_shock, std::mt19937_64& rng) {
    if (!(p_shock > 0.0 && p_shock <= 1.0)) throw ConfigError("p_shock must be in (0, 1]");
    std::vector<int> banks(static_cast<std::size_t>(n_banks));
    std::iota(banks.begin(), banks.end(), 0);
    if (p_shock == 1.0) return banks;

    const long k = std::lround(p_shock * n_banks);
    if (k <= 0) {
        throw ConfigError("empty shock set: p_shock * N rounds to zero (p_shock=" +
                          std::to_string(p_shock) + ", N=" + std::to_string(n_banks) + ")");
    }
    // Partial Fisher-Yates for a uniform k-subset.
    for (long i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(static_cast<int>(i), n_banks - 1);
        std::swap(banks[static_cast<std::size_t>(i)], banks[static_cast<std::size_t>(pick(rng))]);
    }
    banks.resize(static_cast<std::size_t>(std::min<long>(k, n_banks)));
    std::sort(banks.begin(), banks.end());
    return banks;
}

namespace {

struct RunOutcome {
    std::vector<double> S, D, H;
    double H_inf = 0.0;
    double H_initial = 0.0;
    bool converged = false;
    int steps = 0;
};

SeriesStatistics reduce_series(const std::vector<const std::vector<double>*>& series,
                               std::size_t length) {
    SeriesStatistics stats;
    stats.mean.resize(length, 0.0);
    stats.stderr_.resize(length, 0.0);
    const double n = static_cast<double>(series.size());
    for (std::size_t t = 0; t < length; ++t) {
        double sum = 0.0;
        for (const auto* s : series) sum += t < s->size() ? (*s)[t] : s->back();
        const double mean = sum / n;
        double sq = 0.0;
        for (const auto* s : series) {
            const double v = (t < s->size() ? (*s)[t] : s->back()) - mean;
            sq += v * v;
        }
        stats.mean[t] = mean;
        stats.stderr_[t] = n > 1 ? std::sqrt(sq / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
    return stats;
}

}  // namespace

EnsembleResult run_ensemble(const BankingSystem& system, const ScenarioConfig& cfg) {
    cfg.validate();
    const auto networks = reconstruct_ensemble(system, cfg.p, cfg.n_networks, cfg.base_seed);
    return run_ensemble(system, cfg, networks);
}

EnsembleResult run_ensemble(const BankingSystem& system, const ScenarioConfig& cfg,
                            const std::vector<ReconstructionSample>& networks) {
    cfg.validate();
    if (static_cast<int>(networks.size()) != cfg.n_networks) {
        throw ConfigError("ensemble size mismatch: cfg.n_networks=" +
                          std::to_string(cfg.n_networks) + " but " +
                          std::to_string(networks.size()) + " networks supplied");
    }

    EnsembleResult result;
    std::vector<RunOutcome> outcomes;
    outcomes.reserve(networks.size() * static_cast<std::size_t>(cfg.n_shock_realizations));

    for (int ni = 0; ni < cfg.n_networks; ++ni) {
        LeverageMatrix leverage;
        bool leverage_ok = true;
        try {
            leverage = build_leverage(system, networks[static_cast<std::size_t>(ni)].weights);
        } catch (const std::exception& e) {
            leverage_ok = false;
            for (int ri = 0; ri < cfg.n_shock_realizations; ++ri)
                result.failures.push_back("network " + std::to_string(ni) + ": " + e.what());
        }
        if (!leverage_ok) continue;

        for (int ri = 0; ri < cfg.n_shock_realizations; ++ri) {
            const std::uint64_t seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(ni),
                                                   static_cast<std::uint64_t>(ri));
            try {
                std::mt19937_64 rng = make_rng(seed);
                const auto shocked = sample_shock_set(system.size(), cfg.p_shock, rng);
                const Trajectory traj =
                    run(system, leverage, shocked, cfg.x_shock, cfg.rule, cfg.tol, cfg.t_max);
                RunOutcome outcome;
                outcome.S.reserve(traj.points.size());
                for (const auto& pt : traj.points) {
                    outcome.S.push_back(pt.stressed_fraction);
                    outcome.D.push_back(pt.defaulted_fraction);
                    outcome.H.push_back(pt.equity_loss);
                }
                outcome.H_inf = traj.final().equity_loss;
                outcome.H_initial = traj.initial().equity_loss;
                outcome.converged = traj.converged;
                outcome.steps = traj.steps_to_converge;
                outcomes.push_back(std::move(outcome));
            } catch (const std::exception& e) {
                result.failures.push_back("network " + std::to_string(ni) + " realization " +
                                          std::to_string(ri) + ": " + e.what());
            }
        }
    }

    if (outcomes.empty()) {
        throw RuntimeFailure("ensemble produced no successful run (" +
                             std::to_string(result.failures.size()) + " failures)");
    }

    const double n = static_cast<double>(outcomes.size());
    result.n_runs = static_cast<long>(outcomes.size());
    double sum = 0.0, sum_init = 0.0;
    std::size_t max_len = 0;
    for (const auto& o : outcomes) {
        sum += o.H_inf;
        sum_init += o.H_initial;
        max_len = std::max(max_len, o.H.size());
        if (!o.converged) ++result.n_nonconverged;
        result.steps_per_run.push_back(static_cast<double>(o.steps));
    }
    result.mean_H_inf = sum / n;
    result.mean_H_initial = sum_init / n;
    double sq = 0.0;
    for (const auto& o : outcomes) sq += (o.H_inf - result.mean_H_inf) * (o.H_inf - result.mean_H_inf);
    result.stderr_H_inf = n > 1 ? std::sqrt(sq / (n - 1.0)) / std::sqrt(n) : 0.0;

    std::vector<const std::vector<double>*> S, D, H;
    for (const auto& o : outcomes) {
        S.push_back(&o.S);
        D.push_back(&o.D);
        H.push_back(&o.H);
    }
    result.S_t = reduce_series(S, max_len);
    result.D_t = reduce_series(D, max_len);
    result.H_t = reduce_series(H, max_len);
    return result;
}

SweepResult sweep_H_surface(const BankingSystem& system, const ScenarioConfig& cfg_template,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& x_shock_grid) {
    if (alpha_grid.empty() || x_shock_grid.empty())
        throw ConfigError("sweep grids must be non-empty");
    cfg_template.validate();

    // One shared reconstruction ensemble: cells differ only in (alpha, x_shock).
    const auto networks =
        reconstruct_ensemble(system, cfg_template.p, cfg_template.n_networks,
                             cfg_template.base_seed);

    SweepResult result;
    result.alpha_grid = alpha_grid;
    result.x_shock_grid = x_shock_grid;
    result.p_shock = cfg_template.p_shock;
    result.p = cfg_template.p;
    result.cells.reserve(alpha_grid.size() * x_shock_grid.size());
    for (double alpha : alpha_grid) {
        for (double x : x_shock_grid) {
            ScenarioConfig cfg = cfg_template;
            cfg.rule = PropagationRule::nonlinear(alpha);
            cfg.x_shock = x;
            const EnsembleResult ens = run_ensemble(system, cfg, networks);
            SweepCell cell;
            cell.alpha = alpha;
            cell.x_shock = x;
            cell.mean_H_inf = ens.mean_H_inf;
            cell.stderr_H_inf = ens.stderr_H_inf;
            cell.mean_H_initial = ens.mean_H_initial;
            cell.n_nonconverged = ens.n_nonconverged;
            result.cells.push_back(cell);
        }
    }
    return result;
}

std::pair<double, double> total_shock_normalizer(double p_shock,
                                                 std::pair<double, double> reference_range) {
    if (!(p_shock > 0.0 && p_shock <= 1.0)) throw ConfigError("p_shock must be in (0, 1]");
    return {reference_range.first / p_shock, reference_range.second / p_shock};
}

}  // namespace debtnet
