#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "debtnet/balance_sheet.hpp"
#include "debtnet/dynamics.hpp"
#include "debtnet/reconstruction.hpp"

namespace debtnet {

/// One stress-test scenario: reconstruction density, ensemble sizes, shock
/// parameters, propagation rule and seeding.
struct ScenarioConfig {
    double p = 0.05;                 // reconstruction connectivity
    int n_networks = 100;
    int n_shock_realizations = 10;
    double p_shock = 0.05;           // fraction of banks shocked
    double x_shock = 0.005;          // fractional devaluation of external assets
    PropagationRule rule = PropagationRule::nonlinear(1.0);
    std::uint64_t base_seed = 1;
    double tol = 1e-10;
    int t_max = 10000;

    void validate() const;  // throws ConfigError
};

struct SeriesStatistics {
    std::vector<double> mean;
    std::vector<double> stderr_;  // sample sd / sqrt(n_runs)
};

struct EnsembleResult {
    double mean_H_inf = 0.0;
    double stderr_H_inf = 0.0;
    double mean_H_initial = 0.0;  // equity loss right after the shock, averaged
    SeriesStatistics S_t, D_t, H_t;
    long n_runs = 0;
    long n_nonconverged = 0;
    std::vector<double> steps_per_run;  // steps_to_converge, run order
    std::vector<std::string> failures;  // per-run failure diagnostics
};

struct SweepCell {
    double alpha = 0.0;
    double x_shock = 0.0;
    double mean_H_inf = 0.0;
    double stderr_H_inf = 0.0;
    double mean_H_initial = 0.0;
    long n_nonconverged = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // row-major: alpha outer, x_shock inner
    std::vector<double> alpha_grid;
    std::vector<double> x_shock_grid;
    double p_shock = 0.0;
    double p = 0.0;
};

/// Uniformly random subset of exactly round(p_shock * N) distinct banks
/// (all of them when p_shock == 1). Throws ConfigError when the size
/// rounds to zero.
std::vector<int> sample_shock_set(int n_banks, double p_shock, std::mt19937_64& rng);

/// Runs the full ensemble: n_networks reconstructed networks times
/// n_shock_realizations shock sets, with per-run seeds derived from
/// (base_seed, network index, realization index). Failed runs are excluded
/// from the statistics and reported; an ensemble with zero successful runs
/// throws RuntimeFailure. Time series are aligned by padding shorter
/// trajectories with their final values.
EnsembleResult run_ensemble(const BankingSystem& system, const ScenarioConfig& cfg);

/// Same, over a pre-built reconstruction ensemble (shared across sweep cells).
EnsembleResult run_ensemble(const BankingSystem& system, const ScenarioConfig& cfg,
                            const std::vector<ReconstructionSample>& networks);

/// H_infinity surface over (alpha, x_shock). All cells reuse one
/// reconstruction ensemble so that parameter effects are isolated from
/// sampling noise.
SweepResult sweep_H_surface(const BankingSystem& system, const ScenarioConfig& cfg_template,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& x_shock_grid);

/// Rescales an x_shock interval given for p_shock = 1 so that the total
/// shock range p_shock * x_shock is preserved at another p_shock.
std::pair<double, double> total_shock_normalizer(double p_shock,
                                                 std::pair<double, double> reference_range);

}  // namespace debtnet
