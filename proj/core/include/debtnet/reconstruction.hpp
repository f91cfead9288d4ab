#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "debtnet/balance_sheet.hpp"
#include "debtnet/exposure.hpp"

namespace debtnet {

/// Calibrated fitness-model coupling. The probability of an edge i -> j is
///   p_ij(z) = z a_i l_j / (1 + z a_i l_j)
/// with a_i the lender's total interbank assets and l_j the borrower's total
/// interbank liabilities. z is infinite when the target density saturates the
/// positive-fitness pairs exactly (then p_ij = 1 on those pairs).
struct DensityCalibration {
    double z = 0.0;
    double target_connectivity = 0.0;
    double achieved_expected_edges = 0.0;
    Eigen::VectorXd lender_fitness;    // a_i
    Eigen::VectorXd borrower_fitness;  // l_j

    int size() const { return static_cast<int>(lender_fitness.size()); }
    double edge_probability(int i, int j) const;
};

using AdjacencyMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct ReconstructionSample {
    AdjacencyMatrix adjacency;
    ExposureNetwork weights;
    std::uint64_t seed = 0;
    double ras_residual = 0.0;
    bool ras_converged = false;
};

/// Solves for z such that the expected number of edges matches
/// p * N * (N-1) to relative tolerance 1e-10, by bisection on the strictly
/// increasing expected-count function (bracket grown geometrically from
/// z = 1). Throws DataError when the target exceeds the number of pairs
/// with positive fitness product, naming the maximum achievable density.
DensityCalibration calibrate_density(const BankingSystem& system, double p);

/// Draws each off-diagonal edge independently with probability p_ij(z).
AdjacencyMatrix sample_topology(const DensityCalibration& calib, std::mt19937_64& rng);

/// RAS / iterative proportional fitting on the given support, seeded with
/// the gravity weights a_i * l_j on present edges. Column targets are first
/// rescaled globally so that total borrowing matches total lending. Stops
/// when the max relative margin error falls below tol or after max_iter
/// sweeps; non-convergence is flagged on the result, not thrown. Throws
/// DataError for structural infeasibility (a positive target with no
/// incident edge), naming the offending bank.
struct BalanceResult {
    ExposureNetwork network;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

BalanceResult balance_weights(const AdjacencyMatrix& adjacency, const Eigen::VectorXd& row_targets,
                              const Eigen::VectorXd& col_targets, double tol = 1e-8,
                              int max_iter = 10000);

/// count independent (topology, weights) samples; sample k is seeded with a
/// deterministic function of (base_seed, k). z is calibrated once and shared.
std::vector<ReconstructionSample> reconstruct_ensemble(const BankingSystem& system, double p,
                                                       int count, std::uint64_t base_seed);

}  // namespace debtnet
