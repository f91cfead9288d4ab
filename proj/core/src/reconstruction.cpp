#include "debtnet/reconstruction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "debtnet/errors.hpp"
#include "debtnet/rng.hpp"

namespace debtnet {

namespace {

constexpr double kCalibrationTol = 1e-10;  // relative, on the expected edge count

double expected_edges(double z, const Eigen::VectorXd& a, const Eigen::VectorXd& l) {
    const int n = static_cast<int>(a.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (a[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (j == i || l[j] == 0.0) continue;
            const double x = z * a[i] * l[j];
            total += x / (1.0 + x);
        }
    }
    return total;
}

long positive_fitness_pairs(const Eigen::VectorXd& a, const Eigen::VectorXd& l) {
    const int n = static_cast<int>(a.size());
    long count = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && a[i] > 0.0 && l[j] > 0.0) ++count;
    return count;
}

}  // namespace

double DensityCalibration::edge_probability(int i, int j) const {
    if (i == j) return 0.0;
    const double product = lender_fitness[i] * borrower_fitness[j];
    if (std::isinf(z)) return product > 0.0 ? 1.0 : 0.0;
    const double x = z * product;
    return x / (1.0 + x);
}

DensityCalibration calibrate_density(const BankingSystem& system, double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw ConfigError("connectivity p must be in (0, 1], got " + std::to_string(p));
    }
    const int n = system.size();
    const Eigen::VectorXd a = system.interbank_asset_totals();
    const Eigen::VectorXd l = system.interbank_liability_totals();

    const long positive_pairs = positive_fitness_pairs(a, l);
    const double possible = static_cast<double>(n) * (n - 1);
    const double target = p * possible;
    if (positive_pairs == 0) {
        throw DataError("density calibration infeasible: no bank pair has positive "
                        "lender and borrower interbank totals");
    }
    if (target > static_cast<double>(positive_pairs) * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "density calibration infeasible: target " << target << " edges exceeds the "
            << positive_pairs << " positive-fitness pairs (maximum achievable connectivity "
            << static_cast<double>(positive_pairs) / possible << ")";
        throw DataError(msg.str());
    }

    DensityCalibration calib;
    calib.target_connectivity = p;
    calib.lender_fitness = a;
    calib.borrower_fitness = l;

    // Target equal to the supremum: every positive-fitness edge is certain.
    if (target >= static_cast<double>(positive_pairs) * (1.0 - 1e-12)) {
        calib.z = std::numeric_limits<double>::infinity();
        calib.achieved_expected_edges = static_cast<double>(positive_pairs);
        return calib;
    }

    // Bracket the strictly increasing expected-count function around z = 1.
    double lo = 1.0, hi = 1.0;
    if (expected_edges(1.0, a, l) < target) {
        while (expected_edges(hi, a, l) < target) hi *= 2.0;
        lo = hi / 2.0;
    } else {
        while (expected_edges(lo, a, l) > target) lo /= 2.0;
        hi = lo * 2.0;
    }
    double z = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        z = 0.5 * (lo + hi);
        const double value = expected_edges(z, a, l);
        if (std::abs(value - target) <= kCalibrationTol * target) break;
        (value < target ? lo : hi) = z;
    }
    calib.z = z;
    calib.achieved_expected_edges = expected_edges(z, a, l);
    return calib;
}

AdjacencyMatrix sample_topology(const DensityCalibration& calib, std::mt19937_64& rng) {
    const int n = calib.size();
    AdjacencyMatrix adjacency(n, n);
    adjacency.setConstant(false);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            adjacency(i, j) = unit(rng) < calib.edge_probability(i, j);
        }
    }
    return adjacency;
}

BalanceResult balance_weights(const AdjacencyMatrix& adjacency, const Eigen::VectorXd& row_targets,
                              const Eigen::VectorXd& col_targets, double tol, int max_iter) {
    const int n = static_cast<int>(adjacency.rows());
    if (adjacency.cols() != n || row_targets.size() != n || col_targets.size() != n) {
        throw DataError("balance_weights: dimension mismatch");
    }
    if (row_targets.minCoeff() < 0.0 || col_targets.minCoeff() < 0.0) {
        throw DataError("balance_weights: margin targets must be non-negative");
    }

    const double row_total = row_targets.sum();
    const double col_total = col_targets.sum();
    BalanceResult result;
    if (row_total == 0.0 && col_total == 0.0) {
        result.network.weights = Eigen::MatrixXd::Zero(n, n);
        result.converged = true;
        return result;
    }
    if (col_total == 0.0) {
        throw DataError("balance_weights: positive lending but zero aggregate borrowing");
    }
    // Aggregate lending must equal aggregate borrowing within a sample.
    const Eigen::VectorXd cols = col_targets * (row_total / col_total);

    for (int i = 0; i < n; ++i) {
        if (row_targets[i] > 0.0 && !adjacency.row(i).any()) {
            throw DataError("balance_weights: bank " + std::to_string(i) +
                            " has a positive lending target but no outgoing edge");
        }
        if (cols[i] > 0.0 && !adjacency.col(i).any()) {
            throw DataError("balance_weights: bank " + std::to_string(i) +
                            " has a positive borrowing target but no incoming edge");
        }
    }

    // Gravity seed on the support.
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && adjacency(i, j)) w(i, j) = row_targets[i] * cols[j];

    const double eps = 1e-12 * std::max(1.0, std::max(row_targets.maxCoeff(), cols.maxCoeff()));
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double sum = w.row(i).sum();
            if (sum > 0.0)
                w.row(i) *= row_targets[i] / sum;
            else if (row_targets[i] > 0.0)
                throw DataError("balance_weights: bank " + std::to_string(i) +
                                " cannot reach its lending target (support collapsed)");
        }
        for (int j = 0; j < n; ++j) {
            const double sum = w.col(j).sum();
            if (sum > 0.0)
                w.col(j) *= cols[j] / sum;
            else if (cols[j] > 0.0)
                throw DataError("balance_weights: bank " + std::to_string(j) +
                                " cannot reach its borrowing target (support collapsed)");
        }
        // Columns are exact after the column sweep; only rows can be off.
        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            const double err =
                std::abs(w.row(i).sum() - row_targets[i]) / std::max(row_targets[i], eps);
            residual = std::max(residual, err);
        }
        if (residual < tol) {
            result.converged = true;
            ++iter;
            break;
        }
    }
    result.network.weights = std::move(w);
    result.residual = residual;
    result.iterations = iter;
    return result;
}

namespace {

// A sparse draw can leave a bank whose incident columns (rows) cannot absorb
// its margin target -- no edge at all, or too little counterparty capacity --
// which makes the RAS margins structurally infeasible. Repair such banks by
// adding their most probable absent edges until the neighbour capacity covers
// the target. Deterministic, and at realistic densities it touches only a
// handful of entries.
void ensure_support(AdjacencyMatrix& adjacency, const DensityCalibration& calib,
                    const Eigen::VectorXd& row_targets, const Eigen::VectorXd& col_targets) {
    const int n = static_cast<int>(adjacency.rows());
    const double col_total = col_targets.sum();
    if (col_total == 0.0) return;
    // Column targets as RAS will see them, rescaled to the aggregate row total.
    const Eigen::VectorXd cols = col_targets * (row_targets.sum() / col_total);

    for (int i = 0; i < n; ++i) {
        if (row_targets[i] <= 0.0) continue;
        double capacity = 0.0;
        for (int j = 0; j < n; ++j)
            if (adjacency(i, j)) capacity += cols[j];
        while (capacity < row_targets[i]) {
            int best = -1;
            double best_p = -1.0;
            for (int j = 0; j < n; ++j) {
                if (j == i || adjacency(i, j) || cols[j] <= 0.0) continue;
                const double pij = calib.edge_probability(i, j);
                if (pij > best_p) {
                    best_p = pij;
                    best = j;
                }
            }
            if (best < 0) break;
            adjacency(i, best) = true;
            capacity += cols[best];
        }
    }
    for (int j = 0; j < n; ++j) {
        if (cols[j] <= 0.0) continue;
        double capacity = 0.0;
        for (int i = 0; i < n; ++i)
            if (adjacency(i, j)) capacity += row_targets[i];
        while (capacity < cols[j]) {
            int best = -1;
            double best_p = -1.0;
            for (int i = 0; i < n; ++i) {
                if (i == j || adjacency(i, j) || row_targets[i] <= 0.0) continue;
                const double pij = calib.edge_probability(i, j);
                if (pij > best_p) {
                    best_p = pij;
                    best = i;
                }
            }
            if (best < 0) break;
            adjacency(best, j) = true;
            capacity += row_targets[best];
        }
    }
}

// Per-bank capacity checks cannot rule out joint infeasibility (e.g. two
// lenders whose only shared borrower cannot absorb both targets). When RAS
// stalls, widen the support of the still-deficient rows by their most
// probable absent edge and rebalance. Terminates: each round adds at least
// one edge, and RAS converges on the complete support.
bool widen_deficient_rows(AdjacencyMatrix& adjacency, const DensityCalibration& calib,
                          const Eigen::VectorXd& row_targets, const Eigen::MatrixXd& weights,
                          double tol) {
    const int n = static_cast<int>(adjacency.rows());
    bool added = false;
    for (int i = 0; i < n; ++i) {
        if (row_targets[i] <= 0.0) continue;
        if (std::abs(weights.row(i).sum() - row_targets[i]) < tol * row_targets[i]) continue;
        int best = -1;
        double best_p = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i || adjacency(i, j)) continue;
            const double pij = calib.edge_probability(i, j);
            if (pij > best_p) {
                best_p = pij;
                best = j;
            }
        }
        if (best >= 0) {
            adjacency(i, best) = true;
            added = true;
        }
    }
    return added;
}

}  // namespace

std::vector<ReconstructionSample> reconstruct_ensemble(const BankingSystem& system, double p,
                                                       int count, std::uint64_t base_seed) {
    if (count < 1) throw ConfigError("ensemble count must be >= 1");
    const DensityCalibration calib = calibrate_density(system, p);
    const Eigen::VectorXd row_targets = system.interbank_asset_totals();
    const Eigen::VectorXd col_targets = system.interbank_liability_totals();

    std::vector<ReconstructionSample> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(k));
        try {
            std::mt19937_64 rng = make_rng(seed);
            ReconstructionSample sample;
            sample.seed = seed;
            sample.adjacency = sample_topology(calib, rng);
            ensure_support(sample.adjacency, calib, row_targets, col_targets);
            BalanceResult balanced = balance_weights(sample.adjacency, row_targets, col_targets);
            while (!balanced.converged &&
                   widen_deficient_rows(sample.adjacency, calib, row_targets,
                                        balanced.network.weights, 1e-8)) {
                balanced = balance_weights(sample.adjacency, row_targets, col_targets);
            }
            sample.weights = std::move(balanced.network);
            sample.ras_residual = balanced.residual;
            sample.ras_converged = balanced.converged;
            samples.push_back(std::move(sample));
        } catch (const DataError& e) {
            throw DataError("reconstruction sample " + std::to_string(k) + ": " + e.what());
        }
    }
    return samples;
}

}  // namespace debtnet
