#pragma once

#include <Eigen/Dense>
#include <vector>

#include "debtnet/balance_sheet.hpp"
#include "debtnet/exposure.hpp"

namespace debtnet {

/// Maps a bank's relative equity loss to its probability of default.
/// linear: p = h. nonlinear(alpha): p = h * exp(alpha * (h - 1)), a soft
/// threshold at 1/alpha. furfine: p = 0 below default, 1 at default.
/// nonlinear(0) coincides with linear; alpha -> infinity recovers furfine.
struct PropagationRule {
    enum class Kind { furfine, linear, nonlinear };

    Kind kind = Kind::linear;
    double alpha = 0.0;  // used only by nonlinear, must be >= 0

    static PropagationRule furfine() { return {Kind::furfine, 0.0}; }
    static PropagationRule linear() { return {Kind::linear, 0.0}; }
    static PropagationRule nonlinear(double alpha) { return {Kind::nonlinear, alpha}; }

    const char* name() const;
};

double default_probability(double h, const PropagationRule& rule);

/// State of the contagion recursion: relative equity losses h in [0,1] and
/// the previous step's default probabilities (the recursion propagates
/// increments of p^D, not levels).
struct ContagionState {
    Eigen::VectorXd h;
    Eigen::VectorXd pd_prev;
    int t = 1;
};

struct TrajectoryPoint {
    int t = 0;
    double stressed_fraction = 0.0;   // banks with 0 < h < 1
    double defaulted_fraction = 0.0;  // banks with h == 1
    double equity_loss = 0.0;         // equity-weighted mean of h
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool converged = false;
    int steps_to_converge = 0;  // t of the last recorded point
    Eigen::VectorXd final_h;

    const TrajectoryPoint& initial() const { return points.front(); }
    const TrajectoryPoint& final() const { return points.back(); }
};

/// Initial condition after a relative devaluation x_shock of the external
/// assets of the shocked banks: h(1) = min(1, x_shock * A^E / E). Banks
/// defaulted at t=0 start at h = 1 whether shocked or not.
ContagionState apply_initial_shock(const BankingSystem& system, const LeverageMatrix& leverage,
                                   const std::vector<int>& shocked, double x_shock);

/// One step of the clamped recursion
///   h_i <- min(1, h_i + sum_j Lambda_ij [p^D_j(t) - p^D_j(t-1)]).
ContagionState step(const ContagionState& state, const LeverageMatrix& leverage,
                    const PropagationRule& rule);

/// Iterates from a given initial state until the sup-norm of successive h
/// differences drops below tol or t_max is reached (then converged=false;
/// the slow intermediate-alpha regime makes that a legitimate outcome).
/// Equities weight the aggregate loss H(t).
Trajectory run(const LeverageMatrix& leverage, const Eigen::VectorXd& equities,
               ContagionState initial, const PropagationRule& rule, double tol = 1e-10,
               int t_max = 10000);

/// Shock-then-run convenience over a banking system.
Trajectory run(const BankingSystem& system, const LeverageMatrix& leverage,
               const std::vector<int>& shocked, double x_shock, const PropagationRule& rule,
               double tol = 1e-10, int t_max = 10000);

}  // namespace debtnet
