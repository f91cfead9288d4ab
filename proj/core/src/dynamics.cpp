#include "debtnet/dynamics.hpp"

#include <cmath>

#include "debtnet/errors.hpp"

namespace debtnet {

const char* PropagationRule::name() const {
    switch (kind) {
        case Kind::furfine: return "furfine";
        case Kind::linear: return "linear";
        case Kind::nonlinear: return "nonlinear";
    }
    return "?";
}

double default_probability(double h, const PropagationRule& rule) {
    switch (rule.kind) {
        case PropagationRule::Kind::furfine:
            return h < 1.0 ? 0.0 : 1.0;
        case PropagationRule::Kind::linear:
            return h;
        case PropagationRule::Kind::nonlinear:
            return h * std::exp(rule.alpha * (h - 1.0));
    }
    return 0.0;
}

namespace {

Eigen::VectorXd default_probabilities(const Eigen::VectorXd& h, const PropagationRule& rule) {
    Eigen::VectorXd pd(h.size());
    for (Eigen::Index j = 0; j < h.size(); ++j) pd[j] = default_probability(h[j], rule);
    return pd;
}

TrajectoryPoint observe(int t, const Eigen::VectorXd& h, const Eigen::VectorXd& equities,
                        double total_equity) {
    const int n = static_cast<int>(h.size());
    int stressed = 0;
    int defaulted = 0;
    double weighted_loss = 0.0;
    for (int i = 0; i < n; ++i) {
        if (h[i] == 1.0)
            ++defaulted;
        else if (h[i] > 0.0)
            ++stressed;
        weighted_loss += equities[i] * h[i];
    }
    TrajectoryPoint pt;
    pt.t = t;
    pt.stressed_fraction = static_cast<double>(stressed) / n;
    pt.defaulted_fraction = static_cast<double>(defaulted) / n;
    pt.equity_loss = total_equity != 0.0 ? weighted_loss / total_equity : 0.0;
    return pt;
}

}  // namespace

ContagionState apply_initial_shock(const BankingSystem& system, const LeverageMatrix& leverage,
                                   const std::vector<int>& shocked, double x_shock) {
    const int n = system.size();
    ContagionState state;
    state.h = Eigen::VectorXd::Zero(n);
    state.pd_prev = Eigen::VectorXd::Zero(n);  // h(0) = 0 implies p^D(0) = 0
    state.t = 1;
    for (int i : shocked) {
        if (i < 0 || i >= n) throw DataError("shocked bank index out of range: " + std::to_string(i));
        const double equity = system.bank(i).equity();
        if (equity <= 0.0) continue;  // handled below as defaulted-at-start
        state.h[i] = std::min(1.0, x_shock * system.bank(i).external_assets() / equity);
    }
    for (int i : leverage.defaulted_at_start) state.h[i] = 1.0;
    return state;
}

ContagionState step(const ContagionState& state, const LeverageMatrix& leverage,
                    const PropagationRule& rule) {
    ContagionState next;
    const Eigen::VectorXd pd_now = default_probabilities(state.h, rule);
    next.h = (state.h + leverage.lambda * (pd_now - state.pd_prev))
                 .cwiseMin(1.0);
    next.pd_prev = pd_now;
    next.t = state.t + 1;
    return next;
}

Trajectory run(const LeverageMatrix& leverage, const Eigen::VectorXd& equities,
               ContagionState state, const PropagationRule& rule, double tol, int t_max) {
    if (tol <= 0.0) throw ConfigError("convergence tolerance must be positive");
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    const double total_equity = equities.sum();

    Trajectory traj;
    traj.points.push_back(observe(state.t, state.h, equities, total_equity));
    while (state.t < t_max) {
        ContagionState next = step(state, leverage, rule);
        const double diff = (next.h - state.h).cwiseAbs().maxCoeff();
        state = std::move(next);
        traj.points.push_back(observe(state.t, state.h, equities, total_equity));
        if (diff < tol) {
            traj.converged = true;
            break;
        }
    }
    traj.steps_to_converge = state.t;
    traj.final_h = std::move(state.h);
    return traj;
}

Trajectory run(const BankingSystem& system, const LeverageMatrix& leverage,
               const std::vector<int>& shocked, double x_shock, const PropagationRule& rule,
               double tol, int t_max) {
    return run(leverage, system.equities(), apply_initial_shock(system, leverage, shocked, x_shock),
               rule, tol, t_max);
}

}  // namespace debtnet
