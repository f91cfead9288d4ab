#pragma once

#include <Eigen/Dense>

namespace debtnet {

struct SpectralResult {
    double lambda_max = 0.0;
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Largest eigenvalue of a non-negative matrix via power iteration on the
/// shifted matrix Lambda + I, started from the all-ones vector. The shift
/// breaks modulus ties (e.g. the +-sqrt(ab) pair of a 2-cycle) toward the
/// Perron root. Non-convergence is reported through the residual, never
/// thrown.
SpectralResult spectral_radius(const Eigen::MatrixXd& matrix, double tol = 1e-10,
                               long max_iter = 100000);

/// ln(lambda_max); -infinity when lambda_max == 0 (always stable).
double alpha_critical(double lambda_max);

enum class Stability { stable, marginal, unstable };

/// The linearized dynamics near h = 0 has propagator Lambda * e^(-alpha),
/// so the system is stable iff alpha > ln(lambda_max). Marginal within
/// +-1e-9 of equality.
Stability stability_assessment(double lambda_max, double alpha);

const char* to_string(Stability s);

struct StabilityReport {
    double lambda_max = 0.0;
    double alpha_critical = 0.0;  // -inf when lambda_max == 0
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;

    bool is_stable_at(double alpha) const;
};

StabilityReport assess(const Eigen::MatrixXd& leverage, double tol = 1e-10,
                       long max_iter = 100000);

}  // namespace debtnet
