#include "debtnet/stability.hpp"

#include <cmath>
#include <limits>

#include "debtnet/errors.hpp"

namespace debtnet {

SpectralResult spectral_radius(const Eigen::MatrixXd& matrix, double tol, long max_iter) {
    if (tol <= 0.0) throw ConfigError("spectral tolerance must be positive");
    const Eigen::Index n = matrix.rows();
    if (n == 0 || matrix.cols() != n) throw DataError("spectral_radius needs a square matrix");

    constexpr double shift = 1.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    v /= v.norm();

    SpectralResult result;
    for (long iter = 1; iter <= max_iter; ++iter) {
        Eigen::VectorXd w = matrix * v + shift * v;
        const double rayleigh = v.dot(w);  // v is unit norm
        const double residual =
            (w - rayleigh * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
        result.lambda_max = rayleigh - shift;
        result.iterations = iter;
        result.residual = residual;
        if (residual < tol) {
            result.converged = true;
            break;
        }
        const double norm = w.norm();
        if (norm == 0.0) {  // matrix maps v to -shift*v only if matrix = 0 and shift = 0
            result.lambda_max = 0.0;
            result.converged = true;
            break;
        }
        v = w / norm;
    }
    // The Rayleigh estimate can dip below zero by rounding on nilpotent input.
    if (result.lambda_max < 0.0 && result.lambda_max > -tol) result.lambda_max = 0.0;
    return result;
}

double alpha_critical(double lambda_max) {
    if (lambda_max <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(lambda_max);
}

Stability stability_assessment(double lambda_max, double alpha) {
    const double critical = alpha_critical(lambda_max);
    constexpr double margin = 1e-9;
    if (alpha > critical + margin) return Stability::stable;
    if (alpha < critical - margin) return Stability::unstable;
    return Stability::marginal;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::marginal: return "marginal";
        case Stability::unstable: return "unstable";
    }
    return "?";
}

bool StabilityReport::is_stable_at(double alpha) const {
    return stability_assessment(lambda_max, alpha) == Stability::stable;
}

StabilityReport assess(const Eigen::MatrixXd& leverage, double tol, long max_iter) {
    const SpectralResult sr = spectral_radius(leverage, tol, max_iter);
    StabilityReport report;
    report.lambda_max = sr.lambda_max;
    report.alpha_critical = alpha_critical(sr.lambda_max);
    report.iterations = sr.iterations;
    report.residual = sr.residual;
    report.converged = sr.converged;
    return report;
}

}  // namespace debtnet
