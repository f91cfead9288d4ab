#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "debtnet/stability.hpp"

using namespace debtnet;

namespace {

// Dense eigendecomposition oracle: largest eigenvalue modulus.
double dense_spectral_radius(const Eigen::MatrixXd& m) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spectral_radius: analytic 2-cycle") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 4, 0;
    const auto result = spectral_radius(m);
    CHECK(result.converged);
    CHECK(result.lambda_max == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("spectral_radius: zero matrix") {
    const auto result = spectral_radius(Eigen::MatrixXd::Zero(4, 4));
    CHECK(result.converged);
    CHECK(result.lambda_max == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectral_radius: nilpotent matrix has spectral radius 0") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 0.5, 0, 0;
    // Convergence on defective matrices is only algebraic; accept a loose
    // estimate and do not require the residual to hit the tolerance.
    const auto result = spectral_radius(m, 1e-10, 200000);
    CHECK(std::abs(result.lambda_max) < 1e-4);
}

TEST_CASE("spectral_radius agrees with the dense oracle on random matrices") {
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(unit(rng) * 18);
        Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return unit(rng); });
        const auto result = spectral_radius(m, 1e-12, 1000000);
        CHECK(result.lambda_max == doctest::Approx(dense_spectral_radius(m)).epsilon(1e-8));
    }
}

TEST_CASE("spectral radius is monotone under element-wise scaling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(8, 8, [&] { return unit(rng); });
    const double base = spectral_radius(m).lambda_max;
    CHECK(spectral_radius(1.5 * m).lambda_max == doctest::Approx(1.5 * base).epsilon(1e-8));
    CHECK(spectral_radius(2.0 * m).lambda_max >= base);
}

TEST_CASE("alpha_critical") {
    CHECK(alpha_critical(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(std::isinf(alpha_critical(0.0)));
    CHECK(alpha_critical(0.0) < 0.0);
}

TEST_CASE("stability_assessment") {
    CHECK(stability_assessment(2.0, 1.0) == Stability::stable);    // 1 > ln 2
    CHECK(stability_assessment(2.0, 0.0) == Stability::unstable);  // linear amplifies
    CHECK(stability_assessment(0.5, 0.0) == Stability::stable);
    CHECK(stability_assessment(0.5, 7.0) == Stability::stable);
    CHECK(stability_assessment(0.0, 0.0) == Stability::stable);
    CHECK(stability_assessment(2.0, std::log(2.0)) == Stability::marginal);
}

TEST_CASE("assess bundles the report") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 4, 0;
    const auto report = assess(m);
    CHECK(report.lambda_max == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report.alpha_critical == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(report.is_stable_at(1.0));
    CHECK(!report.is_stable_at(0.5));
}
