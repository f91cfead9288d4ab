#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "debtnet/balance_sheet.hpp"

namespace debtnet {

/// Directed weighted matrix of bilateral interbank loans; entry (i,j) is the
/// loan from lender i to borrower j. The optional recovery matrix is stored
/// for completeness but the implemented dynamics assumes zero recovery.
struct ExposureNetwork {
    Eigen::MatrixXd weights;                    // N x N, non-negative, zero diagonal
    std::optional<Eigen::MatrixXd> recovery;    // entries in [0,1] when present

    int size() const { return static_cast<int>(weights.rows()); }
};

/// Interbank leverage matrix: exposure divided by the lender's initial equity.
/// Rows of banks with non-positive initial equity are zeroed; those banks are
/// defaulted at t=0 and never absorb further losses through the network.
struct LeverageMatrix {
    Eigen::MatrixXd lambda;               // N x N, non-negative, zero diagonal
    std::vector<int> defaulted_at_start;  // banks with equity <= 0

    int size() const { return static_cast<int>(lambda.rows()); }
    bool is_defaulted_at_start(int i) const;
};

/// Builds the leverage matrix from a banking system and an exposure network.
/// Throws DataError on dimension mismatch.
LeverageMatrix build_leverage(const BankingSystem& system, const ExposureNetwork& network);

}  // namespace debtnet
