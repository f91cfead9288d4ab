#include "debtnet/exposure.hpp"

#include <algorithm>

#include "debtnet/errors.hpp"

namespace debtnet {

bool LeverageMatrix::is_defaulted_at_start(int i) const {
    return std::binary_search(defaulted_at_start.begin(), defaulted_at_start.end(), i);
}

LeverageMatrix build_leverage(const BankingSystem& system, const ExposureNetwork& network) {
    const int n = system.size();
    if (network.size() != n || network.weights.cols() != n) {
        throw DataError("exposure network dimension " + std::to_string(network.size()) +
                        " does not match system size " + std::to_string(n));
    }
    LeverageMatrix result;
    result.lambda = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double equity = system.bank(i).equity();
        if (equity <= 0.0) {
            result.defaulted_at_start.push_back(i);
            continue;  // row stays zero, the bank is already gone
        }
        result.lambda.row(i) = network.weights.row(i) / equity;
        result.lambda(i, i) = 0.0;
    }
    return result;
}

}  // namespace debtnet
