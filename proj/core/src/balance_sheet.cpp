#include "debtnet/balance_sheet.hpp"

#include <cmath>
#include <unordered_set>

#include "debtnet/errors.hpp"

namespace debtnet {

namespace {

void check_field(const BalanceSheet& sheet, const char* field, double value) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DataError("bank '" + sheet.bank_id + "': field " + field +
                        " must be a non-negative finite number, got " + std::to_string(value));
    }
}

}  // namespace

Externals derive_externals(const BalanceSheet& sheet) {
    check_field(sheet, "total_assets", sheet.total_assets);
    check_field(sheet, "total_liabilities", sheet.total_liabilities);
    check_field(sheet, "interbank_assets", sheet.interbank_assets);
    check_field(sheet, "interbank_liabilities", sheet.interbank_liabilities);
    if (sheet.interbank_assets > sheet.total_assets) {
        throw DataError("bank '" + sheet.bank_id + "': interbank_assets (" +
                        std::to_string(sheet.interbank_assets) + ") exceeds total_assets (" +
                        std::to_string(sheet.total_assets) + "), inconsistent record");
    }
    if (sheet.interbank_liabilities > sheet.total_liabilities) {
        throw DataError("bank '" + sheet.bank_id + "': interbank_liabilities (" +
                        std::to_string(sheet.interbank_liabilities) +
                        ") exceeds total_liabilities (" + std::to_string(sheet.total_liabilities) +
                        "), inconsistent record");
    }
    return {sheet.external_assets(), sheet.external_liabilities(), sheet.equity()};
}

BankingSystem BankingSystem::validated(std::vector<BalanceSheet> banks, std::string year_label) {
    if (banks.size() < 2) {
        throw DataError("a banking system needs at least 2 banks, got " +
                        std::to_string(banks.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& sheet : banks) {
        derive_externals(sheet);
        if (!seen.insert(sheet.bank_id).second) {
            throw DataError("duplicate bank_id '" + sheet.bank_id + "'");
        }
    }
    return BankingSystem(std::move(banks), std::move(year_label));
}

Eigen::VectorXd BankingSystem::equities() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = banks_[static_cast<std::size_t>(i)].equity();
    return v;
}

Eigen::VectorXd BankingSystem::external_assets() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = banks_[static_cast<std::size_t>(i)].external_assets();
    return v;
}

Eigen::VectorXd BankingSystem::interbank_asset_totals() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = banks_[static_cast<std::size_t>(i)].interbank_assets;
    return v;
}

Eigen::VectorXd BankingSystem::interbank_liability_totals() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i)
        v[i] = banks_[static_cast<std::size_t>(i)].interbank_liabilities;
    return v;
}

}  // namespace debtnet
