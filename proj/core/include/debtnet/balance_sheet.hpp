#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace debtnet {

/// One bank's aggregate balance sheet. Interbank positions are the totals
/// lent to / borrowed from other banks in the system; everything else is
/// "external". Equity is total assets minus total liabilities and may be
/// negative (the bank is then treated as defaulted at t=0).
struct BalanceSheet {
    std::string bank_id;
    double total_assets = 0.0;
    double total_liabilities = 0.0;
    double interbank_assets = 0.0;
    double interbank_liabilities = 0.0;

    double external_assets() const { return total_assets - interbank_assets; }
    double external_liabilities() const { return total_liabilities - interbank_liabilities; }
    double equity() const { return total_assets - total_liabilities; }
};

struct Externals {
    double external_assets = 0.0;
    double external_liabilities = 0.0;
    double equity = 0.0;
};

/// Checks the per-field invariants and returns the derived quantities.
/// Throws DataError with a per-field diagnostic on inconsistent records
/// (negative amounts, interbank totals exceeding the balance-sheet totals).
Externals derive_externals(const BalanceSheet& sheet);

/// An ordered collection of banks, validated on construction.
class BankingSystem {
public:
    /// Validates every sheet (derive_externals), uniqueness of ids and N >= 2.
    static BankingSystem validated(std::vector<BalanceSheet> banks, std::string year_label = "");

    int size() const { return static_cast<int>(banks_.size()); }
    const std::vector<BalanceSheet>& banks() const { return banks_; }
    const BalanceSheet& bank(int i) const { return banks_[static_cast<std::size_t>(i)]; }
    const std::string& year_label() const { return year_label_; }

    Eigen::VectorXd equities() const;
    Eigen::VectorXd external_assets() const;
    Eigen::VectorXd interbank_asset_totals() const;
    Eigen::VectorXd interbank_liability_totals() const;

private:
    BankingSystem(std::vector<BalanceSheet> banks, std::string year_label)
        : banks_(std::move(banks)), year_label_(std::move(year_label)) {}

    std::vector<BalanceSheet> banks_;
    std::string year_label_;
};

}  // namespace debtnet
