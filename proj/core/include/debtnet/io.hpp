#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "debtnet/balance_sheet.hpp"
#include "debtnet/experiment.hpp"
#include "debtnet/reconstruction.hpp"

namespace debtnet {

/// CSV schema: header "bank_id,total_assets,total_liabilities,
/// interbank_assets,interbank_liabilities", one row per bank, decimal point
/// notation. Values are written with enough digits to round-trip exactly.
BankingSystem load_balance_sheets(const std::filesystem::path& path);
BankingSystem read_balance_sheets(std::istream& in, const std::string& origin = "<stream>");
void save_balance_sheets(const BankingSystem& system, const std::filesystem::path& path);
void write_balance_sheets(const BankingSystem& system, std::ostream& out);

/// Synthetic stand-in for a real large-bank panel: heavy-tailed total assets
/// (lognormal), interbank and equity shares perturbed around their targets,
/// aggregate interbank lending and borrowing rebalanced to match.
struct SyntheticParams {
    int n_banks = 183;
    std::uint64_t seed = 1;
    double size_dispersion = 1.5;   // sigma of log total assets
    double interbank_share = 0.2;   // interbank assets / total assets
    double equity_ratio = 0.05;     // equity / total assets

    void validate() const;  // throws ConfigError
};

BankingSystem generate_synthetic(const SyntheticParams& params);

// Plot-ready tables, all comma-separated with a header row.
void write_trajectory_table(const EnsembleResult& result, std::ostream& out);
void write_sweep_table(const SweepResult& result, std::ostream& out);
void write_edge_list(const ExposureNetwork& network, std::ostream& out);  // i,j,weight triplets

std::string format_double(double v);  // shortest exact round-trip representation

}  // namespace debtnet
