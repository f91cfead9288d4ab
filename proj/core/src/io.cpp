#include "debtnet/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "debtnet/errors.hpp"
#include "debtnet/rng.hpp"

namespace debtnet {

namespace {

const char* kHeader = "bank_id,total_assets,total_liabilities,interbank_assets,interbank_liabilities";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_amount(const std::string& text, int row, const char* field) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw DataError("row " + std::to_string(row) + ": field " + field +
                        " does not parse as a number: '" + text + "'");
    }
    if (value < 0.0) {
        throw DataError("row " + std::to_string(row) + ": field " + field +
                        " must be non-negative, got " + text);
    }
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

BankingSystem read_balance_sheets(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw DataError(origin + ": unexpected header '" + line + "', expected '" + kHeader + "'");
    }
    std::vector<BalanceSheet> banks;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5) {
            throw DataError(origin + ": row " + std::to_string(row) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
        }
        BalanceSheet sheet;
        sheet.bank_id = fields[0];
        if (sheet.bank_id.empty())
            throw DataError(origin + ": row " + std::to_string(row) + ": empty bank_id");
        sheet.total_assets = parse_amount(fields[1], row, "total_assets");
        sheet.total_liabilities = parse_amount(fields[2], row, "total_liabilities");
        sheet.interbank_assets = parse_amount(fields[3], row, "interbank_assets");
        sheet.interbank_liabilities = parse_amount(fields[4], row, "interbank_liabilities");
        try {
            derive_externals(sheet);
        } catch (const DataError& e) {
            throw DataError(origin + ": row " + std::to_string(row) + ": " + e.what());
        }
        banks.push_back(std::move(sheet));
    }
    try {
        return BankingSystem::validated(std::move(banks));
    } catch (const DataError& e) {
        throw DataError(origin + ": " + e.what());
    }
}

BankingSystem load_balance_sheets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open balance-sheet file: " + path.string());
    return read_balance_sheets(in, path.string());
}

void write_balance_sheets(const BankingSystem& system, std::ostream& out) {
    out << kHeader << '\n';
    for (const auto& sheet : system.banks()) {
        out << sheet.bank_id << ',' << format_double(sheet.total_assets) << ','
            << format_double(sheet.total_liabilities) << ','
            << format_double(sheet.interbank_assets) << ','
            << format_double(sheet.interbank_liabilities) << '\n';
    }
}

void save_balance_sheets(const BankingSystem& system, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write file: " + path.string());
    write_balance_sheets(system, out);
}

void SyntheticParams::validate() const {
    if (n_banks < 2) throw ConfigError("synthetic system needs at least 2 banks");
    if (!(size_dispersion >= 0.0)) throw ConfigError("size_dispersion must be >= 0");
    if (!(interbank_share > 0.0 && interbank_share < 1.0))
        throw ConfigError("interbank_share must be in (0, 1)");
    if (!(equity_ratio > 0.0 && equity_ratio < 1.0))
        throw ConfigError("equity_ratio must be in (0, 1)");
}

BankingSystem generate_synthetic(const SyntheticParams& params) {
    params.validate();
    std::mt19937_64 rng = make_rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int n = params.n_banks;
    // Perturbations shrink with the dispersion so that the degenerate limit
    // produces identical banks.
    const double jitter = 0.15 * std::min(1.0, params.size_dispersion);

    std::vector<BalanceSheet> banks;
    banks.reserve(static_cast<std::size_t>(n));
    double sum_ib_assets = 0.0;
    std::vector<double> raw_ib_liabilities(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BalanceSheet sheet;
        sheet.bank_id = "bank_" + std::to_string(i);
        sheet.total_assets = 1000.0 * std::exp(params.size_dispersion * gauss(rng));
        const double share =
            std::clamp(params.interbank_share * std::exp(jitter * gauss(rng)), 0.0, 0.9);
        const double equity =
            std::clamp(params.equity_ratio * std::exp(jitter * gauss(rng)), 1e-3, 0.5) *
            sheet.total_assets;
        sheet.interbank_assets = share * sheet.total_assets;
        sheet.total_liabilities = sheet.total_assets - equity;
        const double borrow_share =
            std::clamp(params.interbank_share * std::exp(jitter * gauss(rng)), 0.0, 0.9);
        raw_ib_liabilities[static_cast<std::size_t>(i)] = borrow_share * sheet.total_assets;
        sum_ib_assets += sheet.interbank_assets;
        banks.push_back(std::move(sheet));
    }

    // Rebalance aggregate borrowing to aggregate lending, capped by each
    // bank's total liabilities.
    double sum_raw = 0.0;
    for (double v : raw_ib_liabilities) sum_raw += v;
    const double scale = sum_raw > 0.0 ? sum_ib_assets / sum_raw : 0.0;
    for (int i = 0; i < n; ++i) {
        auto& sheet = banks[static_cast<std::size_t>(i)];
        sheet.interbank_liabilities =
            std::min(scale * raw_ib_liabilities[static_cast<std::size_t>(i)],
                     0.95 * sheet.total_liabilities);
    }

    return BankingSystem::validated(std::move(banks), "synthetic");
}

void write_trajectory_table(const EnsembleResult& result, std::ostream& out) {
    out << "t,S_mean,S_stderr,D_mean,D_stderr,H_mean,H_stderr\n";
    for (std::size_t k = 0; k < result.H_t.mean.size(); ++k) {
        out << (k + 1) << ',' << format_double(result.S_t.mean[k]) << ','
            << format_double(result.S_t.stderr_[k]) << ',' << format_double(result.D_t.mean[k])
            << ',' << format_double(result.D_t.stderr_[k]) << ','
            << format_double(result.H_t.mean[k]) << ',' << format_double(result.H_t.stderr_[k])
            << '\n';
    }
}

void write_sweep_table(const SweepResult& result, std::ostream& out) {
    out << "alpha,x_shock,mean_H_inf,stderr_H_inf,n_nonconverged\n";
    for (const auto& cell : result.cells) {
        out << format_double(cell.alpha) << ',' << format_double(cell.x_shock) << ','
            << format_double(cell.mean_H_inf) << ',' << format_double(cell.stderr_H_inf) << ','
            << cell.n_nonconverged << '\n';
    }
}

void write_edge_list(const ExposureNetwork& network, std::ostream& out) {
    out << "lender,borrower,weight\n";
    const int n = network.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (network.weights(i, j) > 0.0)
                out << i << ',' << j << ',' << format_double(network.weights(i, j)) << '\n';
}

}  // namespace debtnet
