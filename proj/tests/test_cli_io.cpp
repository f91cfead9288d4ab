#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "debtnet/cli.hpp"
#include "debtnet/errors.hpp"
#include "debtnet/io.hpp"

using namespace debtnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("debtnet_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("balance-sheet round trip is field-exact") {
    SyntheticParams params;
    params.n_banks = 25;
    params.seed = 42;
    const auto sys = generate_synthetic(params);

    std::stringstream buffer;
    write_balance_sheets(sys, buffer);
    const auto loaded = read_balance_sheets(buffer);
    REQUIRE(loaded.size() == sys.size());
    for (int i = 0; i < sys.size(); ++i) {
        CHECK(loaded.bank(i).bank_id == sys.bank(i).bank_id);
        CHECK(loaded.bank(i).total_assets == sys.bank(i).total_assets);
        CHECK(loaded.bank(i).total_liabilities == sys.bank(i).total_liabilities);
        CHECK(loaded.bank(i).interbank_assets == sys.bank(i).interbank_assets);
        CHECK(loaded.bank(i).interbank_liabilities == sys.bank(i).interbank_liabilities);
    }
}

TEST_CASE("read_balance_sheets diagnostics carry row context") {
    const std::string header =
        "bank_id,total_assets,total_liabilities,interbank_assets,interbank_liabilities\n";
    SUBCASE("bad header") {
        std::stringstream in("id,assets\n");
        CHECK_THROWS_WITH_AS(read_balance_sheets(in), doctest::Contains("header"), DataError);
    }
    SUBCASE("header only") {
        std::stringstream in(header);
        CHECK_THROWS_AS(read_balance_sheets(in), DataError);
    }
    SUBCASE("inconsistent record names the row") {
        std::stringstream in(header + "a,100,80,20,10\nb,100,80,120,10\n");
        CHECK_THROWS_WITH_AS(read_balance_sheets(in), doctest::Contains("row 3"), DataError);
    }
    SUBCASE("unparsable number") {
        std::stringstream in(header + "a,100,80,x,10\nb,1,0,0,0\n");
        CHECK_THROWS_WITH_AS(read_balance_sheets(in), doctest::Contains("interbank_assets"),
                             DataError);
    }
    SUBCASE("duplicate ids") {
        std::stringstream in(header + "a,100,80,20,10\na,100,80,20,10\n");
        CHECK_THROWS_WITH_AS(read_balance_sheets(in), doctest::Contains("duplicate"), DataError);
    }
}

TEST_CASE("generate_synthetic: determinism and degenerate dispersion") {
    SyntheticParams params;
    params.n_banks = 10;
    params.seed = 9;
    const auto a = generate_synthetic(params);
    const auto b = generate_synthetic(params);
    for (int i = 0; i < a.size(); ++i)
        CHECK(a.bank(i).total_assets == b.bank(i).total_assets);

    params.n_banks = 2;
    params.size_dispersion = 0.0;
    const auto degenerate = generate_synthetic(params);
    CHECK(degenerate.bank(0).total_assets ==
          doctest::Approx(degenerate.bank(1).total_assets).epsilon(1e-12));
    CHECK(degenerate.bank(0).interbank_assets ==
          doctest::Approx(degenerate.bank(1).interbank_assets).epsilon(1e-12));
}

TEST_CASE("generate_synthetic: aggregates and ratios") {
    SyntheticParams params;
    params.n_banks = 100;
    params.seed = 31;
    params.equity_ratio = 0.05;
    params.interbank_share = 0.2;
    const auto sys = generate_synthetic(params);
    double lend = 0.0, borrow = 0.0;
    for (const auto& sheet : sys.banks()) {
        lend += sheet.interbank_assets;
        borrow += sheet.interbank_liabilities;
        CHECK(sheet.equity() > 0.0);
        // Interbank leverage a_i/E_i should cluster near share/ratio = 4.
        CHECK(sheet.interbank_assets / sheet.equity() > 1.0);
        CHECK(sheet.interbank_assets / sheet.equity() < 16.0);
    }
    CHECK(borrow == doctest::Approx(lend).epsilon(0.05));
}

TEST_CASE("cli: generate then stability on a handcrafted 2-bank system") {
    const fs::path dir = temp_dir("stab");
    // Lender/borrower totals chosen so the unique p=1 reconstruction gives
    // leverage [[0,1],[4,0]] with spectral radius sqrt(4) = 2.
    {
        std::ofstream out(dir / "banks.csv");
        out << "bank_id,total_assets,total_liabilities,interbank_assets,interbank_liabilities\n"
               "u,10,9,1,4\n"
               "v,10,9,4,1\n";
    }
    const int code = cli::dispatch({"debtnet", "stability", "--input",
                                    (dir / "banks.csv").string(), "--p", "1.0", "--count", "3",
                                    "--seed", "4", "--out", (dir / "out").string(), "--quiet"});
    CHECK(code == cli::kExitOk);
    const std::string table = slurp(dir / "out" / "stability.csv");
    std::istringstream lines(table);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string sample, lambda;
        std::getline(fields, sample, ',');
        std::getline(fields, lambda, ',');
        CHECK(std::abs(std::stod(lambda) - 2.0) < 1e-8);
    }
    CHECK(rows == 3);
}

TEST_CASE("cli: run pipeline with x_shock=0 keeps H at zero") {
    const fs::path dir = temp_dir("run");
    CHECK(cli::dispatch({"debtnet", "generate", "--n", "15", "--seed", "2", "--out",
                         dir.string(), "--quiet"}) == cli::kExitOk);
    CHECK(cli::dispatch({"debtnet", "run", "--input", (dir / "balance_sheets.csv").string(),
                         "--p", "0.3", "--n-networks", "2", "--n-realizations", "2", "--p-shock",
                         "0.25", "--x-shock", "0", "--rule", "linear", "--out",
                         (dir / "out").string(), "--quiet"}) == cli::kExitOk);
    const std::string table = slurp(dir / "out" / "trajectory.csv");
    std::istringstream lines(table);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,S_mean,S_stderr,D_mean,D_stderr,H_mean,H_stderr");
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string field;
        for (int k = 0; k < 6; ++k) std::getline(fields, field, ',');
        CHECK(std::stod(field) < 1e-12);  // H_mean column
    }
    CHECK(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("cli: sweep on a 1x1 grid agrees with run") {
    const fs::path dir = temp_dir("sweep");
    REQUIRE(cli::dispatch({"debtnet", "generate", "--n", "15", "--seed", "2", "--out",
                           dir.string(), "--quiet"}) == cli::kExitOk);
    const std::string input = (dir / "balance_sheets.csv").string();
    REQUIRE(cli::dispatch({"debtnet", "sweep", "--input", input, "--p", "0.3", "--n-networks",
                           "2", "--n-realizations", "2", "--p-shock", "0.25", "--seed", "6",
                           "--alpha-grid", "1.0", "--x-shock-grid", "0.01", "--out",
                           (dir / "sweep_out").string(), "--quiet"}) == cli::kExitOk);
    const std::string sweep_table = slurp(dir / "sweep_out" / "sweep.csv");
    std::istringstream lines(sweep_table);
    std::string header, cell;
    std::getline(lines, header);
    REQUIRE(std::getline(lines, cell));
    std::istringstream fields(cell);
    std::string alpha, x, mean;
    std::getline(fields, alpha, ',');
    std::getline(fields, x, ',');
    std::getline(fields, mean, ',');

    REQUIRE(cli::dispatch({"debtnet", "run", "--input", input, "--p", "0.3", "--n-networks", "2",
                           "--n-realizations", "2", "--p-shock", "0.25", "--x-shock", "0.01",
                           "--rule", "nonlinear", "--alpha", "1.0", "--seed", "6", "--out",
                           (dir / "run_out").string(), "--quiet"}) == cli::kExitOk);
    const std::string summary = slurp(dir / "run_out" / "summary.json");
    // The run summary must quote exactly the sweep cell's mean.
    CHECK(summary.find("\"mean_H_inf\": " + mean) != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish config, data and runtime failures") {
    const fs::path dir = temp_dir("codes");
    // Missing input -> config error.
    CHECK(cli::dispatch({"debtnet", "run", "--out", dir.string(), "--quiet"}) ==
          cli::kExitConfig);
    // Unreadable data file -> data error.
    CHECK(cli::dispatch({"debtnet", "run", "--input", (dir / "missing.csv").string(), "--out",
                         dir.string(), "--quiet"}) == cli::kExitData);
    // Unknown flag -> config error.
    CHECK(cli::dispatch({"debtnet", "run", "--bogus"}) == cli::kExitConfig);
    // Unknown config key -> config error.
    {
        std::ofstream out(dir / "config.json");
        out << "{\"x_shok\": 0.1}\n";
    }
    CHECK(cli::dispatch({"debtnet", "run", "--config", (dir / "config.json").string(),
                         "--quiet"}) == cli::kExitConfig);
}

TEST_CASE("cli: config file supplies values, flags override") {
    const fs::path dir = temp_dir("config");
    REQUIRE(cli::dispatch({"debtnet", "generate", "--n", "15", "--seed", "2", "--out",
                           dir.string(), "--quiet"}) == cli::kExitOk);
    {
        std::ofstream out(dir / "config.json");
        out << "{\"input\": \"" << (dir / "balance_sheets.csv").string()
            << "\", \"p\": 0.3, \"n_networks\": 2, \"n_shock_realizations\": 2,\n"
               " \"p_shock\": 0.25, \"x_shock\": 0.01, \"rule\": \"linear\", \"base_seed\": 5}\n";
    }
    CHECK(cli::dispatch({"debtnet", "run", "--config", (dir / "config.json").string(), "--out",
                         (dir / "a").string(), "--quiet"}) == cli::kExitOk);
    const std::string summary = slurp(dir / "a" / "summary.json");
    CHECK(summary.find("\"rule\": \"linear\"") != std::string::npos);
    CHECK(summary.find("\"x_shock\": 0.01") != std::string::npos);

    CHECK(cli::dispatch({"debtnet", "run", "--config", (dir / "config.json").string(),
                         "--x-shock", "0.02", "--out", (dir / "b").string(), "--quiet"}) ==
          cli::kExitOk);
    CHECK(slurp(dir / "b" / "summary.json").find("\"x_shock\": 0.02") != std::string::npos);
}
