#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qvol/cli.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qvol");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = qvol::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) { return fs::path(testing::TempDir()) / ("qvol_cli_" + name); }

std::string write_params(const std::string& name, const std::string& body) {
    const auto path = scratch(name);
    std::ofstream(path) << body;
    return path.string();
}

std::string reference_params() {
    return write_params("ref.json",
                        R"({"R0": 5, "R1": 5, "R2": 0.2, "nu": 1, "rho": -0.5, "sigma0": 0.2, "x0": 0})");
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, PriceJson) {
    const auto r = invoke({"price", "--params", reference_params(), "--payoff", "call", "--strike", "1",
                           "--T-months", "1", "--n", "4"});
    ASSERT_EQ(r.code, qvol::cli::kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["pi_by_degree"].size(), 5u);
    EXPECT_EQ(j["mixture_size"], 15);
    EXPECT_TRUE(j["martingale"].get<bool>());
    EXPECT_GT(j["pi_by_degree"][4].get<double>(), 0.0);
}

TEST(Cli, MonthsFlagIsExactTwelfth) {
    const auto a = invoke({"price", "--params", reference_params(), "--T-months", "1", "--n", "3"});
    const auto b = invoke({"price", "--params", reference_params(), "--T", "0.083333333333333329", "--n", "3"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, DumpFiles) {
    const auto gen = scratch("gen.csv");
    const auto mix = scratch("mix.csv");
    const auto r = invoke({"price", "--params", reference_params(), "--T", "0.1", "--n", "2",
                           "--dump-generator", gen.string(), "--dump-mixture", mix.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string g = slurp(gen);
    EXPECT_EQ(g.rfind("alpha,beta,gamma,h_0_0_0,", 0), 0u);
    const std::string m = slurp(mix);
    EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 16);
}

TEST(Cli, ConvergeCsvWithoutMonteCarlo) {
    const auto r = invoke({"converge", "--params", reference_params(), "--T-months", "1,2", "--logK",
                           "-0.1,0,0.1", "--nmax", "3", "--no-mc", "--output", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
              "T,strike,n,price,implied_vol,mc_price,mc_ci_half_width,inside_ci");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 2 * 3 * 3);
}

TEST(Cli, McJsonRecordsRunMetadata) {
    const auto r = invoke({"mc", "--params", reference_params(), "--payoff", "forward", "--T", "0.1",
                           "--paths", "5000", "--seed", "3", "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"value", "std_error", "ci99_half_width", "n_paths"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["n_paths"], 5000);
    const auto out_path = scratch("mc.json");
    const auto again = invoke({"mc", "--params", reference_params(), "--payoff", "forward", "--T", "0.1",
                               "--paths", "5000", "--seed", "3", "--threads", "1", "--output-path", out_path.string()});
    ASSERT_EQ(again.code, 0);
    EXPECT_TRUE(again.out.empty());
    EXPECT_EQ(nlohmann::json::parse(slurp(out_path))["value"], j["value"]);
}

TEST(Cli, Diagnose) {
    const auto r = invoke({"diagnose", "--params", reference_params()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["martingale"].get<bool>());
    EXPECT_EQ(j["steady_state"]["class"], "GIG");
    EXPECT_TRUE(j.contains("critical_moments"));
    EXPECT_TRUE(j.contains("tail_slopes"));
}

TEST(Cli, SteadyStateGridCsv) {
    const auto r = invoke({"steady-state", "--params", reference_params(), "--grid-range", "0.1:0.5:5",
                           "--output", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x,density");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(invoke({}).code, qvol::cli::kExitUsage);
    EXPECT_EQ(invoke({"price"}).code, qvol::cli::kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, qvol::cli::kExitUsage);
    EXPECT_EQ(invoke({"price", "--params", reference_params(), "--payoff", "digital", "--T", "1"}).code,
              qvol::cli::kExitUsage);
    EXPECT_EQ(invoke({"price", "--params", scratch("missing.json").string(), "--T", "1"}).code,
              qvol::cli::kExitUsage);
}

TEST(Cli, InvalidParametersExitTwo) {
    const auto bad = write_params("bad.json",
                                  R"({"R0": 5, "R1": 5, "R2": 0.2, "nu": 0, "rho": -1.5, "sigma0": 0.2, "x0": 0})");
    const auto r = invoke({"diagnose", "--params", bad});
    EXPECT_EQ(r.code, qvol::cli::kExitInvalidParams);
    EXPECT_NE(r.err.find("nu"), std::string::npos);
    EXPECT_NE(r.err.find("rho"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(invoke({"--help"}).code, qvol::cli::kExitOk);
}
