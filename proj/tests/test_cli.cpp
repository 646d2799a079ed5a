#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "fraczeta/analytic.hpp"
#include "fraczeta/io.hpp"

namespace {

#ifndef FRACZETA_CLI_PATH
#error "FRACZETA_CLI_PATH must be defined"
#endif

struct CliResult {
    int exitCode = -1;
    std::string out;
};

std::string tempPath(const std::string& name) {
    return std::string(::testing::TempDir()) + "/" + name;
}

CliResult runCli(const std::string& args) {
    const std::string outPath = tempPath("cli_stdout.txt");
    const std::string cmd =
        std::string(FRACZETA_CLI_PATH) + " " + args + " > " + outPath + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exitCode = WEXITSTATUS(status);
    std::ifstream in(outPath);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

TEST(Cli, MoranFourQuarters) {
    const auto r = runCli("moran --ratios 0.25,0.25,0.25,0.25");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto j = fraczeta::io::parseJson(r.out);
    EXPECT_NEAR(j["sigma"].get<double>(), 1.0, 1e-12);
    EXPECT_LE(std::abs(j["residual"].get<double>()), 1e-12);
    EXPECT_TRUE(j["lattice"].get<bool>());
    EXPECT_EQ(j["exponents"].size(), 4u);
    for (const auto& e : j["exponents"]) EXPECT_EQ(e.get<int>(), 1);
}

TEST(Cli, MoranCantor) {
    const auto r = runCli("moran --ratios 0.333333333333333333,0.333333333333333333");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto j = fraczeta::io::parseJson(r.out);
    EXPECT_NEAR(j["sigma"].get<double>(), fraczeta::analytic::kCantorDim, 1e-9);
}

TEST(Cli, StringAnalyticCantorIsExactGolden) {
    const auto r = runCli("string --analytic cantor");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const std::string expected =
        fraczeta::io::toJson(fraczeta::analytic::cantorBoxCountingString()).dump(2) + "\n";
    EXPECT_EQ(r.out, expected);
}

TEST(Cli, PolesCantorBox) {
    const auto r = runCli("poles --form cantor-box --tmax 20");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto poles = fraczeta::io::polesFromJson(fraczeta::io::parseJson(r.out));
    ASSERT_EQ(poles.size(), 7u);
    for (const auto& p : poles) {
        EXPECT_NEAR(p.location.real(), fraczeta::analytic::kCantorDim, 1e-12);
        EXPECT_NEAR(p.residue.real(), 1.0 / std::log(3.0), 1e-12);
        EXPECT_NEAR(p.residue.imag(), 0.0, 1e-12);
    }
}

TEST(Cli, DeterministicReruns) {
    const auto a1 = runCli("zeta --form cantor-box --s-rect 0.8,2.0,-5,5,4,5 --format csv");
    const auto a2 = runCli("zeta --form cantor-box --s-rect 0.8,2.0,-5,5,4,5 --format csv");
    ASSERT_EQ(a1.exitCode, 0) << a1.out;
    EXPECT_EQ(a1.out, a2.out);
    EXPECT_EQ(a1.out.substr(0, a1.out.find('\n')), "re,im,zeta_re,zeta_im,err");

    const auto b1 = runCli("poles --form setf-tess --tmax 30");
    const auto b2 = runCli("poles --form setf-tess --tmax 30");
    ASSERT_EQ(b1.exitCode, 0) << b1.out;
    EXPECT_EQ(b1.out, b2.out);
}

TEST(Cli, VerifyCantorPasses) {
    const auto r = runCli("verify --analytic cantor");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto j = fraczeta::io::parseJson(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_LE(j["max_discrepancy"].get<double>(), 0.05);
}

TEST(Cli, DimAString) {
    const auto r = runCli("dim --analytic astring");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto j = fraczeta::io::parseJson(r.out);
    for (const auto& [name, value] : j["legs"].items())
        EXPECT_NEAR(value.get<double>(), 0.5, 0.05) << name;
}

TEST(Cli, TubeFromCsvInput) {
    const std::string cloudPath = tempPath("pair.csv");
    {
        std::ofstream os(cloudPath);
        os << "x1\n0\n1\n";
    }
    const auto r = runCli("tube --input " + cloudPath + " --eps 0.25");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto j = fraczeta::io::parseJson(r.out);
    EXPECT_DOUBLE_EQ(j["vol"].get<double>(), 1.0);
    EXPECT_TRUE(j["exact"].get<bool>());
}

TEST(Cli, StringJsonRoundTripThroughFiles) {
    const std::string path = tempPath("string.json");
    const auto w = runCli("string --analytic setf --output " + path);
    ASSERT_EQ(w.exitCode, 0) << w.out;
    const auto j = fraczeta::io::parseJson(fraczeta::io::readFile(path));
    const auto s = fraczeta::io::stringFromJson(j);
    // feeding the written JSON back through `zeta` works and is consistent
    const auto r = runCli("zeta --input " + path + " --s-rect 1.5,1.5,0,0,1,1 --format csv");
    ASSERT_EQ(r.exitCode, 0) << r.out;
    const auto v = fraczeta::evalDirichlet(s, fraczeta::Complex(1.5, 0.0));
    std::stringstream ss(r.out);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    std::stringstream rs(row);
    std::string cell;
    std::getline(rs, cell, ',');
    EXPECT_DOUBLE_EQ(std::stod(cell), 1.5);
    std::getline(rs, cell, ',');
    std::getline(rs, cell, ',');
    EXPECT_NEAR(std::stod(cell), v.value.real(), 1e-12 * std::abs(v.value.real()));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(runCli("").exitCode, 1);                                   // usage
    EXPECT_EQ(runCli("frobnicate").exitCode, 1);                         // bad subcommand
    EXPECT_EQ(runCli("string").exitCode, 2);                             // no input
    EXPECT_EQ(runCli("tube --input /nonexistent.csv --eps 0.1").exitCode, 2);
    EXPECT_EQ(runCli("dim --analytic cantor --lambda 0.5").exitCode, 3); // numeric domain
    const std::string badPath = tempPath("bad.json");
    {
        std::ofstream os(badPath);
        os << "{\"scales\": []}";
    }
    EXPECT_EQ(runCli("zeta --input " + badPath + " --s-rect 1,2,0,0,2,1").exitCode, 2);
}

}  // namespace
