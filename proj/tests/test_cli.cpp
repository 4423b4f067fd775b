#include "testing.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>

using mixhit::testing::cli;
using mixhit::testing::run_command;

namespace {

std::string temp_file(const std::string& name, const std::string& body) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

std::string two_state_args() { return " --family two_state --param p=0.5 --param q=0.5"; }

}  // namespace

TEST(Cli, InfoOnTwoState) {
    auto r = run_command(cli() + " info" + two_state_args());
    ASSERT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.output);
    EXPECT_NEAR(doc["t_rel"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(doc["command"], "info");
    EXPECT_EQ(doc["states"], 2);
}

TEST(Cli, FullSuiteOnTwoStatePasses) {
    auto r = run_command(cli() + " certify" + two_state_args());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    auto doc = nlohmann::json::parse(r.output);
    EXPECT_EQ(doc["certificates"]["summary"]["failed"], 0);
    EXPECT_TRUE(doc["certificates"]["summary"]["all_pass"].get<bool>());
}

TEST(Cli, SuiteOnRandomTreePasses) {
    auto r = run_command(cli() + " certify --family random_tree --param n=12 --param seed=7 --functions 20");
    EXPECT_EQ(r.exit_code, 0);
}

TEST(Cli, NegativeToleranceFailsCertificates) {
    auto r = run_command(cli() + " certify" + two_state_args() + " --suite sandwich --tolerance -1");
    EXPECT_EQ(r.exit_code, 1);
    auto doc = nlohmann::json::parse(r.output);
    EXPECT_GT(doc["certificates"]["summary"]["failed"].get<int>(), 0);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_command(cli() + " sweep --family aldous --schedule").exit_code, 2);
    EXPECT_EQ(run_command(cli() + " profile" + two_state_args() + " --points 0").exit_code, 2);
    EXPECT_EQ(run_command(cli() + " info --family nope").exit_code, 2);
    EXPECT_EQ(run_command(cli() + " frobnicate").exit_code, 2);
    EXPECT_EQ(run_command(cli() + " certify" + two_state_args() + " --suite nope").exit_code, 2);
}

TEST(Cli, MalformedSpecReportsPosition) {
    auto path = temp_file("mixhit_bad.json", "{\n  \"format_version\": 1,\n  \"states\": [\"a\",,]\n}\n");
    auto r = run_command(cli() + " info " + path, true);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
}

TEST(Cli, SpecFileMatchesFamily) {
    auto path = temp_file("mixhit_two.json", R"({"format_version": 1, "name": "two",
        "states": ["0", "1"], "kernel": [["1/2", "1/2"], ["1/2", "1/2"]]})");
    auto a = run_command(cli() + " profile " + path + " --tmax 3 --points 7");
    auto b = run_command(cli() + " profile" + two_state_args() + " --tmax 3 --points 7");
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    EXPECT_EQ(a.output, b.output);
}

TEST(Cli, ProfileCsv) {
    auto r = run_command(cli() + " profile" + two_state_args() + " --tmax 2 --points 3 --format fixed17");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output.rfind("t,d\n", 0), 0u) << r.output;
}

TEST(Cli, SweepProducesDiagnostics) {
    auto r = run_command(cli() + " sweep --family biased_path --schedule 10,20");
    ASSERT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.output);
    EXPECT_EQ(doc["sweep"]["per_n"].size(), 2u);
    EXPECT_TRUE(doc["diagnostics"].is_array());
}
