#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "levin/cli.hpp"

using namespace levin::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

RunConfig config(const std::string& command) {
    RunConfig cfg;
    cfg.command = command;
    return cfg;
}

} // namespace

TEST(Cli, DigitsHeaderAndBody) {
    auto cfg = config("digits");
    cfg.len = 8;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "p=2 start=0 len=8\nbase=2\n00111001\n");

    cfg.start = "n3";
    cfg.len = 16;
    const auto aligned = invoke(cfg);
    EXPECT_EQ(aligned.code, 0);
    EXPECT_EQ(aligned.out, "p=2 start=72 len=16\nbase=2\n0000000011111111\n");

    cfg.start = "x";
    EXPECT_EQ(invoke(cfg).code, 1);
}

TEST(Cli, DigitsBudget) {
    auto cfg = config("digits");
    cfg.len = 1000;
    cfg.budget = 999;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("budget"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, VerifyBlockAndWord) {
    auto cfg = config("verify");
    cfg.m = 2;
    EXPECT_EQ(invoke(cfg).code, 0);

    cfg.word = "0101";
    cfg.k = 1;
    cfg.l = 2;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("block=0"), std::string::npos);
    EXPECT_NE(r.out.find("residues_mod_l=0,0"), std::string::npos);

    cfg.format = Format::json;
    const auto j = nlohmann::json::parse(invoke(cfg).out);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_EQ(j["counterexample"]["residues"], nlohmann::json::array({0, 0}));

    cfg.semi = true;
    EXPECT_EQ(invoke(cfg).code, 0);
}

TEST(Cli, VerifyBlockBudget) {
    auto cfg = config("verify");
    cfg.m = 4;
    cfg.budget = 1000;
    EXPECT_EQ(invoke(cfg).code, 2);
}

TEST(Cli, ScanRows) {
    auto cfg = config("scan");
    cfg.n_max = 2120;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::string line;
    std::size_t count = 0;
    std::getline(lines, line);
    EXPECT_EQ(line.rfind("N,Dstar_num", 0), 0u);
    while (std::getline(lines, line)) ++count;
    EXPECT_EQ(count, 2120u);
}

TEST(Cli, ScanIsDeterministicAndRecordsSeed) {
    auto cfg = config("scan");
    cfg.n_max = 300;
    cfg.stride = 7;
    cfg.random_stream = true;
    const auto a = invoke(cfg);
    const auto b = invoke(cfg);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("# p=2 stream=random seed=", 0), 0u);
    cfg.seed += 1;
    EXPECT_NE(invoke(cfg).out, a.out);
}

TEST(Cli, LemmasSuiteList) {
    auto cfg = config("lemmas");
    cfg.p = 3;
    cfg.m = 2;
    cfg.profiles = 5;
    cfg.format = Format::json;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    std::vector<std::string> names;
    for (const auto& s : j["suites"]) names.push_back(s["name"]);
    for (const char* want : {"rank", "lem_c", "1a", "1b", "2gen"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    }
    EXPECT_EQ(j["seed"], kDefaultSeed);
}

TEST(Cli, LowerboundAnalyzeOnly) {
    auto cfg = config("lowerbound");
    cfg.m = 8;
    cfg.analyze_only = true;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["N"].is_string());
    EXPECT_EQ(j["w"], nlohmann::json::array({31, 23}));
    EXPECT_TRUE(j["U"].empty());

    cfg.analyze_only = false;
    EXPECT_EQ(invoke(cfg).code, 2);
}

TEST(Cli, LowerboundDeskPlan) {
    auto cfg = config("lowerbound");
    cfg.m = 3;
    cfg.custom_w = {3};
    cfg.verify_gamma = true;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["delta_num"], "3");
    EXPECT_EQ(j["delta_den"], "2");
    EXPECT_TRUE(j["gamma_check"]["ok"].get<bool>());
    EXPECT_EQ(j["U"], nlohmann::json::array({"0"}));

    cfg.custom_w = {5, 3};
    EXPECT_EQ(invoke(cfg).code, 1);
}

TEST(Cli, Search) {
    auto cfg = config("search");
    cfg.k = 3;
    cfg.l = 1;
    cfg.nested = true;
    cfg.semi = true;
    const auto r = invoke(cfg);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("count=0"), std::string::npos);
}

TEST(Cli, Validation) {
    EXPECT_EQ(invoke(config("bogus")).code, 1);
    auto cfg = config("digits");
    cfg.p = 4;
    EXPECT_EQ(invoke(cfg).code, 1);
    cfg = config("scan");
    EXPECT_EQ(invoke(cfg).code, 1);
    cfg = config("verify");
    cfg.format = Format::csv;
    EXPECT_EQ(invoke(cfg).code, 1);
    EXPECT_EQ(parse_list("31,23"), (std::vector<std::uint64_t>{31, 23}));
    EXPECT_THROW(parse_list("3,,4"), std::invalid_argument);
    EXPECT_THROW(parse_list("-1"), std::invalid_argument);
}
