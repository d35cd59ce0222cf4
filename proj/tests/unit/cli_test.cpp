#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbc/cli/app.hpp"
#include "test_util.hpp"

using namespace cbc;
using cbc::testing::fixture_path;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cbcforge_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("SOURCE_DATE_EPOCH");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static nlohmann::json load(const std::string& p) { return nlohmann::json::parse(slurp(p)); }

  fs::path dir_;
};

const char* kSwitchingIntegration = R"({"tests": [{"statements": [
  {"kind": "construct", "class": "SwitchState", "args": [{"int": 5}]},
  {"kind": "construct", "class": "SwitchingFunctionsHandler", "args": [{"var": 0}]},
  {"kind": "invoke", "receiver": 1, "method": "init", "args": []},
  {"kind": "invoke", "receiver": 1, "method": "evaluateStepC", "args": [{"int": 1}]}]}]})";

const char* kSwitchingUnit = R"({"tests": [{"statements": [
  {"kind": "construct", "class": "SwitchState", "args": [{"int": 5}]},
  {"kind": "construct", "class": "SwitchingFunctionsHandler", "args": [{"var": 0}]},
  {"kind": "invoke", "receiver": 1, "method": "evaluateStepC", "args": [{"int": 3}]}]},
 {"statements": [
  {"kind": "construct", "class": "SwitchState", "args": [{"int": 5}]},
  {"kind": "construct", "class": "SwitchingFunctionsHandler", "args": [{"var": 0}]},
  {"kind": "invoke", "receiver": 1, "method": "init", "args": []},
  {"kind": "invoke", "receiver": 1, "method": "evaluateStepC", "args": [{"int": 10}]},
  {"kind": "invoke", "receiver": 1, "method": "evaluateStepC", "args": [{"int": 1}]}]}]})";

}  // namespace

TEST_F(Cli, AnalyzeListsCouples) {
  std::string out = path("a.json");
  CliRun r = cli({"analyze", fixture_path("person_car.moo"), "--caller", "Person", "--callee", "Car", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("<13,16> false x <b8,b9> true"), std::string::npos);
  nlohmann::json j = load(out);
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(j["manifest"]["command"], "analyze");
  EXPECT_EQ(j["manifest"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  ASSERT_EQ(j["couples"].size(), 2u);
  for (const auto& c : j["couples"]) EXPECT_EQ(j["sites"][c["site"].get<int>()]["line"], 16);
}

TEST_F(Cli, AnalyzeBranchlessCallee) {
  std::string src = write("p.moo",
                          "class A {\n  private field b: B;\n  public method go(x: int) {\n    if (x > 0) {\n"
                          "      b.run();\n    }\n  }\n}\nclass B {\n  public method run() {\n  }\n}\n");
  CliRun r = cli({"analyze", src, "--caller", "A", "--callee", "B"});
  EXPECT_EQ(r.code, kExitNoCouples) << r.err;
  EXPECT_NE(r.out.find("coupled branches: 0"), std::string::npos);
}

TEST_F(Cli, MalformedProgramReportsPosition) {
  std::string src = write("bad.moo", "class A {\n  public method m() {\n    x = ;\n  }\n}\n");
  CliRun r = cli({"analyze", src, "--caller", "A", "--callee", "A"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("bad.moo: 3:9"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownClassAndBadFlags) {
  EXPECT_EQ(cli({"analyze", fixture_path("person_car.moo"), "--caller", "Nope", "--callee", "Car"}).code,
            kExitUnknownClass);
  EXPECT_EQ(cli({"ccfg", "export", fixture_path("person_car.moo"), "--class", "Nope"}).code, kExitUnknownClass);
  EXPECT_EQ(cli({"analyze", fixture_path("person_car.moo")}).code, kExitInput);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"analyze", "/nonexistent.moo", "--caller", "A", "--callee", "B"}).code, kExitInput);
}

TEST_F(Cli, GenerateIsReproducible) {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  std::vector<std::string> base = {"generate", fixture_path("person_car.moo"), "--caller", "Person",
                                   "--callee", "Car", "--seed", "3"};
  auto with = [&](const std::string& stem) {
    auto v = base;
    v.insert(v.end(), {"--out", path(stem + ".json"), "--dump-traces", path(stem + ".traces.json")});
    return v;
  };
  CliRun a = cli(with("a"));
  CliRun b = cli(with("b"));
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_NE(a.out.find("CBC: 1.000000"), std::string::npos) << a.out;
  // Manifests differ only in output paths, which are not recorded.
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.report.json")), slurp(path("b.report.json")));
  EXPECT_EQ(slurp(path("a.traces.json")), slurp(path("b.traces.json")));
  nlohmann::json rep = load(path("a.report.json"));
  EXPECT_EQ(rep["manifest"]["seed"], 3);
  EXPECT_EQ(rep["manifest"]["timestamps"]["started"], "2023-11-14T22:13:20Z");
  EXPECT_EQ(rep["cbc"], 1.0);
}

TEST_F(Cli, GenerateSeedFromEnvironment) {
  setenv("CBCFORGE_SEED", "9", 1);
  CliRun r = cli({"generate", fixture_path("person_car.moo"), "--caller", "Person", "--callee", "Car", "--out",
               path("s.json")});
  unsetenv("CBCFORGE_SEED");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load(path("s.report.json"))["manifest"]["seed"], 9);
}

TEST_F(Cli, GenerateZeroBudget) {
  CliRun r = cli({"generate", fixture_path("person_car.moo"), "--caller", "Person", "--callee", "Car", "--budget-evals",
               "0", "--out", path("s.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  nlohmann::json rep = load(path("s.report.json"));
  EXPECT_EQ(rep["history"].size(), 1u);
  EXPECT_TRUE(load(path("s.json"))["tests"].is_array());
}

TEST_F(Cli, GenerateUntestablePairs) {
  EXPECT_EQ(cli({"generate", fixture_path("person_car.moo"), "--caller", "Car", "--callee", "Person", "--out",
                 path("s.json")})
                .code,
            kExitNoCouples);
}

TEST_F(Cli, CoverAgreesWithGenerate) {
  std::string suite = path("s.json");
  ASSERT_EQ(cli({"generate", fixture_path("person_car.moo"), "--caller", "Person", "--callee", "Car", "--out", suite})
                .code,
            kExitOk);
  std::string rep = path("c.json");
  CliRun r = cli({"cover", fixture_path("person_car.moo"), suite, "--out", rep});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load(rep)["cbc"], load(path("s.report.json"))["cbc"]);
  EXPECT_EQ(load(rep)["cbc_matching"], "scoped");
}

TEST_F(Cli, CoverEmptySuiteAndMatchingModes) {
  std::string empty = write("empty.json", "\n");
  CliRun r = cli({"cover", fixture_path("person_car.moo"), empty, "--caller", "Person", "--callee", "Car"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("CBC (scoped): 0.000000"), std::string::npos);

  // refuel is called directly first, then through addEnergy.
  std::string suite = write("s.json", R"({"tests": [{"statements": [
    {"kind": "construct", "class": "Car", "args": [{"int": 0}]},
    {"kind": "invoke", "receiver": 0, "method": "refuel", "args": []},
    {"kind": "construct", "class": "Person", "args": [{"var": 0}]},
    {"kind": "invoke", "receiver": 2, "method": "addEnergy", "args": []}]}]})");
  CliRun scoped = cli({"cover", fixture_path("person_car.moo"), suite, "--caller", "Person", "--callee", "Car", "--out",
                    path("sc.json")});
  CliRun whole = cli({"cover", fixture_path("person_car.moo"), suite, "--caller", "Person", "--callee", "Car",
                   "--cbc-matching", "whole-test", "--out", path("wt.json")});
  ASSERT_EQ(scoped.code, kExitOk) << scoped.err;
  ASSERT_EQ(whole.code, kExitOk) << whole.err;
  EXPECT_EQ(load(path("sc.json"))["cbc"], 0.5);
  EXPECT_EQ(load(path("wt.json"))["cbc"], 1.0);
  EXPECT_EQ(cli({"cover", fixture_path("person_car.moo"), suite, "--caller", "Person", "--callee", "Car",
                 "--cbc-matching", "fuzzy"})
                .code,
            kExitInput);
}

TEST_F(Cli, CoverSuiteMismatch) {
  std::string suite = write("s.json", R"({"tests": [{"statements": [
    {"kind": "construct", "class": "Ghost", "args": []}]}]})");
  EXPECT_EQ(cli({"cover", fixture_path("person_car.moo"), suite, "--caller", "Person", "--callee", "Car"}).code,
            kExitSuiteMismatch);
  std::string junk = write("j.json", "{not json");
  EXPECT_EQ(cli({"cover", fixture_path("person_car.moo"), junk, "--caller", "Person", "--callee", "Car"}).code,
            kExitInput);
}

TEST_F(Cli, MutateIntegrationVersusUnitSuite) {
  auto status_of = [&](const std::string& suite_text) {
    std::string suite = write("suite.json", suite_text);
    std::string out = path("m.json");
    CliRun r = cli({"mutate", fixture_path("switching.moo"), suite, "--target-class", "SwitchState", "--operators",
                 "BooleanTrueReturnVals", "--out", out});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    nlohmann::json report = load(out);
    for (const auto& m : report["mutants"]) {
      if (m["method"] == "SwitchState.evaluateStep" && m["line"] == 12) return m["status"].get<std::string>();
    }
    return std::string("missing");
  };
  EXPECT_EQ(status_of(kSwitchingIntegration), "killed");
  EXPECT_EQ(status_of(kSwitchingUnit), "survived");
}

TEST_F(Cli, MutateOperatorSelection) {
  std::string suite = write("suite.json", kSwitchingIntegration);
  CliRun none = cli({"mutate", fixture_path("switching.moo"), suite, "--target-class", "SwitchState", "--operators",
                  "none", "--out", path("n.json")});
  ASSERT_EQ(none.code, kExitOk) << none.err;
  EXPECT_TRUE(load(path("n.json"))["score"].is_null());
  EXPECT_EQ(cli({"mutate", fixture_path("switching.moo"), suite, "--target-class", "SwitchState", "--operators",
                 "Bogus"})
                .code,
            kExitInput);
  EXPECT_EQ(cli({"mutate", fixture_path("switching.moo"), suite, "--target-class", "Ghost"}).code, kExitUnknownClass);
}

TEST_F(Cli, CcfgExportDot) {
  CliRun r = cli({"ccfg", "export", fixture_path("green_person.moo"), "--class", "Person", "--role",
               "superclass-of-pair", "--paired", "GreenPerson"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("digraph", 0), 0u);
  EXPECT_EQ(cli({"ccfg", "export", fixture_path("green_person.moo"), "--class", "Person", "--role", "sideways"}).code,
            kExitInput);
}
