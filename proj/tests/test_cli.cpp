#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "npp3cli/cli.hpp"

using namespace npp3;
using namespace npp3::cli;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "npp3");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("npp3_test_" + name);
}

double first_tolerance(const std::string& report) {
  return json::parse(report)["checks"][0]["tolerance"].get<double>();
}

}  // namespace

TEST(Options, ParseGrid) {
  const auto g = parse_grid("r=0:1:3,u=-1:1:2,v=0.5:1:2");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[1].name, "u");
  EXPECT_EQ(grid_points(g).size(), 12u);
  EXPECT_EQ(grid_points(g)[0], Point(0, -1, 0.5));
  EXPECT_EQ(grid_points(g)[1], Point(0, -1, 1.0));
  EXPECT_THROW(parse_grid("r=0:1:3,u=-1:1:2"), UsageError);
  EXPECT_THROW(parse_grid("r=0:1:1,u=0:1:2,v=0:1:2"), UsageError);
  EXPECT_THROW(parse_grid("r=a:1:3,u=0:1:2,v=0:1:2"), UsageError);
}

TEST(Options, ParsePolynomial) {
  EXPECT_EQ(parse_polynomial("1,0,2").coefficients(), (std::vector<double>{1, 0, 2}));
  EXPECT_EQ(parse_polynomial("-0.5").coefficients(), (std::vector<double>{-0.5}));
  EXPECT_THROW(parse_polynomial("1,x"), UsageError);
}

TEST(Classify, Branches) {
  auto a = invoke({"classify", "1", "6"});
  EXPECT_EQ(a.code, kOk);
  EXPECT_NE(a.out.find("Elliptic"), std::string::npos);
  auto b = invoke({"classify", "1", "0"});
  EXPECT_EQ(b.code, kOk);
  EXPECT_NE(b.out.find("Flat"), std::string::npos);
  auto c = invoke({"classify", "1", "-6"});
  EXPECT_EQ(c.code, kNoSolution);
  EXPECT_NE(c.out.find("NoSolution"), std::string::npos);
  EXPECT_EQ(invoke({"classify", "1", "3"}).code, kNoSolution);
  EXPECT_EQ(invoke({"classify", "0", "0"}).code, kUsage);
  EXPECT_EQ(invoke({"classify", "x", "0"}).code, kUsage);
}

TEST(Verify, StandardFlatPasses) {
  const auto r = invoke({"verify", "standard-flat"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["summary"]["all_pass"].get<bool>());
  EXPECT_GT(j["summary"]["checks"].get<int>(), 20);
  EXPECT_EQ(j["example"], "standard-flat");
}

TEST(Verify, EllipticIncludesIsometry) {
  RunConfig cfg;
  cfg.example.kind = ExampleKind::kElliptic;
  cfg.example.f = Polynomial({0.0});
  const Report rep = verify(cfg);
  EXPECT_TRUE(rep.all_pass());
  ASSERT_NE(rep.find("isometry.metric"), nullptr);
  EXPECT_TRUE(rep.find("isometry.metric")->pass);
  EXPECT_TRUE(rep.find("isometry.form")->pass);
  EXPECT_TRUE(rep.find("reduced.system")->pass);
  EXPECT_EQ(rep.find("reduced.system")->tolerance, 1e-8);
}

TEST(Verify, AllExamplesPassAtDefaults) {
  for (ExampleKind k : all_example_kinds()) {
    const auto r = invoke({"verify", to_string(k), "--f", "0,1", "--E", "0,1"});
    EXPECT_EQ(r.code, kOk) << to_string(k) << "\n" << r.err;
  }
}

TEST(Verify, DomainViolationsAreReportedNotFatal) {
  const auto r = invoke({"verify", "flat-b0nonzero", "--D", "1", "--E", "0,1", "--grid",
                         "r=0:1:5,u=-2:2:5,v=-1:1:5"});
  EXPECT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GT(j["summary"]["domain_violations"].get<int>(), 0);
  EXPECT_EQ(j["domain_violations"][0]["check"], "grid");
}

TEST(Verify, TightToleranceFails) {
  const auto r = invoke({"verify", "sphere", "--tol", "1e-14"});
  EXPECT_EQ(r.code, kCheckFailure);
  EXPECT_FALSE(json::parse(r.out)["summary"]["all_pass"].get<bool>());
}

TEST(Verify, DeterministicWithoutTiming) {
  RunConfig cfg;
  cfg.example.kind = ExampleKind::kFlatB0Zero;
  cfg.example.f = Polynomial({1.0, 1.0});
  EXPECT_EQ(verify(cfg).to_json(false).dump(), verify(cfg).to_json(false).dump());
}

TEST(Verify, CsvFormat) {
  const auto path = temp_file("report.csv");
  const auto r = invoke({"verify", "standard-flat", "--format", "csv", "--out", path.string()});
  EXPECT_EQ(r.code, kOk);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_NE(header.find("id"), std::string::npos);
  EXPECT_NE(header.find("max_residual"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Verify, UnknownExampleIsUsageError) {
  const auto r = invoke({"verify", "hyperbolic"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({"verify", "flat-b0nonzero", "--D", "0", "--E", "0"}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
}

TEST(Config, Precedence) {
  const auto path = temp_file("precedence.ini");
  {
    std::ofstream f(path);
    f << "[example]\nname = standard-flat\n\n[run]\ntol = 0.5\n";
  }
  ::setenv("NPP3_DEFAULT_TOL", "0.25", 1);
  EXPECT_EQ(first_tolerance(invoke({"verify", "standard-flat"}).out), 0.25);
  EXPECT_EQ(first_tolerance(invoke({"verify", "standard-flat", "--config", path.string()}).out), 0.5);
  EXPECT_EQ(first_tolerance(invoke({"verify", "standard-flat", "--config", path.string(), "--tol",
                                    "0.125"})
                                .out),
            0.125);
  ::unsetenv("NPP3_DEFAULT_TOL");
  EXPECT_EQ(first_tolerance(invoke({"verify", "standard-flat"}).out), 1e-6);
  std::filesystem::remove(path);
}

TEST(Config, MalformedFile) {
  const auto path = temp_file("bad.ini");
  {
    std::ofstream f(path);
    f << "[example\nname = sphere\n";
  }
  EXPECT_EQ(invoke({"verify", "sphere", "--config", path.string()}).code, kUsage);
  EXPECT_EQ(invoke({"verify", "sphere", "--config", "/nonexistent/npp3.ini"}).code, kUsage);
  std::filesystem::remove(path);
}

TEST(Discrepancies, ReportsBothReadings) {
  const auto r = invoke({"discrepancies", "--format", "json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["consistent"].get<bool>());
  EXPECT_TRUE(j["required_flips"].empty());
  bool saw_sphere = false;
  for (const auto& t : j["tanaka_webster"]) {
    if (t["example"] == "sphere") {
      saw_sphere = true;
      EXPECT_NEAR(t["W_measured"].get<double>(), 2.0, 1e-3);
      EXPECT_TRUE(t.contains("reading_R_over_3lambda_plus_lambda"));
      EXPECT_TRUE(t.contains("reading_R_over_6lambda_plus_lambda"));
      EXPECT_FALSE(t["readings_coincide"].get<bool>());
    }
    if (t["example"] == "standard-flat") EXPECT_TRUE(t["readings_coincide"].get<bool>());
  }
  EXPECT_TRUE(saw_sphere);
  const auto text = invoke({"discrepancies"});
  EXPECT_EQ(text.code, kOk);
  EXPECT_NE(text.out.find("sphere"), std::string::npos);
}

TEST(Congruence, RotationScenario) {
  const auto csv = temp_file("rotation.csv");
  const auto r = invoke({"congruence", "--scenario", "rotation", "--out", csv.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(std::filesystem::exists(csv));
  EXPECT_TRUE(j["all_pass"].get<bool>()) << j.dump(2);
  std::filesystem::remove(csv);
}

TEST(Congruence, ShearAndExampleScenarios) {
  const auto csv = temp_file("shear.csv");
  EXPECT_EQ(invoke({"congruence", "--scenario", "shear", "--sigma", "0.2,0.1", "--out",
                    csv.string()})
                .code,
            kOk);
  EXPECT_EQ(invoke({"congruence", "--scenario", "example", "--example", "sphere", "--out",
                    csv.string()})
                .code,
            kOk);
  EXPECT_EQ(invoke({"congruence", "--scenario", "sideways"}).code, kUsage);
  std::filesystem::remove(csv);
}

TEST(ListExamples, AllNames) {
  const auto r = invoke({"list-examples"});
  EXPECT_EQ(r.code, kOk);
  for (ExampleKind k : all_example_kinds()) EXPECT_NE(r.out.find(to_string(k)), std::string::npos);
}
