#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npp3/npp3.hpp"

namespace npp3::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kUsage = 2, kNoSolution = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AxisRange {
  std::string name;
  double lo = 0.0, hi = 0.0;
  int count = 2;
};

// "r=0:1:11,u=-1:1:11,v=-1:1:11"; axis names are labels only, order is the
// coordinate order.
std::vector<AxisRange> parse_grid(const std::string& spec);
std::vector<Point> grid_points(const std::vector<AxisRange>& axes);
// "1,0,2" -> 1 + 2 x^2
Polynomial parse_polynomial(const std::string& text);

// Fourth order, h = 1e-4 for the frame and 1e-3 for derivatives of spin
// coefficients: the nested differences then stay near 1e-8 on the catalog
// and near 1e-6 on the perturbed metrics.
inline DiffConfig suite_diff_config() {
  DiffConfig d;
  d.scheme = DiffScheme::kCentral4;
  d.step = Vec3::Constant(1e-4);
  d.spin_step = 1e-3;
  return d;
}

struct RunConfig {
  NamedExample example;
  std::optional<std::vector<AxisRange>> grid;
  DiffConfig diff = suite_diff_config();
  std::optional<double> tol;  // replaces every per-check tolerance
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 42;
};

// Key-value sections: [example] name lambda f D E branch; [grid] spec;
// [diff] fd_step spin_step scheme; [run] tol seed out format.
void load_config_file(const std::string& path, RunConfig& cfg);

struct CheckRecord {
  std::string id;
  std::string anchor;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int points = 0;
  double wall_ms = 0.0;
};

struct DomainViolation {
  std::string check;
  Point point;
  std::string message;
};

struct Report {
  std::string command;
  std::string example;
  std::vector<CheckRecord> checks;
  std::vector<DomainViolation> violations;
  nlohmann::json findings = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();

  bool all_pass() const;
  const CheckRecord* find(const std::string& id) const;
  nlohmann::json to_json(bool with_timing = true) const;
  std::string to_csv() const;
};

Report verify(const RunConfig& cfg);

struct DiscrepancyOptions {
  double lambda = 1.0;
  int random_metrics = 20;
  int points_per_metric = 5;
  std::uint64_t seed = 42;
  DiffConfig diff = suite_diff_config();
};
nlohmann::json discrepancies(const DiscrepancyOptions& opt);
std::string discrepancies_text(const nlohmann::json& j);

// Entry point; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace npp3::cli
