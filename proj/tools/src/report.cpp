#include <algorithm>
#include <iomanip>
#include <sstream>

#include "npp3cli/cli.hpp"
#include "npp3cli/version.hpp"

namespace npp3::cli {

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

const CheckRecord* Report::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

nlohmann::json Report::to_json(bool with_timing) const {
  using nlohmann::json;
  std::vector<CheckRecord> sorted = checks;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  json j;
  j["schema_version"] = 1;
  j["tool"] = {{"name", "npp3"}, {"version", kVersion}};
  j["command"] = command;
  j["example"] = example;
  j["config"] = config;
  json arr = json::array();
  int passed = 0;
  for (const auto& c : sorted) {
    json r = {{"id", c.id},
              {"anchor", c.anchor},
              {"max_residual", c.max_residual},
              {"tolerance", c.tolerance},
              {"pass", c.pass},
              {"points", c.points}};
    if (with_timing) r["wall_ms"] = c.wall_ms;
    arr.push_back(r);
    passed += c.pass ? 1 : 0;
  }
  j["checks"] = arr;
  json viol = json::array();
  for (const auto& v : violations)
    viol.push_back({{"check", v.check},
                    {"point", {v.point[0], v.point[1], v.point[2]}},
                    {"message", v.message}});
  j["domain_violations"] = viol;
  j["findings"] = findings;
  j["summary"] = {{"checks", static_cast<int>(sorted.size())},
                  {"passed", passed},
                  {"failed", static_cast<int>(sorted.size()) - passed},
                  {"domain_violations", static_cast<int>(violations.size())},
                  {"all_pass", passed == static_cast<int>(sorted.size())}};
  return j;
}

std::string Report::to_csv() const {
  std::vector<CheckRecord> sorted = checks;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  std::ostringstream os;
  os << std::setprecision(10);
  os << "id,anchor,max_residual,tolerance,pass,points,wall_ms\n";
  for (const auto& c : sorted)
    os << c.id << ",\"" << c.anchor << "\"," << c.max_residual << "," << c.tolerance << ","
       << (c.pass ? "true" : "false") << "," << c.points << "," << c.wall_ms << "\n";
  return os.str();
}

}  // namespace npp3::cli
