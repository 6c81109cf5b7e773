#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "npp3cli/cli.hpp"

namespace npp3::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\"'");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\"'");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot read " + what + " from '" + s + "'");
  }
}

}  // namespace

std::vector<AxisRange> parse_grid(const std::string& spec) {
  std::vector<AxisRange> axes;
  for (const std::string& part : split(spec, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      throw UsageError("grid axis '" + part + "' is not of the form name=lo:hi:count");
    AxisRange a;
    a.name = trim(part.substr(0, eq));
    const auto f = split(part.substr(eq + 1), ':');
    if (f.size() != 3) throw UsageError("grid axis '" + part + "' needs lo:hi:count");
    a.lo = to_double(f[0], "grid lower bound");
    a.hi = to_double(f[1], "grid upper bound");
    const double n = to_double(f[2], "grid count");
    if (n != std::floor(n) || n < 2)
      throw UsageError("grid count for axis '" + a.name + "' must be an integer >= 2");
    a.count = static_cast<int>(n);
    if (!(a.hi > a.lo)) throw UsageError("grid axis '" + a.name + "' has hi <= lo");
    axes.push_back(a);
  }
  if (axes.size() != 3) throw UsageError("grid needs exactly three axes");
  return axes;
}

std::vector<Point> grid_points(const std::vector<AxisRange>& axes) {
  std::vector<Point> out;
  auto c = [&](int a, int k) {
    return axes[a].lo + (axes[a].hi - axes[a].lo) * k / (axes[a].count - 1);
  };
  for (int i = 0; i < axes[0].count; ++i)
    for (int j = 0; j < axes[1].count; ++j)
      for (int k = 0; k < axes[2].count; ++k) out.emplace_back(c(0, i), c(1, j), c(2, k));
  return out;
}

Polynomial parse_polynomial(const std::string& text) {
  std::vector<double> c;
  for (const std::string& s : split(text, ',')) {
    if (s.empty()) throw UsageError("empty coefficient in '" + text + "'");
    c.push_back(to_double(s, "polynomial coefficient"));
  }
  if (c.empty()) throw UsageError("empty coefficient list");
  return Polynomial(std::move(c));
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };
  try {
    if (auto v = get("example.name")) {
      auto k = parse_example_kind(trim(*v));
      if (!k) throw UsageError("config: unknown example '" + *v + "'");
      cfg.example.kind = *k;
    }
    if (auto v = get("example.lambda")) cfg.example.lambda = to_double(trim(*v), "lambda");
    if (auto v = get("example.f")) cfg.example.f = parse_polynomial(*v);
    if (auto v = get("example.D")) cfg.example.D = parse_polynomial(*v);
    if (auto v = get("example.E")) cfg.example.E = parse_polynomial(*v);
    if (auto v = get("example.branch"))
      cfg.example.branch = static_cast<int>(to_double(trim(*v), "branch"));
    if (auto v = get("grid.spec")) cfg.grid = parse_grid(*v);
    if (auto v = get("diff.fd_step")) cfg.diff.step = Vec3::Constant(to_double(trim(*v), "fd_step"));
    if (auto v = get("diff.spin_step")) cfg.diff.spin_step = to_double(trim(*v), "spin_step");
    if (auto v = get("diff.second_step")) cfg.diff.second_step = to_double(trim(*v), "second_step");
    if (auto v = get("diff.scheme")) {
      const std::string s = trim(*v);
      if (s == "central2") cfg.diff.scheme = DiffScheme::kCentral2;
      else if (s == "central4") cfg.diff.scheme = DiffScheme::kCentral4;
      else throw UsageError("config: scheme must be central2 or central4");
    }
    if (auto v = get("run.tol")) cfg.tol = to_double(trim(*v), "tol");
    if (auto v = get("run.seed")) cfg.seed = static_cast<std::uint64_t>(to_double(trim(*v), "seed"));
    if (auto v = get("run.out")) cfg.out_path = trim(*v);
    if (auto v = get("run.format")) cfg.format = trim(*v);
  } catch (const GeometryError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

}  // namespace npp3::cli
