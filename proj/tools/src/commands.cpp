#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "npp3cli/cli.hpp"
#include "npp3cli/version.hpp"

namespace npp3::cli {

namespace {

struct CommonFlags {
  std::optional<double> lambda, fd_step, tol;
  std::optional<std::string> f, D, E, grid, out, format, config;
  std::optional<int> branch;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, CommonFlags& fl, bool example_flags) {
  if (example_flags) {
    app->add_option("--lambda", fl.lambda, "contact constant lambda > 0");
    app->add_option("--f", fl.f, "coefficients of f(u), ascending degree, comma separated");
    app->add_option("--D", fl.D, "coefficients of D(v)");
    app->add_option("--E", fl.E, "coefficients of E(v)");
    app->add_option("--branch", fl.branch, "sign of 1/g on the chart (flat-b0nonzero)");
    app->add_option("--grid", fl.grid, "grid, e.g. r=0:1:11,u=-1:1:11,v=-1:1:11");
  }
  app->add_option("--fd-step", fl.fd_step, "first-derivative step");
  app->add_option("--tol", fl.tol, "tolerance applied to every check");
  app->add_option("--seed", fl.seed, "random seed (default 42)");
  app->add_option("--out", fl.out, "output path");
  app->add_option("--format", fl.format, "json or csv");
  app->add_option("--config", fl.config, "INI configuration file");
}

std::optional<double> env_tolerance() {
  const char* v = std::getenv("NPP3_DEFAULT_TOL");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const double t = std::stod(v, &used);
    if (used == std::string(v).size() && t > 0.0) return t;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("NPP3_DEFAULT_TOL is not a positive number: ") + v);
}

// builtin < environment < config file < flags
RunConfig resolve(const CommonFlags& fl, const std::optional<std::string>& example_name) {
  RunConfig cfg;
  cfg.example.f = Polynomial({0.0});
  cfg.example.D = Polynomial({1.0});
  cfg.example.E = Polynomial({0.0});
  cfg.tol = env_tolerance();
  if (fl.config) load_config_file(*fl.config, cfg);
  if (example_name) {
    const auto k = parse_example_kind(*example_name);
    if (!k) throw UsageError("unknown example '" + *example_name + "' (see list-examples)");
    cfg.example.kind = *k;
  }
  if (fl.lambda) cfg.example.lambda = *fl.lambda;
  if (fl.f) cfg.example.f = parse_polynomial(*fl.f);
  if (fl.D) cfg.example.D = parse_polynomial(*fl.D);
  if (fl.E) cfg.example.E = parse_polynomial(*fl.E);
  if (fl.branch) cfg.example.branch = *fl.branch;
  if (fl.grid) cfg.grid = parse_grid(*fl.grid);
  if (fl.fd_step) {
    if (!(*fl.fd_step > 0.0)) throw UsageError("--fd-step must be positive");
    cfg.diff.step = Vec3::Constant(*fl.fd_step);
  }
  if (fl.tol) cfg.tol = *fl.tol;
  if (cfg.tol && !(*cfg.tol > 0.0)) throw UsageError("tolerance must be positive");
  if (fl.seed) cfg.seed = *fl.seed;
  if (fl.out) cfg.out_path = *fl.out;
  if (fl.format) cfg.format = *fl.format;
  if (cfg.format != "json" && cfg.format != "csv")
    throw UsageError("--format must be json or csv");
  try {
    cfg.example.validate();
    cfg.diff.validate();
  } catch (const GeometryError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

cplx parse_complex(const std::string& s) {
  const Polynomial p = parse_polynomial(s);
  const auto& c = p.coefficients();
  if (c.size() > 2) throw UsageError("complex value '" + s + "' must be re or re,im");
  return {c[0], c.size() > 1 ? c[1] : 0.0};
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Report rep = verify(cfg);
  const std::string text = cfg.format == "csv" ? rep.to_csv() : rep.to_json().dump(2) + "\n";
  emit(text, cfg.out_path, out);
  if (!cfg.out_path.empty()) {
    int passed = 0;
    for (const auto& c : rep.checks) passed += c.pass ? 1 : 0;
    out << rep.example << ": " << passed << "/" << rep.checks.size() << " checks passed, "
        << rep.violations.size() << " domain violations\n";
  }
  for (const auto& c : rep.checks)
    if (!c.pass)
      err << "FAIL " << c.id << ": residual " << c.max_residual << " > " << c.tolerance << "\n";
  return rep.all_pass() ? kOk : kCheckFailure;
}

int cmd_classify(const std::string& ls, const std::string& rs, std::ostream& out,
                 std::ostream& err) {
  double lambda = 0.0, R = 0.0;
  try {
    std::size_t a = 0, b = 0;
    lambda = std::stod(ls, &a);
    R = std::stod(rs, &b);
    if (a != ls.size() || b != rs.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    err << "classify: expected two numbers, lambda and R\n";
    return kUsage;
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(R)) {
    err << "classify: lambda must be positive\n";
    return kUsage;
  }
  const BranchResult b = einstein_branch(lambda, R);
  switch (b.branch) {
    case EinsteinBranch::kElliptic:
      out << "Elliptic sigma=0\n";
      return kOk;
    case EinsteinBranch::kFlat:
      out << "Flat |sigma|=" << *b.sigma_abs << "\n";
      return kOk;
    default:
      out << "NoSolution\n";
      return kNoSolution;
  }
}

struct CongruenceFlags {
  std::string scenario = "rotation";
  std::optional<std::string> example, rho, sigma, summary;
  double r_max = 10.0;
  double step = kDefaultGeodesicStep;
  int neighbors = 16;
};

int cmd_congruence(const CongruenceFlags& cf, const RunConfig& cfg, std::ostream& out,
                   std::ostream& err) {
  using nlohmann::json;
  json summary;
  summary["schema_version"] = 1;
  summary["scenario"] = cf.scenario;
  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& id, double residual, double tol) {
    if (cfg.tol) tol = *cfg.tol;
    const bool pass = residual <= tol;
    ok = ok && pass;
    checks.push_back({{"id", id}, {"max_residual", residual}, {"tolerance", tol}, {"pass", pass}});
    if (!pass) err << "FAIL " << id << ": residual " << residual << " > " << tol << "\n";
  };
  std::ostringstream csv;
  csv << std::setprecision(12);

  if (cf.scenario == "rotation" || cf.scenario == "divergence" || cf.scenario == "shear") {
    const double l = cfg.example.lambda;
    cplx rho = cf.scenario == "rotation" ? cplx(0.0, l)
               : cf.scenario == "divergence" ? cplx(0.3, 0.0) : cplx(0.0, 0.0);
    cplx sigma = cf.scenario == "shear" ? 0.2 * std::exp(cplx(0.0, 1.2)) : cplx(0.0, 0.0);
    if (cf.rho) rho = parse_complex(*cf.rho);
    if (cf.sigma) sigma = parse_complex(*cf.sigma);
    if (cf.neighbors < 16) throw UsageError("--neighbors must be at least 16");
    summary["rho"] = {rho.real(), rho.imag()};
    summary["sigma"] = {sigma.real(), sigma.imag()};
    summary["r_max"] = cf.r_max;
    auto constant = [](cplx c) { return [c](double) { return c; }; };
    std::vector<std::vector<ConnectingSample>> paths;
    double closed = 0.0, modulus = 0.0;
    for (int k = 0; k < cf.neighbors; ++k) {
      const cplx z0 = std::exp(cplx(0.0, 2.0 * std::numbers::pi * k / cf.neighbors));
      auto path = integrate_connecting(constant(rho), constant(sigma), z0, cf.r_max, cf.step);
      for (const auto& s : path) {
        closed = std::max(closed, std::abs(s.zeta - connecting_exact(rho, sigma, z0, s.r)));
        modulus = std::max(modulus, std::abs(std::abs(s.zeta) - 1.0));
      }
      paths.push_back(std::move(path));
    }
    check("closed_form", closed, 1e-8);
    if (std::abs(rho.real()) == 0.0 && std::abs(sigma) == 0.0) {
      check("modulus_conservation", modulus, 1e-9);
      summary["modulus_conservation_error"] = modulus;
    }
    std::vector<cplx> final;
    for (const auto& p : paths) final.push_back(p.back().zeta);
    try {
      const EllipseFit fit = ellipse_eccentricity(final);
      summary["ellipse"] = {{"semi_major", fit.semi_major},
                            {"semi_minor", fit.semi_minor},
                            {"inclination", fit.inclination},
                            {"residual", fit.residual}};
      if (rho == cplx(0.0, 0.0) && std::abs(sigma) > 0.0) {
        const double s = std::abs(sigma), r = paths.front().back().r;
        const double phi = 0.5 * std::arg(sigma);
        double incl = std::fmod(phi + 0.5 * std::numbers::pi, std::numbers::pi);
        if (incl < 0) incl += std::numbers::pi;
        summary["expected_ellipse"] = {{"semi_major", std::exp(s * r)},
                                       {"semi_minor", std::exp(-s * r)},
                                       {"inclination", incl}};
        double di = std::abs(fit.inclination - incl);
        di = std::min(di, std::numbers::pi - di);
        check("ellipse_axes", std::max(std::abs(fit.semi_major - std::exp(s * r)) / std::exp(s * r),
                                       std::abs(fit.semi_minor - std::exp(-s * r)) / std::exp(-s * r)),
              1e-4);
        check("ellipse_inclination", di, 1e-3);
      }
    } catch (const GeometryError& e) {
      summary["ellipse"] = std::string("no fit: ") + e.what();
    }
    csv << "r";
    for (int k = 0; k < cf.neighbors; ++k) csv << ",re_zeta_" << k << ",im_zeta_" << k;
    csv << "\n";
    for (std::size_t s = 0; s < paths.front().size(); ++s) {
      csv << paths.front()[s].r;
      for (const auto& p : paths) csv << "," << p[s].zeta.real() << "," << p[s].zeta.imag();
      csv << "\n";
    }
  } else if (cf.scenario == "example") {
    const NamedExample& e = cfg.example;
    const ContactStructure C = example_structure(e);
    const VectorField reeb = reeb_vector_field(C);
    const Point base = e.base_point();
    EmpiricalOptions opt;
    opt.orientation = e.orientation();
    opt.neighbors = cf.neighbors;
    const EmpiricalOpticalScalars emp = empirical_optical_scalars(C.g, reeb, base, opt, cfg.diff);
    const FrameField frame = adapted_frame(C, cfg.diff.tol);
    const OpticalScalars fr = optical_scalars_from_spin(spin_coefficients(frame, base, cfg.diff));
    summary["example"] = e.name();
    summary["lambda"] = e.lambda;
    summary["base_point"] = {base[0], base[1], base[2]};
    summary["empirical"] = {{"divergence", emp.divergence}, {"twist", emp.twist},
                            {"shear", emp.shear}, {"fit_residual", emp.fit_residual},
                            {"orthogonality_drift", emp.orthogonality_drift}};
    summary["analytic"] = {{"divergence", fr.divergence}, {"twist", fr.twist},
                           {"shear", fr.shear_modulus}};
    check("empirical_vs_frame",
          std::max({std::abs(emp.divergence - fr.divergence), std::abs(emp.twist - fr.twist),
                    std::abs(emp.shear - fr.shear_modulus)}),
          1e-3);
    const double rmax = std::min(cf.r_max, 1.0);
    const double step = std::max(cf.step, 1e-2);
    const BundleTrajectory t = bundle_trajectory(C.g, reeb, base, rmax, step, opt, cfg.diff);
    summary["trajectory_samples"] = t.central.size();
    write_trajectory_csv(csv, t);
  } else {
    throw UsageError("unknown scenario '" + cf.scenario +
                     "' (rotation, divergence, shear, example)");
  }

  summary["checks"] = checks;
  summary["all_pass"] = ok;
  if (!cfg.out_path.empty()) emit(csv.str(), cfg.out_path, out);
  emit(summary.dump(2) + "\n", cf.summary.value_or(""), out);
  return ok ? kOk : kCheckFailure;
}

int cmd_list(std::ostream& out) {
  struct Row {
    ExampleKind k;
    const char* chart;
    const char* params;
  };
  const Row rows[] = {
      {ExampleKind::kStandardFlat, "(x, y, z)", "lambda"},
      {ExampleKind::kRoundSphere, "(rho, theta, phi)", "lambda (radius 1/lambda)"},
      {ExampleKind::kFlatB0Zero, "(r, u, v)", "lambda, f"},
      {ExampleKind::kFlatB0Nonzero, "(r, u, v)", "lambda, D, E, branch"},
      {ExampleKind::kElliptic, "(r, u, v)", "lambda, f"},
  };
  for (const Row& r : rows) {
    NamedExample e;
    e.kind = r.k;
    out << std::left << std::setw(16) << e.name() << " chart " << std::setw(18) << r.chart
        << " parameters: " << r.params << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adapted contact structures and spin-coefficient verification", "npp3"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags vf;
  std::string verify_name;
  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite for an example");
  verify_cmd->add_option("example", verify_name, "example name")->required();
  add_common(verify_cmd, vf, true);

  std::string cl_lambda, cl_R;
  auto* classify_cmd = app.add_subcommand("classify", "classify an Einstein adapted structure");
  classify_cmd->add_option("lambda", cl_lambda)->required();
  classify_cmd->add_option("R", cl_R)->required();

  CommonFlags cgf;
  CongruenceFlags cf;
  std::string cg_example;
  auto* cong_cmd = app.add_subcommand("congruence", "connecting-vector scenarios and geodesic bundles");
  cong_cmd->add_option("--scenario", cf.scenario, "rotation, divergence, shear or example");
  cong_cmd->add_option("--example", cf.example, "example for the bundle scenario");
  cong_cmd->add_option("--rho", cf.rho, "constant rho as re,im");
  cong_cmd->add_option("--sigma", cf.sigma, "constant sigma as re,im");
  cong_cmd->add_option("--r-max", cf.r_max, "final parameter");
  cong_cmd->add_option("--step", cf.step, "integration step");
  cong_cmd->add_option("--neighbors", cf.neighbors, "points on the initial circle");
  cong_cmd->add_option("--summary", cf.summary, "summary JSON path (default stdout)");
  add_common(cong_cmd, cgf, true);

  CommonFlags df;
  auto* disc_cmd = app.add_subcommand("discrepancies", "formula discrepancy ledger");
  add_common(disc_cmd, df, false);
  std::optional<double> disc_lambda;
  int disc_metrics = 20, disc_points = 5;
  disc_cmd->add_option("--lambda", disc_lambda, "lambda for the catalog examples");
  disc_cmd->add_option("--random-metrics", disc_metrics, "number of perturbed metrics");
  disc_cmd->add_option("--points", disc_points, "points per metric");

  app.add_subcommand("list-examples", "list the catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(resolve(vf, verify_name), out, err);
    if (classify_cmd->parsed()) return cmd_classify(cl_lambda, cl_R, out, err);
    if (cong_cmd->parsed()) {
      if (cf.example) cg_example = *cf.example;
      else if (cf.scenario == "example") cg_example = "standard-flat";
      return cmd_congruence(
          cf, resolve(cgf, cg_example.empty() ? std::nullopt : std::optional(cg_example)), out, err);
    }
    if (disc_cmd->parsed()) {
      RunConfig cfg = resolve(df, std::nullopt);
      DiscrepancyOptions opt;
      opt.lambda = disc_lambda.value_or(1.0);
      if (!(opt.lambda > 0.0)) throw UsageError("--lambda must be positive");
      opt.random_metrics = disc_metrics;
      opt.points_per_metric = disc_points;
      if (disc_points < 1 || disc_metrics < 0) throw UsageError("counts must be positive");
      opt.seed = cfg.seed;
      opt.diff = cfg.diff;
      const nlohmann::json j = discrepancies(opt);
      emit(cfg.format == "json" && df.format ? j.dump(2) + "\n" : discrepancies_text(j),
           cfg.out_path, out);
      return j["consistent"].get<bool>() ? kOk : kCheckFailure;
    }
    return cmd_list(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GeometryError& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::kInvalidArgument ? kUsage : kCheckFailure;
  }
}

}  // namespace npp3::cli
