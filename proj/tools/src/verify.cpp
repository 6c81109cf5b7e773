#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "npp3cli/cli.hpp"

namespace npp3::cli {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Suite {
 public:
  explicit Suite(const RunConfig& cfg) : cfg_(cfg) {}

  void declare(const std::string& id, const std::string& anchor, double tol) {
    index_[id] = checks_.size();
    CheckRecord c;
    c.id = id;
    c.anchor = anchor;
    c.tolerance = cfg_.tol ? *cfg_.tol : tol;
    checks_.push_back(c);
  }

  void add(const std::string& id, double residual, int points = 1) {
    CheckRecord& c = checks_.at(index_.at(id));
    // NaN propagates as a failure.
    if (std::isnan(residual) || residual > c.max_residual || std::isnan(c.max_residual))
      c.max_residual = residual;
    c.points += points;
  }

  template <class F>
  auto timed(const std::string& id, F&& f) {
    const auto t0 = Clock::now();
    auto out = f();
    checks_.at(index_.at(id)).wall_ms +=
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return out;
  }

  std::vector<CheckRecord> finish() {
    for (auto& c : checks_) c.pass = c.max_residual <= c.tolerance;
    return checks_;
  }

 private:
  const RunConfig& cfg_;
  std::vector<CheckRecord> checks_;
  std::map<std::string, std::size_t> index_;
};

ScalarField random_test_function(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 3> a{}, c{};
  std::array<Vec3, 3> b;
  for (int k = 0; k < 3; ++k) {
    a[k] = u(rng);
    b[k] = Vec3(u(rng), u(rng), u(rng)) * 1.5;
    c[k] = u(rng);
  }
  return [a, b, c](const Point& p) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += a[k] * std::sin(b[k].dot(p) + c[k]);
    return s;
  };
}

bool recoverable(const GeometryError& e) {
  return e.kind() == ErrorKind::kDomainViolation || e.kind() == ErrorKind::kDegenerateMetric ||
         e.kind() == ErrorKind::kFrameDrift;
}

// Everything computed at one grid point, committed only when complete.
struct PointResult {
  double dalpha = 0, dalpha_fd = 0, norm = 0;
  double geodesic = 0, divergence = 0, twist = 0, converse = 0, curve = 0;
  double optical = 0;
  double ricci = 0, scalar = 0, reality = 0, identities = 0, commutators = 0;
  double torsion = 0, relation = 0, w_real = 0;
  double einstein = 0, branch = 0;
  std::optional<double> reduced_system, reduced_gauge;
  double R = 0, W = 0, sigma = 0;
};

double spin_gap(const OpticalScalars& a, const OpticalScalars& b) {
  return std::max({std::abs(a.divergence - b.divergence), std::abs(a.twist - b.twist),
                   std::abs(a.shear_modulus - b.shear_modulus)});
}

nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["example"] = cfg.example.name();
  j["lambda"] = cfg.example.lambda;
  j["f"] = cfg.example.f.coefficients();
  j["D"] = cfg.example.D.coefficients();
  j["E"] = cfg.example.E.coefficients();
  j["branch"] = cfg.example.branch;
  if (cfg.grid) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& a : *cfg.grid)
      g.push_back({{"axis", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}});
    j["grid"] = g;
  } else {
    j["grid"] = "default";
  }
  j["fd_step"] = cfg.diff.step[0];
  j["spin_step"] = cfg.diff.spin_step;
  j["second_step"] = cfg.diff.second_step;
  j["scheme"] = cfg.diff.scheme == DiffScheme::kCentral2 ? "central2" : "central4";
  j["tol_override"] = cfg.tol ? nlohmann::json(*cfg.tol) : nlohmann::json(nullptr);
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

Report verify(const RunConfig& cfg) {
  const NamedExample& e = cfg.example;
  e.validate();
  cfg.diff.validate();
  const DiffConfig& diff = cfg.diff;
  const double lambda = e.lambda;
  const int orient = e.orientation();
  const bool family = e.kind == ExampleKind::kFlatB0Zero ||
                      e.kind == ExampleKind::kFlatB0Nonzero ||
                      e.kind == ExampleKind::kElliptic;
  const bool elliptic_branch =
      e.kind == ExampleKind::kRoundSphere || e.kind == ExampleKind::kElliptic;

  Report rep;
  rep.command = "verify";
  rep.example = e.name();
  rep.config = config_echo(cfg);

  Suite suite(cfg);
  suite.declare("adapted.dalpha", "d alpha = 2 lambda *alpha, exact derivatives", 1e-6);
  suite.declare("adapted.dalpha_fd", "d alpha = 2 lambda *alpha, finite differences", 1e-6);
  suite.declare("adapted.norm", "|alpha|_g = 1", 1e-6);
  suite.declare("reeb.geodesic", "Reeb congruence geodesic: |kappa|", 1e-5);
  suite.declare("reeb.divergence", "Reeb congruence divergence free: |Re rho|", 1e-5);
  suite.declare("reeb.twist", "Reeb congruence twist equals lambda: |Im rho - lambda|", 1e-5);
  suite.declare("reeb.converse", "form dual to a unit geodesic field of twist lambda is adapted", 1e-5);
  suite.declare("geodesic.reeb_curve", "|nabla_Z0 Z0|_g", 1e-5);
  suite.declare("optical.spin_vs_direct", "optical scalars from spin coefficients vs covariant formulas", 1e-5);
  suite.declare("npp.ricci", "frame Ricci from spin coefficients vs projected curvature", 1e-3);
  suite.declare("npp.scalar", "scalar curvature from spin coefficients vs curvature tensor", 1e-3);
  suite.declare("npp.reality", "imaginary parts of R00, R+- and R/2", 1e-6);
  suite.declare("npp.identities", "Bianchi-type identities among spin derivatives", 1e-3);
  suite.declare("npp.commutators", "commutators of D, delta, delta-bar on a test function", 1e-3);
  suite.declare("pseudohermitian.torsion", "A = -conj(sigma) and |A| = shear", 1e-5);
  suite.declare("pseudohermitian.scalar_relation", "R/2 = 2 lambda W - lambda^2 - |A|^2", 1e-3);
  suite.declare("pseudohermitian.w_real", "imaginary part of W", 1e-3);
  suite.declare("einstein.residual", "|Ric - R g / 3|", 1e-4);
  suite.declare("einstein.branch", "constant-curvature branch and |sigma|^2 = lambda^2 - R/6", 1e-4);
  if (family) suite.declare("reduced.system", "closed-form solution in the reduced equations", 1e-8);
  const std::optional<FrameField> gauge = gauge_frame(e);
  if (gauge) suite.declare("reduced.gauge", "general equations reduce in the geodesic gauge", 1e-6);
  suite.declare("isometry.metric", "pullback of the model metric", 1e-5);
  suite.declare("isometry.form", "pullback of the model contact form", 1e-5);
  if (e.kind == ExampleKind::kRoundSphere)
    suite.declare("isometry.embedding", "round chart metric vs embedding in R^4", 1e-5);
  suite.declare("contact.constancy", "gradients of R, W and |A| over the grid", 1e-4);
  suite.declare("congruence.empirical", "optical scalars from a finite geodesic bundle", 1e-3);
  suite.declare("npp.twist_lemma", "geodesic twisting congruence: Re rho Im rho = 0 along a curve", 1e-5);

  const ContactStructure C = example_structure(e);
  ContactStructure C_fd = C;
  C_fd.alpha = C.alpha.without_derivatives();
  C_fd.g = C.g.without_derivatives();
  const FrameField frame = adapted_frame(C, diff.tol);
  const SpinCoefficientField S = SpinCoefficientField::from_frame(frame, diff);
  const VectorField reeb = reeb_vector_field(C);
  const ScalarField test_fn = random_test_function(cfg.seed);
  std::optional<SpinCoefficientField> S_gauge;
  if (gauge) S_gauge = SpinCoefficientField::from_frame(*gauge, diff);
  const Domain dom = e.domain();

  std::vector<Point> candidates =
      cfg.grid ? grid_points(*cfg.grid) : example_grid(e, 4);
  std::vector<Point> pts;

  for (const Point& p : candidates) {
    if (!dom(p)) {
      rep.violations.push_back({"grid", p, "point outside the chart domain"});
      continue;
    }
    PointResult r;
    try {
      r.dalpha = suite.timed("adapted.dalpha", [&] { return check_adapted(C, p, diff).r1; });
      r.norm = suite.timed("adapted.norm", [&] { return check_adapted(C, p, diff).r2; });
      r.dalpha_fd = suite.timed("adapted.dalpha_fd", [&] { return check_adapted(C_fd, p, diff).r1; });
      const SpinCoefficients s = suite.timed("reeb.geodesic", [&] { return S(p); });
      r.geodesic = std::abs(s.kappa);
      r.divergence = std::abs(s.rho.real());
      r.twist = std::abs(s.rho.imag() - lambda);
      r.converse = suite.timed("reeb.converse", [&] {
        const auto a = reconstructed_form_residuals(reeb, C.g, lambda, orient, {p}, diff);
        return std::max(a.r1, a.r2);
      });
      r.curve = suite.timed("geodesic.reeb_curve",
                            [&] { return geodesic_residual(C.g, reeb, {p}, diff); });
      const OpticalScalars direct = suite.timed("optical.spin_vs_direct", [&] {
        return optical_scalars_direct(reeb, C.g, p, diff, orient);
      });
      r.optical = spin_gap(direct, optical_scalars_from_spin(s));

      const ComplexTriad T = frame.complex_triad(p);
      const SpinDerivatives d = suite.timed("npp.ricci", [&] { return spin_derivatives(S, T, p, diff); });
      const FrameRicci rs = ricci_from_spin(d);
      const CurvatureAtPoint cur = suite.timed("npp.ricci", [&] { return curvature(C.g, p, diff); });
      const FrameRicci rd = project_ricci(cur.ricci, T);
      r.ricci = rs.max_difference(rd);
      r.scalar = std::abs(rs.scalar() - cur.scalar);
      r.reality = rs.reality_residual();
      const IdentityResiduals ir = identity_residuals(d);
      r.identities = std::max(std::abs(ir.i1), std::abs(ir.i2));
      const CommutatorResiduals cr = suite.timed("npp.commutators", [&] {
        return commutator_residuals(test_fn, frame, p, diff);
      });
      r.commutators = std::max(std::abs(cr.c1), std::abs(cr.c2));

      const PseudohermitianData ph = pseudohermitian(d, T, lambda);
      r.torsion = std::max(std::abs(ph.A + std::conj(s.sigma)),
                           std::abs(std::abs(ph.A) - direct.shear_modulus));
      r.relation = std::abs(scalar_relation_residual(cur.scalar, ph.W, s.sigma, lambda));
      r.w_real = std::abs(ph.W_imag);
      r.einstein = cur.einstein_residual(C.g(p));
      const BranchResult br = einstein_branch(lambda, cur.scalar, 1e-6);
      const EinsteinBranch expect =
          elliptic_branch ? EinsteinBranch::kElliptic : EinsteinBranch::kFlat;
      const double sig = std::abs(s.sigma);
      r.branch = br.branch != expect
                     ? kInf
                     : std::max(std::abs(sig * sig - lambda * lambda + cur.scalar / 6.0),
                                elliptic_branch ? sig : std::abs(sig - lambda));
      if (family) {
        r.reduced_system = suite.timed("reduced.system", [&] {
          double m = 0.0;
          for (const auto& nr : reduced_system_residual(e, p)) m = std::max(m, std::abs(nr.value));
          return m;
        });
      }
      if (gauge) {
        r.reduced_gauge = suite.timed("reduced.gauge", [&] {
          const auto dg = spin_derivatives(*S_gauge, gauge->complex_triad(p), p, diff);
          return reduced_gauge_residuals(dg).max_abs();
        });
      }
      r.R = cur.scalar;
      r.W = ph.W;
      r.sigma = sig;
    } catch (const GeometryError& err) {
      if (!recoverable(err)) throw;
      rep.violations.push_back({"grid", p, err.what()});
      continue;
    }
    pts.push_back(p);
    suite.add("adapted.dalpha", r.dalpha);
    suite.add("adapted.dalpha_fd", r.dalpha_fd);
    suite.add("adapted.norm", r.norm);
    suite.add("reeb.geodesic", r.geodesic);
    suite.add("reeb.divergence", r.divergence);
    suite.add("reeb.twist", r.twist);
    suite.add("reeb.converse", r.converse);
    suite.add("geodesic.reeb_curve", r.curve);
    suite.add("optical.spin_vs_direct", r.optical);
    suite.add("npp.ricci", r.ricci);
    suite.add("npp.scalar", r.scalar);
    suite.add("npp.reality", r.reality);
    suite.add("npp.identities", r.identities);
    suite.add("npp.commutators", r.commutators);
    suite.add("pseudohermitian.torsion", r.torsion);
    suite.add("pseudohermitian.scalar_relation", r.relation);
    suite.add("pseudohermitian.w_real", r.w_real);
    suite.add("einstein.residual", r.einstein);
    suite.add("einstein.branch", r.branch);
    if (r.reduced_system) suite.add("reduced.system", *r.reduced_system);
    if (r.reduced_gauge) suite.add("reduced.gauge", *r.reduced_gauge);
  }

  // Model isometry on its own source-chart grid.
  suite.timed("isometry.metric", [&] {
    const auto grid = isometry_grid(e, 5);
    const PullbackResidual pb = pullback_residual(e, grid, diff);
    suite.add("isometry.metric", pb.metric, static_cast<int>(grid.size()));
    suite.add("isometry.form", pb.form, static_cast<int>(grid.size()));
    return 0;
  });
  if (e.kind == ExampleKind::kRoundSphere) {
    suite.timed("isometry.embedding", [&] {
      for (const Point& p : isometry_grid(e, 5))
        suite.add("isometry.embedding", sphere_embedding_residual(lambda, p));
      return 0;
    });
  }

  suite.timed("contact.constancy", [&] {
    if (pts.size() < 8) {
      rep.findings["constancy"] = "skipped: fewer than 8 admissible grid points";
      return 0;
    }
    ScalarField R = [&](const Point& p) { return curvature(C.g, p, diff).scalar; };
    ScalarField W = [&](const Point& p) {
      return pseudohermitian(S, frame.complex_triad(p), lambda, p, diff).W;
    };
    ScalarField A = [&](const Point& p) { return std::abs(S(p).sigma); };
    std::vector<Point> sample;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 8);
    for (std::size_t i = 0; i < pts.size() && sample.size() < 8; i += stride) sample.push_back(pts[i]);
    ConstancyOptions opt;
    opt.step = 1e-2;
    opt.tol = cfg.tol ? *cfg.tol : 1e-4;
    try {
      const ConstancyReport cr = constancy_check(R, W, A, sample, dom, opt);
      const double g = std::max({cr.grad_R, cr.grad_W, cr.grad_A});
      suite.add("contact.constancy", cr.consistent() ? g : kInf, static_cast<int>(sample.size()));
      rep.findings["constancy"] = {{"grad_R", cr.grad_R}, {"grad_W", cr.grad_W},
                                   {"grad_A", cr.grad_A}, {"min_R", cr.min_R},
                                   {"min_W", cr.min_W}, {"all_constant", cr.all_constant}};
    } catch (const GeometryError& err) {
      if (!recoverable(err)) throw;
      rep.findings["constancy"] = std::string("skipped: ") + err.what();
    }
    return 0;
  });

  const Point base = e.base_point();
  suite.timed("congruence.empirical", [&] {
    EmpiricalOptions opt;
    opt.orientation = orient;
    const EmpiricalOpticalScalars emp = empirical_optical_scalars(C.g, reeb, base, opt, diff);
    const OpticalScalars fr = optical_scalars_from_spin(S(base));
    const double gap = std::max({std::abs(emp.divergence - fr.divergence),
                                 std::abs(emp.twist - fr.twist),
                                 std::abs(emp.shear - fr.shear_modulus)});
    suite.add("congruence.empirical", gap);
    rep.findings["empirical_optical_scalars"] = {
        {"divergence", emp.divergence}, {"twist", emp.twist}, {"shear", emp.shear},
        {"frame_divergence", fr.divergence}, {"frame_twist", fr.twist},
        {"frame_shear", fr.shear_modulus}};
    return 0;
  });

  suite.timed("npp.twist_lemma", [&] {
    const auto curve = integrate_field_curve(reeb, base, 0.5, 0.01, dom);
    std::vector<SpinCoefficients> along;
    for (std::size_t i = 0; i < curve.size(); i += 5) {
      try {
        along.push_back(S(curve[i]));
      } catch (const GeometryError& err) {
        if (!recoverable(err)) throw;
        break;
      }
    }
    try {
      const TwistLemmaCheck tl = geodesic_twist_lemma_check(along, 1e-5);
      suite.add("npp.twist_lemma", tl.residual, static_cast<int>(along.size()));
    } catch (const GeometryError& err) {
      if (err.kind() != ErrorKind::kNotGeodesic) throw;
      suite.add("npp.twist_lemma", kInf, static_cast<int>(along.size()));
    }
    return 0;
  });

  try {
    const SpinCoefficients s = S(base);
    const auto T = frame.complex_triad(base);
    const double R = curvature(C.g, base, diff).scalar;
    const PseudohermitianData ph = pseudohermitian(S, T, lambda, base, diff);
    const BranchResult br = einstein_branch(lambda, R, 1e-6);
    rep.findings["base_point"] = {base[0], base[1], base[2]};
    rep.findings["scalar_curvature"] = R;
    rep.findings["tanaka_webster_W"] = ph.W;
    rep.findings["W_reading_R_over_3lambda"] = R / (3.0 * lambda) + lambda;
    rep.findings["W_reading_R_over_6lambda"] = R / (6.0 * lambda) + lambda;
    rep.findings["sigma_abs"] = std::abs(s.sigma);
    rep.findings["branch"] = to_string(br.branch);
  } catch (const GeometryError& err) {
    if (!recoverable(err)) throw;
    rep.findings["base_point_error"] = err.what();
  }

  rep.checks = suite.finish();
  return rep;
}

}  // namespace npp3::cli
