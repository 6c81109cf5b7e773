#include "npp3/tensor.hpp"

#include <cmath>
#include <sstream>

namespace npp3 {

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateMetric: return "degenerate metric";
    case ErrorKind::kDomainViolation: return "domain violation";
    case ErrorKind::kFrameDrift: return "frame drift";
    case ErrorKind::kNotAdapted: return "not adapted";
    case ErrorKind::kReebVerificationFailed: return "Reeb verification failed";
    case ErrorKind::kNotGeodesic: return "not geodesic";
    case ErrorKind::kFormulaPrecondition: return "formula precondition violated";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kQuadratureFailure: return "quadrature failure";
    case ErrorKind::kSingularJacobian: return "singular Jacobian";
    case ErrorKind::kDegenerateFit: return "degenerate fit";
  }
  return "unknown";
}

std::string format_point(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ")";
  return os.str();
}

GeometryError::GeometryError(ErrorKind kind, const std::string& what)
    : std::runtime_error(to_string(kind) + ": " + what), kind_(kind) {}

GeometryError::GeometryError(ErrorKind kind, const std::string& what,
                             const Point& where)
    : std::runtime_error(to_string(kind) + ": " + what + " at " +
                         format_point(where)),
      kind_(kind),
      has_point_(true),
      point_(where) {}

void DiffConfig::validate() const {
  if (!(step.minCoeff() > 0.0) || !(second_step > 0.0) || !(spin_step > 0.0))
    throw GeometryError(ErrorKind::kInvalidArgument,
                        "finite-difference steps must be positive");
  if (max_halvings < 0)
    throw GeometryError(ErrorKind::kInvalidArgument,
                        "max_halvings must be non-negative");
}

// --- fields ----------------------------------------------------------------

MetricField::MetricField(Evaluator eval, Domain domain, FirstEvaluator d1,
                         SecondEvaluator d2)
    : eval_(std::move(eval)),
      domain_(domain ? std::move(domain) : whole_chart()),
      d1_(std::move(d1)),
      d2_(std::move(d2)) {}

MetricField MetricField::euclidean() {
  return MetricField(
      [](const Point&) { return Mat3::Identity().eval(); }, whole_chart(),
      [](const Point&) {
        return MetricFirstDerivatives{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
      },
      [](const Point&) {
        MetricSecondDerivatives z;
        for (auto& row : z)
          for (auto& m : row) m.setZero();
        return z;
      });
}

MetricField MetricField::without_derivatives() const {
  return MetricField(eval_, domain_);
}

MetricField MetricField::scaled(double c) const {
  const double c2 = c * c;
  auto e = eval_;
  FirstEvaluator d1;
  SecondEvaluator d2;
  if (d1_) {
    d1 = [f = d1_, c2](const Point& p) {
      auto d = f(p);
      for (auto& m : d) m *= c2;
      return d;
    };
  }
  if (d2_) {
    d2 = [f = d2_, c2](const Point& p) {
      auto d = f(p);
      for (auto& row : d)
        for (auto& m : row) m *= c2;
      return d;
    };
  }
  return MetricField([e, c2](const Point& p) { return (c2 * e(p)).eval(); },
                     domain_, d1, d2);
}

OneFormField::OneFormField(Evaluator eval, Domain domain, FirstEvaluator d1)
    : eval_(std::move(eval)),
      domain_(domain ? std::move(domain) : whole_chart()),
      d1_(std::move(d1)) {}

OneFormField OneFormField::without_derivatives() const {
  return OneFormField(eval_, domain_);
}

// --- two-forms ---------------------------------------------------------------

TwoForm TwoForm::from_components(double w12, double w20, double w01) {
  TwoForm t;
  t.c_ = Vec3(w12, w20, w01);
  return t;
}

TwoForm TwoForm::from_matrix(const Mat3& m) {
  return from_components(0.5 * (m(1, 2) - m(2, 1)), 0.5 * (m(2, 0) - m(0, 2)),
                         0.5 * (m(0, 1) - m(1, 0)));
}

double TwoForm::operator()(int i, int j) const {
  if (i == j) return 0.0;
  // component index k is the complement of {i, j}; sign from cyclic order
  const int k = 3 - i - j;
  const bool cyclic = (j == (i + 1) % 3);
  return cyclic ? c_[k] : -c_[k];
}

Mat3 TwoForm::matrix() const {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
  return m;
}

TwoForm TwoForm::operator-(const TwoForm& o) const {
  TwoForm t;
  t.c_ = c_ - o.c_;
  return t;
}

TwoForm TwoForm::operator*(double s) const {
  TwoForm t;
  t.c_ = c_ * s;
  return t;
}

// --- metric checks -----------------------------------------------------------

void check_spd(const Mat3& g, const Point& p, const Tolerances& tol) {
  if (!g.allFinite())
    throw GeometryError(ErrorKind::kDegenerateMetric, "non-finite metric", p);
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw GeometryError(ErrorKind::kDegenerateMetric, "metric not symmetric", p);
  Eigen::SelfAdjointEigenSolver<Mat3> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double tr = g.trace();
  if (!(tr > 0.0) || !(lo > tol.spd_relative * tr)) {
    std::ostringstream os;
    os << "smallest eigenvalue " << lo << " with trace " << tr;
    throw GeometryError(ErrorKind::kDegenerateMetric, os.str(), p);
  }
}

MetricFirstDerivatives metric_first_derivatives(const MetricField& g,
                                                const Point& p,
                                                const DiffConfig& cfg) {
  if (g.has_first_derivatives()) return g.first_evaluator()(p);
  const auto& dom = g.domain();
  auto checked = [&](const Point& q) {
    Mat3 m = g(q);
    check_spd(m, q, cfg.tol);
    return m;
  };
  MetricFirstDerivatives d;
  for (int k = 0; k < 3; ++k)
    d[k] = partial(checked, p, k, cfg.step[k], cfg.scheme, dom,
                   cfg.max_halvings);
  return d;
}

MetricSecondDerivatives metric_second_derivatives(const MetricField& g,
                                                  const Point& p,
                                                  const DiffConfig& cfg) {
  if (g.has_second_derivatives()) return g.second_evaluator()(p);
  const auto& dom = g.domain();
  auto checked = [&](const Point& q) {
    Mat3 m = g(q);
    check_spd(m, q, cfg.tol);
    return m;
  };
  MetricSecondDerivatives d;
  for (int k = 0; k < 3; ++k) {
    for (int l = k; l < 3; ++l) {
      d[k][l] = second_partial(checked, p, k, l, cfg.second_step, cfg.scheme,
                               dom, cfg.max_halvings);
      d[l][k] = d[k][l];
    }
  }
  return d;
}

// --- connection and curvature -----------------------------------------------

Vec3 ChristoffelSymbols::contract(const Vec3& u, const Vec3& w) const {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = u.dot(gamma[i] * w);
  return out;
}

double ChristoffelSymbols::symmetry_residual() const {
  double r = 0.0;
  for (const auto& m : gamma) r = std::max(r, (m - m.transpose()).cwiseAbs().maxCoeff());
  return r;
}

ChristoffelSymbols christoffel_from(const Mat3& g,
                                    const MetricFirstDerivatives& dg) {
  const Mat3 gi = g.inverse();
  // lowered[l](j, k) = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
  std::array<Mat3, 3> lowered;
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        const double v = 0.5 * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        lowered[l](j, k) = v;
        lowered[l](k, j) = v;
      }
  ChristoffelSymbols out;
  for (int i = 0; i < 3; ++i) {
    out.gamma[i].setZero();
    for (int l = 0; l < 3; ++l) out.gamma[i] += gi(i, l) * lowered[l];
  }
  return out;
}

ChristoffelSymbols christoffel(const MetricField& g, const Point& p,
                               const DiffConfig& cfg) {
  if (!g.admissible(p))
    throw GeometryError(ErrorKind::kDomainViolation, "point outside chart", p);
  const Mat3 gp = g(p);
  check_spd(gp, p, cfg.tol);
  return christoffel_from(gp, metric_first_derivatives(g, p, cfg));
}

CurvatureAtPoint curvature(const MetricField& g, const Point& p,
                           const DiffConfig& cfg) {
  if (!g.admissible(p))
    throw GeometryError(ErrorKind::kDomainViolation, "point outside chart", p);
  const Mat3 gp = g(p);
  check_spd(gp, p, cfg.tol);
  const auto d1 = metric_first_derivatives(g, p, cfg);
  const auto d2 = metric_second_derivatives(g, p, cfg);
  const auto G = christoffel_from(gp, d1);

  // Gl[m](j, k) = g_mn Gamma^n_jk
  std::array<Mat3, 3> Gl;
  for (int m = 0; m < 3; ++m) {
    Gl[m].setZero();
    for (int n = 0; n < 3; ++n) Gl[m] += gp(m, n) * G.gamma[n];
  }

  CurvatureAtPoint c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.5 * (d2[j][k](i, l) + d2[i][l](j, k) - d2[j][l](i, k) -
                            d2[i][k](j, l));
          for (int m = 0; m < 3; ++m)
            v += G.gamma[m](j, k) * Gl[m](i, l) - G.gamma[m](j, l) * Gl[m](i, k);
          c.riemann[i][j](k, l) = v;
        }

  const Mat3 gi = gp.inverse();
  c.ricci.setZero();
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
          c.ricci(j, l) += gi(i, k) * c.riemann[i][j](k, l);
  c.scalar = (gi.cwiseProduct(c.ricci)).sum();
  return c;
}

double CurvatureAtPoint::symmetry_residual() const {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double v = riemann[i][j](k, l);
          r = std::max(r, std::abs(v + riemann[j][i](k, l)));
          r = std::max(r, std::abs(v + riemann[i][j](l, k)));
          r = std::max(r, std::abs(v - riemann[k][l](i, j)));
        }
  return r;
}

double CurvatureAtPoint::bianchi_residual() const {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          r = std::max(r, std::abs(riemann[i][j](k, l) + riemann[i][k](l, j) +
                                   riemann[i][l](j, k)));
  return r;
}

double CurvatureAtPoint::einstein_residual(const Mat3& g) const {
  return (ricci - (scalar / 3.0) * g).cwiseAbs().maxCoeff();
}

double metric_compatibility_residual(const MetricField& g, const Point& p,
                                     const DiffConfig& cfg) {
  const Mat3 gp = g(p);
  const auto d1 = metric_first_derivatives(g, p, cfg);
  const auto G = christoffel(g, p, cfg);
  double r = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = d1[k](i, j);
        for (int l = 0; l < 3; ++l)
          v -= G.gamma[l](k, i) * gp(l, j) + G.gamma[l](k, j) * gp(i, l);
        r = std::max(r, std::abs(v));
      }
  return r;
}

// --- exterior calculus -------------------------------------------------------

TwoForm exterior_d(const OneFormField& alpha, const Point& p,
                   const DiffConfig& cfg) {
  if (!alpha.admissible(p))
    throw GeometryError(ErrorKind::kDomainViolation, "point outside chart", p);
  Mat3 J;  // J(i, j) = d_i alpha_j
  if (alpha.has_first_derivatives()) {
    J = alpha.first_evaluator()(p);
  } else {
    for (int i = 0; i < 3; ++i)
      J.row(i) = partial(alpha, p, i, cfg.step[i], cfg.scheme, alpha.domain(),
                         cfg.max_halvings)
                     .transpose();
  }
  return TwoForm::from_components(J(1, 2) - J(2, 1), J(2, 0) - J(0, 2),
                                  J(0, 1) - J(1, 0));
}

Vec3 exterior_d(const ScalarField& f, const Point& p, const DiffConfig& cfg,
                const Domain& dom) {
  auto g = gradient(f, p, cfg, dom);
  return Vec3(g[0], g[1], g[2]);
}

TwoForm hodge_star_oneform(const Vec3& alpha, const Mat3& g, int orientation,
                           const Tolerances& tol) {
  check_spd(g, Point::Zero(), tol);
  const double vol = orientation * std::sqrt(g.determinant());
  const Vec3 up = g.ldlt().solve(alpha);
  return TwoForm::from_components(vol * up[0], vol * up[1], vol * up[2]);
}

Vec3 hodge_star_twoform(const TwoForm& w, const Mat3& g, int orientation,
                        const Tolerances& tol) {
  check_spd(g, Point::Zero(), tol);
  const double vol = std::sqrt(g.determinant());
  // with eps^{mij} the permutation symbol, 1/2 eps^{mij} w_ij = c_m
  Vec3 c = w.components();
  return (orientation / vol) * (g * c);
}

// --- maps --------------------------------------------------------------------

Mat3 jacobian(const ChartMap& phi, const Point& p, const DiffConfig& cfg,
              const Domain& dom) {
  Mat3 J;
  for (int a = 0; a < 3; ++a)
    J.col(a) = partial(phi, p, a, cfg.step[a], cfg.scheme, dom, cfg.max_halvings);
  return J;
}

Pullback pullback_metric(const ChartMap& phi, const MetricField& target,
                         const Point& p, const DiffConfig& cfg,
                         const Domain& source_domain) {
  const Point q = phi(p);
  if (!target.admissible(q))
    throw GeometryError(ErrorKind::kDomainViolation,
                        "image point outside target chart", p);
  const Mat3 J = jacobian(phi, p, cfg, source_domain);
  Pullback out;
  out.metric = J.transpose() * target(q) * J;
  out.jacobian_determinant = J.determinant();
  out.singular_jacobian = std::abs(out.jacobian_determinant) < cfg.tol.singular_jacobian;
  return out;
}

Pullback pullback(const ChartMap& phi, const MetricField& target,
                  const OneFormField& target_form, const Point& p,
                  const DiffConfig& cfg, const Domain& source_domain) {
  Pullback out = pullback_metric(phi, target, p, cfg, source_domain);
  const Mat3 J = jacobian(phi, p, cfg, source_domain);
  out.form = J.transpose() * target_form(phi(p));
  return out;
}

}  // namespace npp3
