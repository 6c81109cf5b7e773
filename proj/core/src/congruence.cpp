#include "npp3/congruence.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace npp3 {

namespace {

struct LeftDomain {
  Point where;
};

using State = Eigen::VectorXd;

GeodesicState unpack(const State& y, double r) {
  return {y.head<3>(), y.segment<3>(3), r};
}

}  // namespace

GeodesicPath integrate_geodesic(const MetricField& g, const GeodesicState& init,
                                double r_max, double step, const DiffConfig& cfg,
                                const std::vector<Vec3>& transport) {
  if (!(step > 0.0) || !std::isfinite(r_max))
    throw GeometryError(ErrorKind::kInvalidArgument, "geodesic step must be positive");
  if (!g.admissible(init.x))
    throw GeometryError(ErrorKind::kDomainViolation, "initial point outside chart", init.x);
  const int k = static_cast<int>(transport.size());
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(r_max) / step - 1e-9)));
  const double h = r_max / n;

  auto rhs = [&](const State& y) {
    const Point x = y.head<3>();
    if (!g.admissible(x)) throw LeftDomain{x};
    ChristoffelSymbols G;
    try {
      G = christoffel(g, x, cfg);
    } catch (const GeometryError& e) {
      if (e.kind() == ErrorKind::kDomainViolation) throw LeftDomain{x};
      throw;
    }
    const Vec3 v = y.segment<3>(3);
    State d(y.size());
    d.head<3>() = v;
    d.segment<3>(3) = -G.contract(v, v);
    for (int a = 0; a < k; ++a) d.segment<3>(6 + 3 * a) = -G.contract(v, y.segment<3>(6 + 3 * a));
    return d;
  };

  State y(6 + 3 * k);
  y.head<3>() = init.x;
  y.segment<3>(3) = init.v;
  for (int a = 0; a < k; ++a) y.segment<3>(6 + 3 * a) = transport[a];

  GeodesicPath path;
  path.transported.resize(k);
  auto record = [&](const State& s, double r) {
    path.states.push_back(unpack(s, r));
    for (int a = 0; a < k; ++a) path.transported[a].push_back(s.segment<3>(6 + 3 * a));
  };
  const double e0 = init.v.dot(g(init.x) * init.v);
  record(y, init.r);
  double r = init.r;
  for (int i = 0; i < n; ++i) {
    try {
      const State k1 = rhs(y);
      const State k2 = rhs(y + 0.5 * h * k1);
      const State k3 = rhs(y + 0.5 * h * k2);
      const State k4 = rhs(y + h * k3);
      State next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!g.admissible(next.head<3>())) throw LeftDomain{next.head<3>()};
      y = std::move(next);
    } catch (const LeftDomain&) {
      path.exited_domain = true;
      break;
    }
    r += h;
    record(y, r);
    const Vec3 v = y.segment<3>(3);
    path.energy_drift = std::max(path.energy_drift, std::abs(v.dot(g(y.head<3>()) * v) - e0));
  }
  const double span = std::abs(r - init.r);
  path.drift_per_unit_r = span > 0.0 ? path.energy_drift / span : 0.0;
  path.accuracy_warning = path.energy_drift > 1e-6;
  return path;
}

std::vector<Point> integrate_field_curve(const VectorField& field, const Point& x0,
                                         double r_max, double step, const Domain& dom) {
  if (!(step > 0.0))
    throw GeometryError(ErrorKind::kInvalidArgument, "step must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(r_max) / step - 1e-9)));
  const double h = r_max / n;
  std::vector<Point> out{x0};
  Point x = x0;
  for (int i = 0; i < n; ++i) {
    const Vec3 k1 = field(x);
    const Vec3 k2 = field(x + 0.5 * h * k1);
    const Vec3 k3 = field(x + 0.5 * h * k2);
    const Vec3 k4 = field(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (dom && !dom(x)) break;
    out.push_back(x);
  }
  return out;
}

double geodesic_residual(const MetricField& g, const VectorField& Z,
                         const std::vector<Point>& pts, const DiffConfig& cfg) {
  double worst = 0.0;
  for (const Point& p : pts) {
    const auto grad = gradient(Z, p, cfg, g.domain());
    const Vec3 z = Z(p);
    Vec3 a = christoffel(g, p, cfg).contract(z, z);
    for (int j = 0; j < 3; ++j) a += z[j] * grad[j];
    worst = std::max(worst, std::sqrt(std::max(0.0, a.dot(g(p) * a))));
  }
  return worst;
}

std::vector<ConnectingSample> integrate_connecting(const ComplexOfReal& rho,
                                                   const ComplexOfReal& sigma,
                                                   cplx zeta0, double r_max,
                                                   double step) {
  if (!(step > 0.0) || !(r_max >= 0.0))
    throw GeometryError(ErrorKind::kInvalidArgument, "need step > 0 and r_max >= 0");
  const int n = std::max(1, static_cast<int>(std::ceil(r_max / step - 1e-9)));
  const double h = r_max / n;
  auto f = [&](double r, cplx z) { return -rho(r) * z - sigma(r) * std::conj(z); };
  std::vector<ConnectingSample> out{{0.0, zeta0}};
  cplx z = zeta0;
  for (int i = 0; i < n; ++i) {
    const double r = i * h;
    const cplx k1 = f(r, z);
    const cplx k2 = f(r + 0.5 * h, z + 0.5 * h * k1);
    const cplx k3 = f(r + 0.5 * h, z + 0.5 * h * k2);
    const cplx k4 = f(r + h, z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({(i + 1) * h, z});
  }
  return out;
}

Eigen::Matrix2d connecting_generator(cplx rho, cplx sigma) {
  Eigen::Matrix2d m;
  m << -rho.real() - sigma.real(), rho.imag() - sigma.imag(),
       -rho.imag() - sigma.imag(), -rho.real() + sigma.real();
  return m;
}

Eigen::Matrix2d expm2(const Eigen::Matrix2d& m) {
  const double s = 0.5 * m.trace();
  const Eigen::Matrix2d N = m - s * Eigen::Matrix2d::Identity();
  const double q = -N.determinant();  // N^2 = q I
  double c, sh;
  if (std::abs(q) < 1e-12) {
    c = 1.0 + 0.5 * q;
    sh = 1.0 + q / 6.0;
  } else if (q > 0.0) {
    const double w = std::sqrt(q);
    c = std::cosh(w);
    sh = std::sinh(w) / w;
  } else {
    const double w = std::sqrt(-q);
    c = std::cos(w);
    sh = std::sin(w) / w;
  }
  return std::exp(s) * (c * Eigen::Matrix2d::Identity() + sh * N);
}

cplx connecting_exact(cplx rho, cplx sigma, cplx zeta0, double r) {
  const Eigen::Vector2d y =
      expm2(connecting_generator(rho, sigma) * r) * Eigen::Vector2d(zeta0.real(), zeta0.imag());
  return {y[0], y[1]};
}

EllipseFit ellipse_eccentricity(const std::vector<cplx>& zeta) {
  if (zeta.size() < 16)
    throw GeometryError(ErrorKind::kInvalidArgument, "ellipse fit needs at least 16 samples");
  Eigen::MatrixXd A(zeta.size(), 3);
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    const double x = zeta[i].real(), y = zeta[i].imag();
    A.row(i) << x * x, x * y, y * y;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(zeta.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv[2] > 1e-12 * sv[0]))
    throw GeometryError(ErrorKind::kDegenerateFit, "samples do not determine an ellipse");
  const Eigen::Vector3d c = svd.solve(ones);
  Eigen::Matrix2d Q;
  Q << c[0], 0.5 * c[1], 0.5 * c[1], c[2];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q);
  const Eigen::Vector2d mu = es.eigenvalues();
  if (!(mu[0] > 0.0))
    throw GeometryError(ErrorKind::kDegenerateFit, "fitted conic is not an ellipse");
  EllipseFit fit;
  fit.semi_major = 1.0 / std::sqrt(mu[0]);
  fit.semi_minor = 1.0 / std::sqrt(mu[1]);
  const Eigen::Vector2d dir = es.eigenvectors().col(0);
  double ang = std::atan2(dir[1], dir[0]);
  ang = std::fmod(ang, std::numbers::pi);
  if (ang < 0.0) ang += std::numbers::pi;
  fit.inclination = ang;
  fit.residual = std::sqrt((A * c - ones).squaredNorm() / zeta.size());
  return fit;
}

namespace {

struct Bundle {
  GeodesicPath central;
  std::vector<GeodesicPath> neighbours;
};

Vec3 unit_at(const MetricField& g, const VectorField& e0, const Point& x) {
  const Vec3 v = e0(x);
  return v / std::sqrt(v.dot(g(x) * v));
}

Bundle make_bundle(const MetricField& g, const VectorField& e0, const Point& x0,
                   double r, double step, double eps, const EmpiricalOptions& opt,
                   const DiffConfig& cfg) {
  const Mat3 g0 = g(x0);
  const OrthonormalTriad t = gram_schmidt_triad(e0(x0), g0, x0, opt.orientation, cfg.tol);
  Bundle b;
  b.central = integrate_geodesic(g, {x0, t[0], 0.0}, r, step, cfg, {t[1], t[2]});
  if (b.central.exited_domain)
    throw GeometryError(ErrorKind::kDomainViolation, "central geodesic leaves the chart", x0);
  for (int k = 0; k < opt.neighbors; ++k) {
    const double a = 2.0 * std::numbers::pi * k / opt.neighbors;
    const Point y = x0 + eps * (std::cos(a) * t[1] + std::sin(a) * t[2]);
    if (!g.admissible(y))
      throw GeometryError(ErrorKind::kDomainViolation, "neighbour starts outside chart", y);
    GeodesicPath p = integrate_geodesic(g, {y, unit_at(g, e0, y), 0.0}, r, step, cfg);
    if (p.exited_domain)
      throw GeometryError(ErrorKind::kDomainViolation, "neighbour geodesic leaves the chart", y);
    b.neighbours.push_back(std::move(p));
  }
  return b;
}

// zeta = g(V, Z+) with V the coordinate separation at sample s.
cplx zeta_at(const MetricField& g, const Bundle& b, int k, std::size_t s, double* drift) {
  const GeodesicState& c = b.central.states[s];
  const Vec3 V = b.neighbours[k].states[s].x - c.x;
  const Mat3 gx = g(c.x);
  const CVec3 Zp = (b.central.transported[0][s].cast<cplx>() -
                    cplx(0.0, 1.0) * b.central.transported[1][s].cast<cplx>()) /
                   std::numbers::sqrt2;
  if (drift) {
    const double nv = std::sqrt(V.dot(gx * V));
    if (nv > 0.0) *drift = std::max(*drift, std::abs(V.dot(gx * c.v)) / nv);
  }
  return cplx(V.cast<cplx>().transpose() * (gx.cast<cplx>() * Zp));
}

EmpiricalOpticalScalars estimate(const MetricField& g, const VectorField& e0,
                                 const Point& x0, double eps,
                                 const EmpiricalOptions& opt, const DiffConfig& cfg) {
  const double h = opt.fd_step;
  const double step = h / opt.substeps;
  const Bundle fwd = make_bundle(g, e0, x0, 2.0 * h, step, eps, opt, cfg);
  const Bundle bwd = make_bundle(g, e0, x0, -2.0 * h, step, eps, opt, cfg);
  const std::size_t s1 = opt.substeps, s2 = 2 * opt.substeps;
  const int n = opt.neighbors;
  Eigen::MatrixXcd A(n, 2);
  Eigen::VectorXcd rhs(n);
  EmpiricalOpticalScalars out;
  for (int k = 0; k < n; ++k) {
    const cplx z0 = zeta_at(g, fwd, k, 0, nullptr);
    const cplx zp1 = zeta_at(g, fwd, k, s1, &out.orthogonality_drift);
    const cplx zp2 = zeta_at(g, fwd, k, s2, &out.orthogonality_drift);
    const cplx zm1 = zeta_at(g, bwd, k, s1, &out.orthogonality_drift);
    const cplx zm2 = zeta_at(g, bwd, k, s2, &out.orthogonality_drift);
    const cplx dz = (zm2 - 8.0 * zm1 + 8.0 * zp1 - zp2) / (12.0 * h);
    A(k, 0) = -z0;
    A(k, 1) = -std::conj(z0);
    rhs[k] = dz;
  }
  const Eigen::Vector2cd sol = A.colPivHouseholderQr().solve(rhs);
  out.rho = sol[0];
  out.sigma = sol[1];
  out.fit_residual = (A * sol - rhs).norm() / (std::sqrt(static_cast<double>(n)) * eps);
  return out;
}

void finish(EmpiricalOpticalScalars& e) {
  e.divergence = -e.rho.real();
  e.twist = e.rho.imag();
  e.shear = std::abs(e.sigma);
}

}  // namespace

EmpiricalOpticalScalars empirical_optical_scalars(const MetricField& g,
                                                  const VectorField& e0,
                                                  const Point& x0,
                                                  const EmpiricalOptions& opt,
                                                  const DiffConfig& cfg) {
  if (opt.neighbors < 3 || !(opt.epsilon > 0.0) || !(opt.fd_step > 0.0) || opt.substeps < 1)
    throw GeometryError(ErrorKind::kInvalidArgument, "invalid bundle options");
  EmpiricalOpticalScalars coarse = estimate(g, e0, x0, opt.epsilon, opt, cfg);
  if (!opt.richardson) {
    finish(coarse);
    return coarse;
  }
  const EmpiricalOpticalScalars fine = estimate(g, e0, x0, 0.5 * opt.epsilon, opt, cfg);
  EmpiricalOpticalScalars out = fine;
  out.rho = 2.0 * fine.rho - coarse.rho;
  out.sigma = 2.0 * fine.sigma - coarse.sigma;
  out.fit_residual = std::max(coarse.fit_residual, fine.fit_residual);
  out.orthogonality_drift = std::max(coarse.orthogonality_drift, fine.orthogonality_drift);
  finish(out);
  return out;
}

BundleTrajectory bundle_trajectory(const MetricField& g, const VectorField& e0,
                                   const Point& x0, double r_max, double step,
                                   const EmpiricalOptions& opt, const DiffConfig& cfg) {
  const Bundle b = make_bundle(g, e0, x0, r_max, step, opt.epsilon, opt, cfg);
  BundleTrajectory t;
  t.central = b.central.states;
  t.zeta.resize(b.neighbours.size());
  for (std::size_t k = 0; k < b.neighbours.size(); ++k)
    for (std::size_t s = 0; s < t.central.size(); ++s)
      t.zeta[k].push_back(zeta_at(g, b, static_cast<int>(k), s, nullptr));
  return t;
}

void write_trajectory_csv(std::ostream& os, const BundleTrajectory& t) {
  os << "r,x0,x1,x2,v0,v1,v2";
  for (std::size_t k = 0; k < t.zeta.size(); ++k) os << ",re_zeta_" << k << ",im_zeta_" << k;
  os << "\n";
  const auto old = os.precision(17);
  for (std::size_t s = 0; s < t.central.size(); ++s) {
    const GeodesicState& c = t.central[s];
    os << c.r << "," << c.x[0] << "," << c.x[1] << "," << c.x[2] << "," << c.v[0] << ","
       << c.v[1] << "," << c.v[2];
    for (const auto& z : t.zeta) os << "," << z[s].real() << "," << z[s].imag();
    os << "\n";
  }
  os.precision(old);
}

}  // namespace npp3
