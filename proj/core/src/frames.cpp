#include "npp3/frames.hpp"

#include <cmath>
#include <numbers>

namespace npp3 {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Rows: coefficients of Z_0, Z_+, Z_- on e_0, e_1, e_2.
const Eigen::Matrix3cd& frame_mixing() {
  static const Eigen::Matrix3cd m = [] {
    const cplx i(0.0, 1.0);
    Eigen::Matrix3cd a;
    a << 1.0, 0.0, 0.0,
         0.0, kInvSqrt2, -i * kInvSqrt2,
         0.0, kInvSqrt2, i * kInvSqrt2;
    return a;
  }();
  return m;
}

}  // namespace

double OrthonormalTriad::orthonormality_residual(const Mat3& g) const {
  double r = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      r = std::max(r, std::abs(e[a].dot(g * e[b]) - (a == b ? 1.0 : 0.0)));
  return r;
}

double OrthonormalTriad::handedness() const {
  Mat3 m;
  m << e[0], e[1], e[2];
  return m.determinant();
}

ComplexTriad ComplexTriad::from(const OrthonormalTriad& t, const Mat3& g) {
  ComplexTriad c;
  c.real = t;
  const auto& M = frame_mixing();
  for (int m = 0; m < 3; ++m) {
    c.Z[m].setZero();
    for (int a = 0; a < 3; ++a) c.Z[m] += M(m, a) * t[a].cast<cplx>();
  }
  const Eigen::Matrix3cd gc = g.cast<cplx>();
  // theta^0 = g(Z_0, .), theta^+ = g(Z_-, .), theta^- = g(Z_+, .)
  c.theta[k0] = gc * c.Z[k0];
  c.theta[kPlus] = gc * c.Z[kMinus];
  c.theta[kMinus] = gc * c.Z[kPlus];
  return c;
}

double ComplexTriad::duality_residual() const {
  double r = 0.0;
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      r = std::max(r, std::abs(theta[m].dot(Z[n].conjugate()) - cplx(m == n ? 1.0 : 0.0)));
  return r;
}

OrthonormalTriad gram_schmidt_triad(const Vec3& candidate, const Mat3& g,
                                    const Point& p, int orientation,
                                    const Tolerances& tol) {
  check_spd(g, p, tol);
  const double n0 = std::sqrt(candidate.dot(g * candidate));
  if (!(n0 > 0.0) || !std::isfinite(n0))
    throw GeometryError(ErrorKind::kInvalidArgument,
                        "zero candidate vector for e0", p);
  OrthonormalTriad t;
  t[0] = candidate / n0;
  int filled = 1;
  for (int k = 0; k < 3 && filled < 3; ++k) {
    Vec3 w = Vec3::Unit(k);
    for (int b = 0; b < filled; ++b) w -= w.dot(g * t[b]) * t[b];
    const double n = std::sqrt(std::max(0.0, w.dot(g * w)));
    if (n < tol.gram_schmidt_skip) continue;
    t[filled++] = w / n;
  }
  if (t.handedness() * orientation < 0.0) t[2] = -t[2];
  return t;
}

FrameField::FrameField(MetricField g, TriadFn triad)
    : g_(std::move(g)), triad_(std::move(triad)) {}

ComplexTriad FrameField::complex_triad(const Point& p) const {
  return ComplexTriad::from(triad_(p), g_(p));
}

FrameField gram_schmidt_frame(const MetricField& g, VectorField e0_candidate,
                              int orientation, Tolerances tol) {
  return FrameField(g, [g, e0 = std::move(e0_candidate), orientation,
                        tol](const Point& p) {
    return gram_schmidt_triad(e0(p), g(p), p, orientation, tol);
  });
}

FrameField rotate_frame(const FrameField& frame, ScalarField phase) {
  return FrameField(frame.metric(), [frame, phase = std::move(phase)](const Point& p) {
    OrthonormalTriad t = frame.triad(p);
    const double c = std::cos(phase(p));
    const double s = std::sin(phase(p));
    const Vec3 e1 = c * t[1] + s * t[2];
    const Vec3 e2 = -s * t[1] + c * t[2];
    t[1] = e1;
    t[2] = e2;
    return t;
  });
}

FrameField rotate_frame(const FrameField& frame, double phase) {
  return rotate_frame(frame, [phase](const Point&) { return phase; });
}

// --- spin coefficients -------------------------------------------------------

void SpinCoefficients::refresh_named() {
  rho = table[kPlus][k0][kMinus];
  sigma = table[kPlus][k0][kPlus];
  tau = table[kPlus][kMinus][kMinus];
  kappa = table[kPlus][k0][k0];
  epsilon = table[kPlus][kMinus][k0];
}

std::array<Mat3, 3> rotation_coefficients(const FrameField& frame,
                                          const Point& p, const DiffConfig& cfg,
                                          double* frame_residual) {
  const MetricField& g = frame.metric();
  if (!g.admissible(p))
    throw GeometryError(ErrorKind::kDomainViolation, "point outside chart", p);
  double worst = 0.0;
  // Columns are the lowered frame vectors g(e_a, .), re-derived at each point.
  auto lowered = [&](const Point& q) {
    const Mat3 gq = g(q);
    const OrthonormalTriad t = frame.triad(q);
    worst = std::max(worst, t.orthonormality_residual(gq));
    Mat3 L;
    for (int a = 0; a < 3; ++a) L.col(a) = gq * t[a];
    return L;
  };
  const Mat3 L = lowered(p);
  const OrthonormalTriad t = frame.triad(p);
  std::array<Mat3, 3> dL;  // dL[j](i, a) = d_j e_{a i}
  for (int j = 0; j < 3; ++j)
    dL[j] = partial(lowered, p, j, cfg.step[j], cfg.scheme, g.domain(),
                    cfg.max_halvings);
  if (worst > cfg.tol.frame_drift)
    throw GeometryError(ErrorKind::kFrameDrift,
                        "frame not orthonormal on stencil (residual " +
                            std::to_string(worst) + ")",
                        p);
  if (frame_residual) *frame_residual = worst;

  const auto G = christoffel(g, p, cfg);
  // nab[a](i, j) = nabla_j e_{a i}
  std::array<Mat3, 3> nab;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = dL[j](i, a);
        for (int k = 0; k < 3; ++k) v -= G.gamma[k](j, i) * L(k, a);
        nab[a](i, j) = v;
      }
  std::array<Mat3, 3> out;  // out[a](b, c)
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) out[a](b, c) = t[b].dot(nab[a] * t[c]);
  return out;
}

SpinCoefficients spin_coefficients(const FrameField& frame, const Point& p,
                                   const DiffConfig& cfg) {
  SpinCoefficients s;
  const auto R = rotation_coefficients(frame, p, cfg, &s.frame_residual);
  const auto& M = frame_mixing();
  std::array<std::array<std::array<cplx, 3>, 3>, 3> raw{};
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      for (int q = 0; q < 3; ++q) {
        cplx v = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) v += M(m, a) * M(n, b) * M(q, c) * R[a](b, c);
        raw[m][n][q] = v;
      }
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      for (int q = 0; q < 3; ++q) {
        s.antisymmetry_residual =
            std::max(s.antisymmetry_residual, std::abs(raw[m][n][q] + raw[n][m][q]));
        s.table[m][n][q] = 0.5 * (raw[m][n][q] - raw[n][m][q]);
      }
  s.refresh_named();
  return s;
}

// --- optical scalars ---------------------------------------------------------

OpticalScalars optical_scalars_direct(const VectorField& e0,
                                      const MetricField& g, const Point& p,
                                      const DiffConfig& cfg, int orientation) {
  auto unit = [&](const Point& q) {
    const Mat3 gq = g(q);
    const Vec3 v = e0(q);
    return Vec3(v / std::sqrt(v.dot(gq * v)));
  };
  auto lowered = [&](const Point& q) { return Vec3(g(q) * unit(q)); };
  const Mat3 gp = g(p);
  check_spd(gp, p, cfg.tol);
  const Mat3 gi = gp.inverse();
  const Vec3 u = unit(p);
  const Vec3 ul = gp * u;
  const auto G = christoffel(g, p, cfg);
  Mat3 T;  // T(i, j) = nabla_i e0_j
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = partial(lowered, p, i, cfg.step[i], cfg.scheme, g.domain(),
                           cfg.max_halvings);
    for (int j = 0; j < 3; ++j) {
      double v = d[j];
      for (int k = 0; k < 3; ++k) v -= G.gamma[k](i, j) * ul[k];
      T(i, j) = v;
    }
  }
  const Mat3 Tup = gi * T * gi;  // nabla^i e0^j
  const double div = (gi.cwiseProduct(T)).sum();
  const Mat3 A = T - T.transpose();
  const Mat3 S = 0.5 * (T + T.transpose());
  double twist_rad = (A.cwiseProduct(Tup)).sum();
  double shear_rad = (S.cwiseProduct(Tup)).sum() - 0.5 * div * div;

  OpticalScalars out;
  auto clamp = [&](double r) {
    if (r < -cfg.tol.radicand) out.precondition_violated = true;
    return std::max(0.0, r);
  };
  out.divergence = 0.5 * div;
  out.twist = 0.5 * std::sqrt(clamp(twist_rad));
  out.shear_modulus = kInvSqrt2 * std::sqrt(clamp(shear_rad));
  const Vec3 acc = T.transpose() * u;  // e0^i nabla_i e0_j
  out.geodesic_residual = std::sqrt(std::max(0.0, acc.dot(gi * acc)));

  const auto frame = ComplexTriad::from(gram_schmidt_triad(u, gp, p, orientation, cfg.tol), gp);
  // sigma = gamma_{+0+} = -(nabla_j e0_i) Z+^i Z+^j
  const CVec3& zp = frame.Z[kPlus];
  const cplx sigma = -(zp.transpose() * T.cast<cplx>() * zp)(0, 0);
  out.shear_phase = 0.5 * std::arg(sigma);
  return out;
}

OpticalScalars optical_scalars_from_spin(const SpinCoefficients& s) {
  OpticalScalars o;
  o.divergence = -s.rho.real();
  o.twist = s.rho.imag();
  o.shear_modulus = std::abs(s.sigma);
  o.shear_phase = 0.5 * std::arg(s.sigma);
  o.geodesic_residual = std::abs(s.kappa);
  return o;
}

// --- directional operators ---------------------------------------------------

Directional directional(const ScalarField& f, const ComplexTriad& t,
                        const Point& p, const DiffConfig& cfg,
                        const Domain& dom) {
  const auto gr = gradient(f, p, cfg, dom);
  const CVec3 d(gr[0], gr[1], gr[2]);
  return {cplx(t.Z[k0].transpose() * d), cplx(t.Z[kPlus].transpose() * d),
          cplx(t.Z[kMinus].transpose() * d)};
}

Directional directional(const ComplexField& f, const ComplexTriad& t,
                        const Point& p, const DiffConfig& cfg,
                        const Domain& dom) {
  const auto gr = gradient(f, p, cfg, dom);
  const CVec3 d(gr[0], gr[1], gr[2]);
  return {cplx(t.Z[k0].transpose() * d), cplx(t.Z[kPlus].transpose() * d),
          cplx(t.Z[kMinus].transpose() * d)};
}

CommutatorResiduals commutator_residuals(const ScalarField& f,
                                         const FrameField& frame,
                                         const Point& p,
                                         const DiffConfig& cfg) {
  const Domain& dom = frame.domain();
  const SpinCoefficients s = spin_coefficients(frame, p, cfg);
  // (Df, delta f, delta-bar f) as a field, frame re-derived pointwise.
  auto ops = [&](const Point& q) {
    const Directional d = directional(f, frame.complex_triad(q), q, cfg, dom);
    return CVec3(d.D, d.delta, d.delta_bar);
  };
  const auto grad = nested_gradient(ops, p, cfg, dom);
  const ComplexTriad t = frame.complex_triad(p);
  // apply(m, n) = Z_m applied to the field (Z_n f)
  auto apply = [&](int m, int n) {
    cplx v = 0.0;
    for (int i = 0; i < 3; ++i) v += t.Z[m][i] * grad[i][n];
    return v;
  };
  const CVec3 f0 = ops(p);
  const cplx Df = f0[0], df = f0[1], dbf = f0[2];
  CommutatorResiduals r;
  r.c1 = (apply(k0, kPlus) - apply(kPlus, k0)) -
         ((std::conj(s.rho) + s.epsilon) * df + s.sigma * dbf + s.kappa * Df);
  r.c2 = (apply(kPlus, kMinus) - apply(kMinus, kPlus)) -
         (std::conj(s.tau) * dbf - s.tau * df + (std::conj(s.rho) - s.rho) * Df);
  return r;
}

}  // namespace npp3
