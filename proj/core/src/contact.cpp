#include "npp3/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace npp3 {

AdaptedResiduals check_adapted(const ContactStructure& c, const Point& p,
                               const DiffConfig& cfg) {
  if (!c.g.admissible(p) || !c.alpha.admissible(p))
    throw GeometryError(ErrorKind::kDomainViolation, "point outside chart", p);
  const Mat3 g = c.g(p);
  check_spd(g, p, cfg.tol);
  const Vec3 a = c.alpha(p);
  const TwoForm da = exterior_d(c.alpha, p, cfg);
  const TwoForm star = hodge_star_oneform(a, g, c.orientation, cfg.tol);
  AdaptedResiduals r;
  r.r1 = (da - star * (2.0 * c.lambda)).max_abs();
  r.r2 = std::abs(std::sqrt(a.dot(g.inverse() * a)) - 1.0);
  return r;
}

Vec3 reeb_field(const ContactStructure& c, const Point& p,
                const DiffConfig& cfg) {
  const AdaptedResiduals r = check_adapted(c, p, cfg);
  if (!r.within(cfg.tol.adapted))
    throw GeometryError(ErrorKind::kNotAdapted,
                        "structure not adapted (r1 = " + std::to_string(r.r1) +
                            ", r2 = " + std::to_string(r.r2) + ")",
                        p);
  const Vec3 a = c.alpha(p);
  const Vec3 z = c.g(p).inverse() * a;
  const double norm_err = std::abs(a.dot(z) - 1.0);
  const double contraction = (exterior_d(c.alpha, p, cfg).matrix().transpose() * z)
                                 .cwiseAbs()
                                 .maxCoeff();
  if (norm_err > cfg.tol.reeb || contraction > cfg.tol.reeb)
    throw GeometryError(ErrorKind::kReebVerificationFailed,
                        "alpha(Z0) - 1 = " + std::to_string(norm_err) +
                            ", |d alpha(Z0, .)| = " + std::to_string(contraction),
                        p);
  return z;
}

VectorField reeb_vector_field(const ContactStructure& c) {
  return [alpha = c.alpha, g = c.g](const Point& p) {
    return Vec3(g(p).ldlt().solve(alpha(p)));
  };
}

FrameField adapted_frame(const ContactStructure& c, Tolerances tol) {
  return gram_schmidt_frame(c.g, reeb_vector_field(c), c.orientation, tol);
}

PseudohermitianData pseudohermitian(const SpinDerivatives& d,
                                    const ComplexTriad& T, double lambda) {
  if (!(lambda > 0.0))
    throw GeometryError(ErrorKind::kInvalidArgument, "lambda must be positive");
  const cplx r = d.value[kRho], s = d.value[kSigma], t = d.value[kTau],
             e = d.value[kEpsilon];
  const cplx dt = d.delta[kTau];
  const cplx core = dt + std::conj(dt) - 2.0 * t * std::conj(t) + 2.0 * lambda * lambda;
  const cplx w = (core + e * (r - std::conj(r))) / (2.0 * lambda);
  PseudohermitianData out;
  out.A = -std::conj(s);
  out.W = w.real();
  out.W_imag = w.imag();
  out.W_epsilon_free = core.real() / (2.0 * lambda);
  out.omega = {e + std::conj(r), -std::conj(t), t};
  out.omega_coordinates = out.omega[0] * T.theta[k0] + out.omega[1] * T.theta[kPlus] +
                          out.omega[2] * T.theta[kMinus];
  return out;
}

PseudohermitianData pseudohermitian(const SpinCoefficientField& S,
                                    const ComplexTriad& T, double lambda,
                                    const Point& p, const DiffConfig& cfg) {
  return pseudohermitian(spin_derivatives(S, T, p, cfg), T, lambda);
}

double scalar_relation_residual(double R, double W, cplx sigma, double lambda) {
  return 0.5 * R - 2.0 * lambda * W + lambda * lambda + std::norm(sigma);
}

ConstancyReport constancy_check(const ScalarField& R, const ScalarField& W,
                                const ScalarField& absA,
                                const std::vector<Point>& grid,
                                const Domain& dom,
                                const ConstancyOptions& opt) {
  if (grid.size() < 8)
    throw GeometryError(ErrorKind::kInvalidArgument,
                        "constancy check needs at least 8 grid points");
  ConstancyReport rep;
  rep.min_R = rep.min_W = std::numeric_limits<double>::infinity();
  auto grad_norm = [&](const ScalarField& f, const Point& p) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = partial(f, p, i, opt.step, opt.scheme, dom);
      s += d * d;
    }
    return std::sqrt(s);
  };
  for (const Point& p : grid) {
    rep.grad_R = std::max(rep.grad_R, grad_norm(R, p));
    rep.grad_W = std::max(rep.grad_W, grad_norm(W, p));
    rep.grad_A = std::max(rep.grad_A, grad_norm(absA, p));
    rep.min_R = std::min(rep.min_R, R(p));
    rep.min_W = std::min(rep.min_W, W(p));
  }
  const std::array<double, 3> g = {rep.grad_R, rep.grad_W, rep.grad_A};
  for (int i = 0; i < 3; ++i) {
    const double a = g[(i + 1) % 3], b = g[(i + 2) % 3];
    if (a < opt.tol && b < opt.tol && !(g[i] < opt.factor * opt.tol))
      rep.implication_holds = false;
  }
  rep.all_constant = g[0] < opt.tol && g[1] < opt.tol && g[2] < opt.tol;
  if (rep.min_R > 0.0 && !(rep.min_W > 0.0)) rep.positivity_holds = false;
  return rep;
}

CongruenceProperties reeb_congruence_properties(const ContactStructure& c,
                                                const std::vector<Point>& pts,
                                                const DiffConfig& cfg) {
  const FrameField frame = adapted_frame(c, cfg.tol);
  CongruenceProperties out;
  for (const Point& p : pts) {
    const SpinCoefficients s = spin_coefficients(frame, p, cfg);
    out.geodesic = std::max(out.geodesic, std::abs(s.kappa));
    out.divergence = std::max(out.divergence, std::abs(s.rho.real()));
    out.twist_error = std::max(out.twist_error, std::abs(s.rho.imag() - c.lambda));
  }
  return out;
}

AdaptedResiduals reconstructed_form_residuals(const VectorField& e0,
                                              const MetricField& g,
                                              double lambda, int orientation,
                                              const std::vector<Point>& pts,
                                              const DiffConfig& cfg) {
  OneFormField alpha(
      [e0, g](const Point& p) {
        const Mat3 m = g(p);
        const Vec3 v = e0(p);
        return Vec3(m * v / std::sqrt(v.dot(m * v)));
      },
      g.domain());
  const ContactStructure c{alpha, lambda, g, orientation};
  AdaptedResiduals worst;
  for (const Point& p : pts) {
    const AdaptedResiduals r = check_adapted(c, p, cfg);
    worst.r1 = std::max(worst.r1, r.r1);
    worst.r2 = std::max(worst.r2, r.r2);
  }
  return worst;
}

double estimate_lambda(const OneFormField& alpha, const MetricField& g,
                       int orientation, const Point& p, const DiffConfig& cfg) {
  const ContactStructure c{alpha, 1.0, g, orientation};
  return spin_coefficients(adapted_frame(c, cfg.tol), p, cfg).rho.imag();
}

}  // namespace npp3
