#include "npp3/npp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace npp3 {

namespace {

using C5 = Eigen::Matrix<cplx, 5, 1>;

cplx bar(cplx z) { return std::conj(z); }

double worst(const std::array<cplx, 6>& a, const std::array<cplx, 6>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

std::array<cplx, 6> as_array(const FrameRicci& f) {
  return {f.R00, f.Rpp, f.R0p, f.R0m, f.Rpm, f.half_scalar};
}

cplx evaluate(const Equation& e) {
  const auto& flips = sign_corrections();
  cplx s = 0.0;
  for (const Term& t : e.terms) {
    const bool flip = std::find(flips.begin(), flips.end(), e.name + ":" + t.label) != flips.end();
    s += (flip ? -t.coefficient : t.coefficient) * t.value;
  }
  return s;
}

}  // namespace

double FrameRicci::reality_residual() const {
  return std::max({std::abs(R00.imag()), std::abs(Rpm.imag()),
                   std::abs(half_scalar.imag())});
}

double FrameRicci::max_difference(const FrameRicci& o) const {
  return worst(as_array(*this), as_array(o));
}

SpinCoefficientField::SpinCoefficientField(Evaluator eval, TriadFn triad,
                                           Domain domain)
    : eval_(std::move(eval)), triad_(std::move(triad)), domain_(std::move(domain)) {}

SpinCoefficientField SpinCoefficientField::from_frame(const FrameField& frame,
                                                      const DiffConfig& cfg) {
  return SpinCoefficientField(
      [frame, cfg](const Point& p) { return spin_coefficients(frame, p, cfg); },
      [frame](const Point& p) { return frame.complex_triad(p); },
      frame.domain());
}

SpinDerivatives spin_derivatives(const SpinCoefficientField& S,
                                 const ComplexTriad& T, const Point& p,
                                 const DiffConfig& cfg) {
  auto named = [&](const Point& q) {
    const SpinCoefficients s = S(q);
    C5 v;
    v << s.kappa, s.rho, s.sigma, s.tau, s.epsilon;
    return v;
  };
  SpinDerivatives d;
  const C5 v0 = named(p);
  const auto grad = nested_gradient(named, p, cfg, S.domain());
  for (int c = 0; c < 5; ++c) {
    d.value[c] = v0[c];
    for (int i = 0; i < 3; ++i) {
      d.D[c] += T.Z[k0][i] * grad[i][c];
      d.delta[c] += T.Z[kPlus][i] * grad[i][c];
      d.delta_bar[c] += T.Z[kMinus][i] * grad[i][c];
    }
  }
  return d;
}

cplx Equation::sum() const {
  cplx s = 0.0;
  for (const Term& t : terms) s += t.coefficient * t.value;
  return s;
}

cplx Equation::sum_flipped(std::size_t term) const {
  return sum() - 2.0 * terms.at(term).coefficient * terms.at(term).value;
}

std::vector<Equation> printed_equations(const SpinDerivatives& d) {
  const cplx k = d.value[kKappa], r = d.value[kRho], s = d.value[kSigma],
             t = d.value[kTau], e = d.value[kEpsilon];
  const cplx kb = bar(k), rb = bar(r), sb = bar(s), tb = bar(t);
  // Derivatives of conjugates: D is real, delta-bar is the conjugate of delta.
  const cplx Dr = d.D[kRho], Drb = bar(d.D[kRho]);
  const cplx Ds = d.D[kSigma], Dt = d.D[kTau];
  const cplx dk = d.delta[kKappa], dbk = d.delta_bar[kKappa], dkb = bar(dbk);
  const cplx dr = d.delta[kRho], dbrb = bar(dr);
  const cplx dbs = d.delta_bar[kSigma], dsb = bar(dbs);
  const cplx dt = d.delta[kTau], dbtb = bar(dt);
  const cplx dbe = d.delta_bar[kEpsilon];

  std::vector<Equation> eq;
  eq.push_back({"R00",
                {{"D rho", 1, Dr},
                 {"D rho-bar", 1, Drb},
                 {"delta-bar kappa", -1, dbk},
                 {"delta kappa-bar", -1, dkb},
                 {"tau kappa", 1, t * k},
                 {"tau-bar kappa-bar", 1, tb * kb},
                 {"kappa kappa-bar", -2, k * kb},
                 {"sigma sigma-bar", -2, s * sb},
                 {"rho^2", -1, r * r},
                 {"rho-bar^2", -1, rb * rb}}});
  eq.push_back({"R++",
                {{"delta kappa", -1, dk},
                 {"D sigma", 1, Ds},
                 {"epsilon sigma", -2, e * s},
                 {"tau-bar kappa", -1, tb * k},
                 {"kappa^2", -1, k * k},
                 {"sigma rho-bar", -1, s * rb},
                 {"rho sigma", -1, r * s}}});
  eq.push_back({"R0+",
                {{"delta-bar sigma", -1, dbs},
                 {"delta rho", 1, dr},
                 {"tau sigma", 2, t * s},
                 {"kappa rho", 1, k * r},
                 {"kappa rho-bar", -1, k * rb}}});
  eq.push_back({"R0-",
                {{"delta-bar epsilon", -1, dbe},
                 {"D tau", 1, Dt},
                 {"kappa sigma-bar", 1, k * sb},
                 {"rho kappa-bar", -1, r * kb},
                 {"epsilon tau", 1, e * t},
                 {"epsilon kappa-bar", -1, e * kb},
                 {"tau-bar sigma-bar", 1, tb * sb},
                 {"tau rho", -1, t * r}}});
  eq.push_back({"R+-",
                {{"delta-bar kappa", -1, dbk},
                 {"D rho", 1, Dr},
                 {"delta tau", 1, dt},
                 {"delta-bar tau-bar", 1, dbtb},
                 {"epsilon rho", 1, e * r},
                 {"epsilon rho-bar", -1, e * rb},
                 {"kappa kappa-bar", -1, k * kb},
                 {"kappa tau", 1, k * t},
                 {"rho rho-bar", -1, r * rb},
                 {"rho^2", -1, r * r},
                 {"tau tau-bar", -2, t * tb}}});
  eq.push_back({"R/2",
                {{"delta kappa-bar", -2, dkb},
                 {"D rho-bar", 2, Drb},
                 {"delta tau", 1, dt},
                 {"delta-bar tau-bar", 1, dbtb},
                 {"kappa kappa-bar", -2, k * kb},
                 {"kappa-bar tau-bar", 2, kb * tb},
                 {"rho-bar^2", -2, rb * rb},
                 {"sigma sigma-bar", -1, s * sb},
                 {"epsilon rho", 1, e * r},
                 {"epsilon rho-bar", -1, e * rb},
                 {"rho rho-bar", -1, r * rb},
                 {"tau tau-bar", -2, t * tb}}});
  eq.push_back({"identity1",
                {{"D rho", 1, Dr},
                 {"delta-bar kappa", -1, dbk},
                 {"kappa tau", 1, k * t},
                 {"rho^2", -1, r * r},
                 {"D rho-bar", -1, Drb},
                 {"delta kappa-bar", 1, dkb},
                 {"kappa-bar tau-bar", -1, kb * tb},
                 {"rho-bar^2", 1, rb * rb}}});
  eq.push_back({"identity2",
                {{"delta sigma-bar", 1, dsb},
                 {"delta-bar rho-bar", -1, dbrb},
                 {"tau-bar sigma-bar", -1, tb * sb},
                 {"kappa-bar rho-bar", -1, kb * rb},
                 {"delta-bar epsilon", -1, dbe},
                 {"D tau", 1, Dt},
                 {"kappa sigma-bar", 1, k * sb},
                 {"epsilon tau", 1, e * t},
                 {"epsilon kappa-bar", -1, e * kb},
                 {"tau rho", -1, t * r}}});
  return eq;
}

FrameRicci ricci_from_spin(const SpinDerivatives& d) {
  const auto eq = printed_equations(d);
  FrameRicci f;
  f.R00 = evaluate(eq[0]);
  f.Rpp = evaluate(eq[1]);
  f.R0p = evaluate(eq[2]);
  f.R0m = evaluate(eq[3]);
  f.Rpm = evaluate(eq[4]);
  f.half_scalar = evaluate(eq[5]);
  return f;
}

FrameRicci ricci_from_spin(const SpinCoefficientField& S, const ComplexTriad& T,
                           const Point& p, const DiffConfig& cfg) {
  return ricci_from_spin(spin_derivatives(S, T, p, cfg));
}

FrameRicci project_ricci(const Mat3& ricci, const ComplexTriad& T) {
  const Eigen::Matrix3cd R = ricci.cast<cplx>();
  auto c = [&](int m, int n) { return cplx(T.Z[m].transpose() * R * T.Z[n]); };
  FrameRicci f;
  f.R00 = c(k0, k0);
  f.Rpp = c(kPlus, kPlus);
  f.R0p = c(k0, kPlus);
  f.R0m = c(k0, kMinus);
  f.Rpm = c(kPlus, kMinus);
  f.half_scalar = 0.5 * (f.R00 + 2.0 * f.Rpm);
  return f;
}

FrameRicci direct_frame_ricci(const MetricField& g, const ComplexTriad& T,
                              const Point& p, const DiffConfig& cfg) {
  return project_ricci(curvature(g, p, cfg).ricci, T);
}

IdentityResiduals identity_residuals(const SpinDerivatives& d) {
  const auto eq = printed_equations(d);
  return {evaluate(eq[6]), evaluate(eq[7])};
}

IdentityResiduals identity_residuals(const SpinCoefficientField& S,
                                     const ComplexTriad& T, const Point& p,
                                     const DiffConfig& cfg) {
  return identity_residuals(spin_derivatives(S, T, p, cfg));
}

double ReducedGaugeResiduals::max_abs() const {
  double r = 0.0;
  for (const cplx& z : difference) r = std::max(r, std::abs(z));
  return r;
}

ReducedGaugeResiduals reduced_gauge_residuals(const SpinDerivatives& d) {
  const auto eq = printed_equations(d);
  const cplx r = d.value[kRho], s = d.value[kSigma], t = d.value[kTau];
  const cplx sb = bar(s), tb = bar(t);
  const cplx dt = d.delta[kTau], dbtb = bar(dt);
  const cplx dbs = d.delta_bar[kSigma], dsb = bar(dbs);
  const cplx Ds = d.D[kSigma], Dt = d.D[kTau];
  const std::array<cplx, 7> reduced = {
      -2.0 * s * sb - 2.0 * r * r,
      Ds,
      -dbs + 2.0 * t * s,
      Dt + tb * sb - t * r,
      dt + dbtb - 2.0 * t * tb,
      dt + dbtb - r * r - s * sb - 2.0 * t * tb,
      // identity 2 as LHS - RHS
      dsb - tb * sb + Dt - t * r,
  };
  ReducedGaugeResiduals out;
  const std::array<int, 7> general = {0, 1, 2, 3, 4, 5, 7};
  for (int i = 0; i < 7; ++i) out.difference[i] = evaluate(eq[general[i]]) - reduced[i];
  return out;
}

TwistLemmaCheck geodesic_twist_lemma_check(
    const std::vector<SpinCoefficients>& along_curve, double tol) {
  if (along_curve.empty())
    throw GeometryError(ErrorKind::kInvalidArgument, "no samples along the curve");
  TwistLemmaCheck c;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const SpinCoefficients& s : along_curve) {
    if (std::abs(s.kappa) > tol)
      throw GeometryError(ErrorKind::kNotGeodesic,
                          "kappa = " + std::to_string(std::abs(s.kappa)) +
                              " along the curve");
    c.residual = std::max(c.residual, std::abs(s.rho.real() * s.rho.imag()));
    c.max_divergence = std::max(c.max_divergence, std::abs(s.rho.real()));
    lo = std::min(lo, s.rho.imag());
    hi = std::max(hi, s.rho.imag());
  }
  c.twist_variation = hi - lo;
  c.violation = c.residual > tol;
  return c;
}

bool DiscrepancyReport::consistent() const {
  if (!required_flips.empty()) return false;
  for (const auto& a : agreement)
    if (!(a.max_residual < tolerance)) return false;
  return true;
}

std::string DiscrepancyReport::to_text() const {
  std::ostringstream os;
  os << "samples " << samples << ", tolerance " << tolerance << "\n";
  for (const auto& a : agreement)
    os << "  " << a.equation << "  max residual " << a.max_residual
       << (a.max_residual < tolerance ? "  ok" : "  MISMATCH") << "\n";
  os << "  trace R/2 vs (R00 + 2 R+-)/2  " << trace_identity_residual << "\n";
  if (required_flips.empty()) {
    os << "  sign flips required: none\n";
  } else {
    for (const auto& f : required_flips)
      os << "  flip " << f.equation << " : " << f.printed_coefficient << " "
         << f.term << " (fixes " << f.samples_fixed << " samples)\n";
  }
  return os.str();
}

DiscrepancyReport discrepancy_report(const std::vector<DiscrepancySample>& samples,
                                     const DiffConfig& cfg, double tol) {
  DiscrepancyReport rep;
  rep.samples = static_cast<int>(samples.size());
  rep.tolerance = tol;
  std::vector<std::vector<Equation>> eqs;
  std::vector<std::array<cplx, 8>> target;
  for (const auto& s : samples) {
    const ComplexTriad T = s.spin.triad(s.point);
    const SpinDerivatives d = spin_derivatives(s.spin, T, s.point, cfg);
    eqs.push_back(printed_equations(d));
    const FrameRicci o = direct_frame_ricci(s.metric, T, s.point, cfg);
    target.push_back({o.R00, o.Rpp, o.R0p, o.R0m, o.Rpm, o.half_scalar, 0.0, 0.0});
    const FrameRicci v = ricci_from_spin(d);
    rep.trace_identity_residual = std::max(
        rep.trace_identity_residual, std::abs(v.half_scalar - 0.5 * (v.R00 + 2.0 * v.Rpm)));
  }
  if (samples.empty()) return rep;
  const std::size_t n_eq = eqs.front().size();
  for (std::size_t e = 0; e < n_eq; ++e) {
    double max_res = 0.0;
    std::vector<bool> failing(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double r = std::abs(evaluate(eqs[k][e]) - target[k][e]);
      failing[k] = r >= tol;
      max_res = std::max(max_res, r);
    }
    rep.agreement.push_back({eqs.front()[e].name, max_res});
    if (max_res < tol) continue;
    for (std::size_t t = 0; t < eqs.front()[e].terms.size(); ++t) {
      int fixed = 0;
      bool all = true;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const Term& term = eqs[k][e].terms[t];
        const double r = std::abs(evaluate(eqs[k][e]) - 2.0 * term.coefficient * term.value -
                                  target[k][e]);
        if (r < tol) {
          if (failing[k]) ++fixed;
        } else {
          all = false;
        }
      }
      if (all && fixed > 0)
        rep.required_flips.push_back({eqs.front()[e].name, eqs.front()[e].terms[t].label,
                                      eqs.front()[e].terms[t].coefficient, fixed});
    }
  }
  return rep;
}

}  // namespace npp3
