#pragma once

#include <array>
#include <string>
#include <vector>

#include "npp3/frames.hpp"

namespace npp3 {

// Frame components of the Ricci tensor. R00, R+- and the scalar are real for
// an exact computation; the imaginary parts are kept as a diagnostic.
struct FrameRicci {
  cplx R00, Rpp, R0p, R0m, Rpm;
  cplx half_scalar;

  double scalar() const { return 2.0 * half_scalar.real(); }
  double reality_residual() const;
  // Largest componentwise difference, the scalar compared through R/2.
  double max_difference(const FrameRicci& o) const;
};

// Spin coefficients as functions on a chart region, each evaluation carrying
// the triad it was computed in.
class SpinCoefficientField {
 public:
  using Evaluator = std::function<SpinCoefficients(const Point&)>;
  using TriadFn = std::function<ComplexTriad(const Point&)>;

  SpinCoefficientField(Evaluator eval, TriadFn triad, Domain domain);
  static SpinCoefficientField from_frame(const FrameField& frame,
                                         const DiffConfig& cfg);

  SpinCoefficients operator()(const Point& p) const { return eval_(p); }
  ComplexTriad triad(const Point& p) const { return triad_(p); }
  const Domain& domain() const { return domain_; }

 private:
  Evaluator eval_;
  TriadFn triad_;
  Domain domain_;
};

enum SpinName : int { kKappa = 0, kRho, kSigma, kTau, kEpsilon };

// Named coefficients at a point and their D, delta, delta-bar derivatives.
struct SpinDerivatives {
  std::array<cplx, 5> value{};
  std::array<cplx, 5> D{}, delta{}, delta_bar{};
};

SpinDerivatives spin_derivatives(const SpinCoefficientField& S,
                                 const ComplexTriad& T, const Point& p,
                                 const DiffConfig& cfg);

// One printed term: coefficient times a product of spin quantities.
struct Term {
  std::string label;
  double coefficient;
  cplx value;
};

// The printed right-hand side of a Ricci equation, or LHS - RHS of an
// identity, as individual terms.
struct Equation {
  std::string name;
  std::vector<Term> terms;

  cplx sum() const;
  // Sum with the sign of the listed term reversed.
  cplx sum_flipped(std::size_t term) const;
};

// R00, R++, R0+, R0-, R+-, R/2, identity 1, identity 2, in that order.
std::vector<Equation> printed_equations(const SpinDerivatives& d);

// Term labels whose printed sign is reversed before evaluation. Agreement
// with the direct curvature holds with the equations exactly as printed, so
// this list is empty.
inline const std::vector<std::string>& sign_corrections() {
  static const std::vector<std::string> none;
  return none;
}

FrameRicci ricci_from_spin(const SpinCoefficientField& S, const ComplexTriad& T,
                           const Point& p, const DiffConfig& cfg);
FrameRicci ricci_from_spin(const SpinDerivatives& d);

// Direct route: R_mn = R_ij Z_m^i Z_n^j from the coordinate Ricci tensor.
FrameRicci project_ricci(const Mat3& ricci, const ComplexTriad& T);
FrameRicci direct_frame_ricci(const MetricField& g, const ComplexTriad& T,
                              const Point& p, const DiffConfig& cfg);

struct IdentityResiduals {
  cplx i1, i2;
};
IdentityResiduals identity_residuals(const SpinCoefficientField& S,
                                     const ComplexTriad& T, const Point& p,
                                     const DiffConfig& cfg);
IdentityResiduals identity_residuals(const SpinDerivatives& d);

// The reduced forms obtained with kappa = epsilon = 0, rho = lambda i
// constant, taken as differences from the general expressions evaluated on
// the same data. Index order R00, R++, R0+, R0-, R+-, R/2, identity 2.
struct ReducedGaugeResiduals {
  std::array<cplx, 7> difference{};
  double max_abs() const;
};
ReducedGaugeResiduals reduced_gauge_residuals(const SpinDerivatives& d);

struct TwistLemmaCheck {
  double residual = 0.0;        // max |Re rho * Im rho|
  double max_divergence = 0.0;  // max |Re rho|
  double twist_variation = 0.0; // max - min of Im rho
  bool violation = false;
};

// Samples along one geodesic of the congruence. Throws kNotGeodesic when
// |kappa| exceeds tol at any sample.
TwistLemmaCheck geodesic_twist_lemma_check(
    const std::vector<SpinCoefficients>& along_curve, double tol);

struct DiscrepancyEntry {
  std::string equation;
  std::string term;
  double printed_coefficient;
  int samples_fixed;
};

struct EquationAgreement {
  std::string equation;
  double max_residual;
};

struct DiscrepancyReport {
  std::vector<EquationAgreement> agreement;
  // Terms whose flip alone brings every failing sample within tolerance.
  std::vector<DiscrepancyEntry> required_flips;
  // max |R/2 (printed) - (R00 + 2 R+-)/2 (printed)|
  double trace_identity_residual = 0.0;
  int samples = 0;
  double tolerance = 0.0;

  bool consistent() const;
  std::string to_text() const;
};

struct DiscrepancySample {
  SpinCoefficientField spin;
  MetricField metric;
  Point point;
};

DiscrepancyReport discrepancy_report(const std::vector<DiscrepancySample>& samples,
                                     const DiffConfig& cfg, double tol = 1e-3);

}  // namespace npp3
