#pragma once

#include <vector>

#include "npp3/npp.hpp"

namespace npp3 {

// alpha with d alpha = 2 lambda *alpha and |alpha|_g = 1 for the given
// orientation; orientation is chosen so that lambda > 0.
struct ContactStructure {
  OneFormField alpha;
  double lambda = 1.0;
  MetricField g;
  int orientation = +1;
};

struct AdaptedResiduals {
  double r1 = 0.0;  // max component |d alpha - 2 lambda *alpha|
  double r2 = 0.0;  // | |alpha|_g - 1 |
  bool within(double tol) const { return r1 < tol && r2 < tol; }
};

AdaptedResiduals check_adapted(const ContactStructure& c, const Point& p,
                               const DiffConfig& cfg);

// Metric dual of alpha after checking adaptedness (tol.adapted) and the
// defining properties alpha(Z0) = 1, d alpha(Z0, .) = 0 (tol.reeb).
Vec3 reeb_field(const ContactStructure& c, const Point& p,
                const DiffConfig& cfg);
// Unchecked metric dual, usable as a frame generator.
VectorField reeb_vector_field(const ContactStructure& c);

// Gram-Schmidt frame with e0 along the Reeb field, right-handed with respect
// to c.orientation.
FrameField adapted_frame(const ContactStructure& c, Tolerances tol = {});

struct PseudohermitianData {
  cplx A;        // torsion, -conj(sigma)
  double W = 0;  // Tanaka-Webster curvature
  double W_imag = 0;
  // Value of the shorter expression without the epsilon(rho - rho-bar)
  // term; it agrees with W only in frames with epsilon = 0.
  double W_epsilon_free = 0;
  // Connection form coefficients on (theta^0, theta^+, theta^-).
  std::array<cplx, 3> omega{};
  // Same form in coordinate components.
  CVec3 omega_coordinates = CVec3::Zero();
};

PseudohermitianData pseudohermitian(const SpinDerivatives& d,
                                    const ComplexTriad& T, double lambda);
PseudohermitianData pseudohermitian(const SpinCoefficientField& S,
                                    const ComplexTriad& T, double lambda,
                                    const Point& p, const DiffConfig& cfg);

// R/2 - 2 lambda W + lambda^2 + |sigma|^2
double scalar_relation_residual(double R, double W, cplx sigma, double lambda);

struct ConstancyReport {
  double grad_R = 0.0, grad_W = 0.0, grad_A = 0.0;
  double min_R = 0.0, min_W = 0.0;
  bool implication_holds = true;  // two constant => third within C * tol
  bool positivity_holds = true;   // R > 0 everywhere => W > 0 everywhere
  bool all_constant = false;
  bool consistent() const { return implication_holds && positivity_holds; }
};

struct ConstancyOptions {
  double tol = 1e-5;
  double factor = 10.0;
  double step = 1e-3;
  DiffScheme scheme = DiffScheme::kCentral4;
};

ConstancyReport constancy_check(const ScalarField& R, const ScalarField& W,
                                const ScalarField& absA,
                                const std::vector<Point>& grid,
                                const Domain& dom,
                                const ConstancyOptions& opt = {});

struct CongruenceProperties {
  double geodesic = 0.0;    // max |kappa|
  double divergence = 0.0;  // max |Re rho|
  double twist_error = 0.0; // max |Im rho - lambda|
  bool within(double tol) const {
    return geodesic < tol && divergence < tol && twist_error < tol;
  }
};

// Reeb congruence of an adapted structure: geodesic, divergence free, twist
// lambda.
CongruenceProperties reeb_congruence_properties(const ContactStructure& c,
                                                const std::vector<Point>& pts,
                                                const DiffConfig& cfg);

// Converse: alpha = g(e0, .) for a unit geodesic field e0 of constant twist
// lambda is adapted. Returns the worst residuals over pts.
AdaptedResiduals reconstructed_form_residuals(const VectorField& e0,
                                              const MetricField& g,
                                              double lambda, int orientation,
                                              const std::vector<Point>& pts,
                                              const DiffConfig& cfg);

// Twist of the unit metric dual of alpha at p (signed, relative to
// orientation).
double estimate_lambda(const OneFormField& alpha, const MetricField& g,
                       int orientation, const Point& p, const DiffConfig& cfg);

}  // namespace npp3
