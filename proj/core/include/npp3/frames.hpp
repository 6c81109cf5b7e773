#pragma once

#include <array>
#include <functional>

#include "npp3/tensor.hpp"

namespace npp3 {

// Orthonormal triad {e0, e1, e2} at a point, contravariant components.
struct OrthonormalTriad {
  std::array<Vec3, 3> e{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

  const Vec3& operator[](int a) const { return e[a]; }
  Vec3& operator[](int a) { return e[a]; }
  // max_ab |g(e_a, e_b) - delta_ab|
  double orthonormality_residual(const Mat3& g) const;
  double handedness() const;  // det(e0 | e1 | e2)
};

// Complex frame index order used throughout: 0, +, -.
enum FrameIndex : int { k0 = 0, kPlus = 1, kMinus = 2 };

// {Z0, Z+, Z-} with Z+- = (e1 -+ i e2)/sqrt2 and the dual coframe
// {theta^0, theta^+, theta^-} (covariant components).
struct ComplexTriad {
  OrthonormalTriad real;
  std::array<CVec3, 3> Z;
  std::array<CVec3, 3> theta;

  static ComplexTriad from(const OrthonormalTriad& t, const Mat3& g);
  // max |theta^m(Z_n) - delta^m_n|
  double duality_residual() const;
};

// e0 = candidate / |candidate|_g; e1, e2 from Gram-Schmidt on the coordinate
// basis in order, skipping vectors whose projection is below
// tol.gram_schmidt_skip. If det(e0|e1|e2) * orientation < 0, e2 is negated.
OrthonormalTriad gram_schmidt_triad(const Vec3& candidate, const Mat3& g,
                                    const Point& p, int orientation = +1,
                                    const Tolerances& tol = {});

// A smooth frame over a chart region, re-derived pointwise.
class FrameField {
 public:
  using TriadFn = std::function<OrthonormalTriad(const Point&)>;

  FrameField(MetricField g, TriadFn triad);

  OrthonormalTriad triad(const Point& p) const { return triad_(p); }
  ComplexTriad complex_triad(const Point& p) const;
  const MetricField& metric() const { return g_; }
  const Domain& domain() const { return g_.domain(); }

 private:
  MetricField g_;
  TriadFn triad_;
};

FrameField gram_schmidt_frame(const MetricField& g, VectorField e0_candidate,
                              int orientation = +1, Tolerances tol = {});

// Z+ -> exp(i C) Z+, Z- -> exp(-i C) Z-; C may vary over the chart.
FrameField rotate_frame(const FrameField& frame, ScalarField phase);
FrameField rotate_frame(const FrameField& frame, double phase);

// gamma_mnp = (nabla_j Z_{m i}) Z_n^i Z_p^j together with the five named
// scalars.
struct SpinCoefficients {
  // table[m][n][p]
  std::array<std::array<std::array<cplx, 3>, 3>, 3> table{};
  cplx kappa, rho, sigma, tau, epsilon;
  // max |gamma_mnp + gamma_nmp| before antisymmetrisation.
  double antisymmetry_residual = 0.0;
  // Worst orthonormality residual seen on the derivative stencil.
  double frame_residual = 0.0;

  cplx operator()(int m, int n, int p) const { return table[m][n][p]; }
  void refresh_named();
};

SpinCoefficients spin_coefficients(const FrameField& frame, const Point& p,
                                   const DiffConfig& cfg);

// Real rotation coefficients (nabla_j e_{a i}) e_b^i e_c^j.
std::array<Mat3, 3> rotation_coefficients(const FrameField& frame,
                                          const Point& p, const DiffConfig& cfg,
                                          double* frame_residual = nullptr);

struct OpticalScalars {
  double divergence = 0.0;
  double twist = 0.0;
  double shear_modulus = 0.0;
  // phi in sigma = |sigma| exp(2 i phi)
  double shear_phase = 0.0;
  // |e0^j nabla_j e0|; the direct formulas assume this vanishes.
  double geodesic_residual = 0.0;
  // Set when a radicand fell below -tol.radicand and was clamped.
  bool precondition_violated = false;
};

// divergence = 1/2 nabla_i e0^i
// twist      = 1/2 [ (nabla_i e0_j - nabla_j e0_i) nabla^i e0^j ]^{1/2}
// shear      = 1/sqrt2 [ nabla_(i e0_j) nabla^i e0^j - 1/2 (nabla_i e0^i)^2 ]^{1/2}
// The twist bracket is taken without the 1/2 so that twist = |Im rho|.
OpticalScalars optical_scalars_direct(const VectorField& e0,
                                      const MetricField& g, const Point& p,
                                      const DiffConfig& cfg,
                                      int orientation = +1);

// Same quantities read off the spin coefficients. Under gamma_mnp as defined,
// Re rho = -1/2 nabla_i e0^i for a geodesic congruence, so divergence is
// reported as -Re rho; twist keeps the sign of Im rho.
OpticalScalars optical_scalars_from_spin(const SpinCoefficients& s);

struct Directional {
  cplx D, delta, delta_bar;
};

Directional directional(const ScalarField& f, const ComplexTriad& t,
                        const Point& p, const DiffConfig& cfg,
                        const Domain& dom = whole_chart());
Directional directional(const ComplexField& f, const ComplexTriad& t,
                        const Point& p, const DiffConfig& cfg,
                        const Domain& dom = whole_chart());

struct CommutatorResiduals {
  // c1 = (D delta - delta D) f - [(rho-bar + eps) delta + sigma delta-bar + kappa D] f
  cplx c1;
  // c2 = (delta delta-bar - delta-bar delta) f - [tau-bar delta-bar - tau delta + (rho-bar - rho) D] f
  cplx c2;
};

CommutatorResiduals commutator_residuals(const ScalarField& f,
                                         const FrameField& frame,
                                         const Point& p,
                                         const DiffConfig& cfg);

}  // namespace npp3
