#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "npp3/types.hpp"

namespace npp3 {

enum class DiffScheme { kCentral2, kCentral4 };

// Every numeric threshold used by the library lives here so that a run can be
// reproduced from its configuration alone.
struct Tolerances {
  // SPD check: smallest eigenvalue must exceed spd_relative * trace.
  double spd_relative = 1e-12;
  // Gram-Schmidt drops coordinate vectors whose projection is shorter.
  double gram_schmidt_skip = 1e-10;
  // Max |g(e_a, e_b) - delta_ab| accepted on a derivative stencil.
  double frame_drift = 1e-6;
  // Radicands of the direct optical-scalar formulas may dip this far below 0.
  double radicand = 1e-8;
  // Adaptedness residuals accepted before the Reeb field is computed.
  double adapted = 1e-5;
  // Reeb defining properties (alpha(Z0) = 1, i_Z0 d alpha = 0).
  double reeb = 1e-6;
  // kappa magnitude treated as geodesic.
  double geodesic = 1e-5;
  // Jacobian determinant below this is reported as singular.
  double singular_jacobian = 1e-12;
};

struct DiffConfig {
  DiffScheme scheme = DiffScheme::kCentral2;
  // First-derivative step per coordinate.
  Vec3 step = Vec3::Constant(1e-5);
  // Step for second derivatives of the metric (curvature oracle).
  double second_step = 1e-4;
  // Step for derivatives of quantities that are themselves finite-difference
  // results (spin coefficients, directional derivatives of frames).
  double spin_step = 1e-4;
  // Richardson extrapolation of the spin_step derivatives.
  bool richardson = true;
  // Stencils that leave the domain are retried with halved steps.
  int max_halvings = 4;
  Tolerances tol;

  void validate() const;
};

namespace detail {

template <class T>
T lin(const T& a, double ca, const T& b, double cb) {
  return a * ca + b * cb;
}

inline Point shifted(const Point& p, int axis, double h) {
  Point q = p;
  q[axis] += h;
  return q;
}

inline bool stencil_ok(const Domain& dom, const Point& p, int axis, double h,
                       DiffScheme scheme) {
  if (!dom) return true;
  const int reach = scheme == DiffScheme::kCentral4 ? 2 : 1;
  for (int k = 1; k <= reach; ++k) {
    if (!dom(shifted(p, axis, k * h)) || !dom(shifted(p, axis, -k * h)))
      return false;
  }
  return true;
}

// Finds a step whose stencil stays inside the domain; one-sided differences
// are never used.
inline double admissible_step(const Domain& dom, const Point& p, int axis,
                              double h, DiffScheme scheme, int max_halvings) {
  for (int k = 0; k <= max_halvings; ++k) {
    if (stencil_ok(dom, p, axis, h, scheme)) return h;
    h *= 0.5;
  }
  throw GeometryError(ErrorKind::kDomainViolation,
                      "finite-difference stencil leaves the chart domain", p);
}

template <class F>
auto raw_partial(const F& f, const Point& p, int axis, double h,
                 DiffScheme scheme) -> decltype(f(p)) {
  using T = decltype(f(p));
  if (scheme == DiffScheme::kCentral2) {
    T fp = f(shifted(p, axis, h));
    T fm = f(shifted(p, axis, -h));
    return lin<T>(fp, 1.0 / (2.0 * h), fm, -1.0 / (2.0 * h));
  }
  T f1 = f(shifted(p, axis, h));
  T fm1 = f(shifted(p, axis, -h));
  T f2 = f(shifted(p, axis, 2.0 * h));
  T fm2 = f(shifted(p, axis, -2.0 * h));
  T d1 = lin<T>(f1, 8.0 / (12.0 * h), fm1, -8.0 / (12.0 * h));
  T d2 = lin<T>(f2, -1.0 / (12.0 * h), fm2, 1.0 / (12.0 * h));
  return lin<T>(d1, 1.0, d2, 1.0);
}

}  // namespace detail

// Central difference of f along one coordinate axis.
template <class F>
auto partial(const F& f, const Point& p, int axis, double h, DiffScheme scheme,
             const Domain& dom, int max_halvings = 4) -> decltype(f(p)) {
  h = detail::admissible_step(dom, p, axis, h, scheme, max_halvings);
  return detail::raw_partial(f, p, axis, h, scheme);
}

// Same, with one Richardson step combining h and h/2.
template <class F>
auto partial_richardson(const F& f, const Point& p, int axis, double h,
                        DiffScheme scheme, const Domain& dom,
                        int max_halvings = 4) -> decltype(f(p)) {
  using T = decltype(f(p));
  h = detail::admissible_step(dom, p, axis, h, scheme, max_halvings);
  T coarse = detail::raw_partial(f, p, axis, h, scheme);
  T fine = detail::raw_partial(f, p, axis, 0.5 * h, scheme);
  const double order = scheme == DiffScheme::kCentral2 ? 4.0 : 16.0;
  return detail::lin<T>(fine, order / (order - 1.0), coarse,
                        -1.0 / (order - 1.0));
}

template <class F>
auto gradient(const F& f, const Point& p, const DiffConfig& cfg,
              const Domain& dom) -> std::array<decltype(f(p)), 3> {
  return {partial(f, p, 0, cfg.step[0], cfg.scheme, dom, cfg.max_halvings),
          partial(f, p, 1, cfg.step[1], cfg.scheme, dom, cfg.max_halvings),
          partial(f, p, 2, cfg.step[2], cfg.scheme, dom, cfg.max_halvings)};
}

// Gradient of a quantity that is itself computed by finite differences:
// coarser step plus optional Richardson extrapolation.
template <class F>
auto nested_gradient(const F& f, const Point& p, const DiffConfig& cfg,
                     const Domain& dom) -> std::array<decltype(f(p)), 3> {
  std::array<decltype(f(p)), 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = cfg.richardson
                 ? partial_richardson(f, p, i, cfg.spin_step, cfg.scheme, dom,
                                      cfg.max_halvings)
                 : partial(f, p, i, cfg.spin_step, cfg.scheme, dom,
                           cfg.max_halvings);
  }
  return out;
}

// d^2 f / dx^i dx^j with a common step h.
template <class F>
auto second_partial(const F& f, const Point& p, int i, int j, double h,
                    DiffScheme scheme, const Domain& dom,
                    int max_halvings = 4) -> decltype(f(p)) {
  using T = decltype(f(p));
  const int reach = scheme == DiffScheme::kCentral4 ? 2 : 1;
  auto box_ok = [&](double step) {
    if (!dom) return true;
    for (int a = -reach; a <= reach; ++a)
      for (int b = -reach; b <= reach; ++b)
        if (!dom(detail::shifted(detail::shifted(p, i, a * step), j, b * step)))
          return false;
    return true;
  };
  for (int k = 0;; ++k) {
    if (box_ok(h)) break;
    if (k == max_halvings)
      throw GeometryError(ErrorKind::kDomainViolation,
                          "second-derivative stencil leaves the chart domain", p);
    h *= 0.5;
  }
  if (i == j) {
    T f0 = f(p);
    if (scheme == DiffScheme::kCentral2) {
      T s = detail::lin<T>(f(detail::shifted(p, i, h)), 1.0,
                           f(detail::shifted(p, i, -h)), 1.0);
      return detail::lin<T>(s, 1.0 / (h * h), f0, -2.0 / (h * h));
    }
    T s1 = detail::lin<T>(f(detail::shifted(p, i, h)), 1.0,
                          f(detail::shifted(p, i, -h)), 1.0);
    T s2 = detail::lin<T>(f(detail::shifted(p, i, 2 * h)), 1.0,
                          f(detail::shifted(p, i, -2 * h)), 1.0);
    T s = detail::lin<T>(s1, 16.0 / (12.0 * h * h), s2, -1.0 / (12.0 * h * h));
    return detail::lin<T>(s, 1.0, f0, -30.0 / (12.0 * h * h));
  }
  auto inner = [&](const Point& q) {
    return detail::raw_partial(f, q, j, h, scheme);
  };
  return detail::raw_partial(inner, p, i, h, scheme);
}

}  // namespace npp3
