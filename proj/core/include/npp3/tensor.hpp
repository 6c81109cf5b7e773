#pragma once

#include <array>
#include <functional>
#include <optional>

#include "npp3/diff.hpp"
#include "npp3/jet.hpp"
#include "npp3/types.hpp"

namespace npp3 {

// d1[k] = partial_k g ; d2[k][l] = partial_k partial_l g.
using MetricFirstDerivatives = std::array<Mat3, 3>;
using MetricSecondDerivatives = std::array<std::array<Mat3, 3>, 3>;

// A riemannian metric on a chart. Analytic derivative evaluators are optional;
// when present they replace finite differences everywhere.
class MetricField {
 public:
  using Evaluator = std::function<Mat3(const Point&)>;
  using FirstEvaluator = std::function<MetricFirstDerivatives(const Point&)>;
  using SecondEvaluator = std::function<MetricSecondDerivatives(const Point&)>;

  MetricField() = default;
  explicit MetricField(Evaluator eval, Domain domain = whole_chart(),
                       FirstEvaluator d1 = {}, SecondEvaluator d2 = {});

  // Builds a field, with exact first and second derivatives, from a generic
  // callable f(std::array<S, 3>) -> std::array<std::array<S, 3>, 3>.
  template <class F>
  static MetricField from_generic(F f, Domain domain = whole_chart());

  static MetricField euclidean();

  Mat3 operator()(const Point& p) const { return eval_(p); }
  bool admissible(const Point& p) const { return domain_(p); }
  const Domain& domain() const { return domain_; }
  bool has_first_derivatives() const { return static_cast<bool>(d1_); }
  bool has_second_derivatives() const { return static_cast<bool>(d2_); }
  const FirstEvaluator& first_evaluator() const { return d1_; }
  const SecondEvaluator& second_evaluator() const { return d2_; }

  // Same values and domain, finite differences only.
  MetricField without_derivatives() const;
  // c^2 g.
  MetricField scaled(double c) const;

 private:
  Evaluator eval_;
  Domain domain_ = whole_chart();
  FirstEvaluator d1_;
  SecondEvaluator d2_;
};

// Covariant 1-form field. d1(i, j) = partial_i alpha_j when provided.
class OneFormField {
 public:
  using Evaluator = std::function<Vec3(const Point&)>;
  using FirstEvaluator = std::function<Mat3(const Point&)>;

  OneFormField() = default;
  explicit OneFormField(Evaluator eval, Domain domain = whole_chart(),
                        FirstEvaluator d1 = {});

  template <class F>
  static OneFormField from_generic(F f, Domain domain = whole_chart());

  Vec3 operator()(const Point& p) const { return eval_(p); }
  bool admissible(const Point& p) const { return domain_(p); }
  const Domain& domain() const { return domain_; }
  bool has_first_derivatives() const { return static_cast<bool>(d1_); }
  const FirstEvaluator& first_evaluator() const { return d1_; }
  OneFormField without_derivatives() const;

 private:
  Evaluator eval_;
  Domain domain_ = whole_chart();
  FirstEvaluator d1_;
};

// Antisymmetric 2-form at a point; three independent components
// (w_12, w_20, w_01) stored, the full matrix rebuilt on demand.
class TwoForm {
 public:
  TwoForm() = default;
  static TwoForm from_components(double w12, double w20, double w01);
  // Antisymmetric part of m; the symmetric part is discarded.
  static TwoForm from_matrix(const Mat3& m);

  double operator()(int i, int j) const;
  Mat3 matrix() const;
  Vec3 components() const { return c_; }
  double max_abs() const { return c_.cwiseAbs().maxCoeff(); }

  TwoForm operator-(const TwoForm& o) const;
  TwoForm operator*(double s) const;

 private:
  Vec3 c_ = Vec3::Zero();
};

struct ChristoffelSymbols {
  // gamma[i](j, k) = Gamma^i_{jk}
  std::array<Mat3, 3> gamma{};

  double operator()(int i, int j, int k) const { return gamma[i](j, k); }
  // Gamma^i_{jk} u^j w^k
  Vec3 contract(const Vec3& u, const Vec3& w) const;
  double symmetry_residual() const;
};

struct CurvatureAtPoint {
  // riemann[i][j](k, l) = R_{ijkl}, fully covariant.
  std::array<std::array<Mat3, 3>, 3> riemann{};
  Mat3 ricci = Mat3::Zero();
  double scalar = 0.0;

  double operator()(int i, int j, int k, int l) const {
    return riemann[i][j](k, l);
  }
  // max over R_ijkl + R_jikl, R_ijkl + R_ijlk, R_ijkl - R_klij
  double symmetry_residual() const;
  // max |R_ijkl + R_iklj + R_iljk|
  double bianchi_residual() const;
  // max |R_ij - R g_ij / 3|
  double einstein_residual(const Mat3& g) const;
};

// Throws kDegenerateMetric unless g is symmetric positive definite with
// smallest eigenvalue above tol.spd_relative * trace.
void check_spd(const Mat3& g, const Point& p, const Tolerances& tol);

MetricFirstDerivatives metric_first_derivatives(const MetricField& g,
                                                const Point& p,
                                                const DiffConfig& cfg);
MetricSecondDerivatives metric_second_derivatives(const MetricField& g,
                                                  const Point& p,
                                                  const DiffConfig& cfg);

ChristoffelSymbols christoffel(const MetricField& g, const Point& p,
                               const DiffConfig& cfg);
ChristoffelSymbols christoffel_from(const Mat3& g,
                                    const MetricFirstDerivatives& dg);

CurvatureAtPoint curvature(const MetricField& g, const Point& p,
                           const DiffConfig& cfg);

// max_{ijk} |nabla_k g_ij| assembled from the Christoffels in use.
double metric_compatibility_residual(const MetricField& g, const Point& p,
                                     const DiffConfig& cfg);

// (d alpha)_{ij} = partial_i alpha_j - partial_j alpha_i
TwoForm exterior_d(const OneFormField& alpha, const Point& p,
                   const DiffConfig& cfg);
// Exterior derivative of a scalar: gradient components.
Vec3 exterior_d(const ScalarField& f, const Point& p, const DiffConfig& cfg,
                const Domain& dom = whole_chart());

// (*alpha)_{ij} = orientation * sqrt(det g) eps_{ijk} g^{kl} alpha_l
TwoForm hodge_star_oneform(const Vec3& alpha, const Mat3& g, int orientation,
                           const Tolerances& tol = {});
// Inverse direction: (*w)_l = orientation * (1/2) g_{lm} eps^{mij} w_ij / sqrt(det g)
Vec3 hodge_star_twoform(const TwoForm& w, const Mat3& g, int orientation,
                        const Tolerances& tol = {});

using ChartMap = std::function<Point(const Point&)>;

// J(i, a) = partial phi^i / partial x^a by central differences.
Mat3 jacobian(const ChartMap& phi, const Point& p, const DiffConfig& cfg,
              const Domain& dom = whole_chart());

struct Pullback {
  Mat3 metric = Mat3::Zero();
  Vec3 form = Vec3::Zero();
  double jacobian_determinant = 0.0;
  // Set when |det J| falls below tol.singular_jacobian; values still returned.
  bool singular_jacobian = false;
};

Pullback pullback_metric(const ChartMap& phi, const MetricField& target,
                         const Point& p, const DiffConfig& cfg,
                         const Domain& source_domain = whole_chart());
Pullback pullback(const ChartMap& phi, const MetricField& target,
                  const OneFormField& target_form, const Point& p,
                  const DiffConfig& cfg,
                  const Domain& source_domain = whole_chart());

// ---------------------------------------------------------------------------

template <class F>
MetricField MetricField::from_generic(F f, Domain domain) {
  auto value = [f](const Point& p) {
    std::array<double, 3> x{p[0], p[1], p[2]};
    auto m = f(x);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(i, j) = m[i][j];
    return out;
  };
  auto first = [f](const Point& p) {
    using J = Jet<double>;
    std::array<J, 3> x{J::variable(p[0], 0), J::variable(p[1], 1),
                       J::variable(p[2], 2)};
    auto m = f(x);
    MetricFirstDerivatives out;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[k](i, j) = m[i][j].d[k];
    return out;
  };
  auto second = [f](const Point& p) {
    using J = Jet<double>;
    using JJ = Jet<J>;
    std::array<JJ, 3> x;
    for (int a = 0; a < 3; ++a) {
      x[a] = JJ::variable(J::variable(p[a], a), a);
    }
    auto m = f(x);
    MetricSecondDerivatives out;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) out[k][l](i, j) = m[i][j].d[k].d[l];
    return out;
  };
  return MetricField(value, std::move(domain), first, second);
}

template <class F>
OneFormField OneFormField::from_generic(F f, Domain domain) {
  auto value = [f](const Point& p) {
    std::array<double, 3> x{p[0], p[1], p[2]};
    auto a = f(x);
    return Vec3(a[0], a[1], a[2]);
  };
  auto first = [f](const Point& p) {
    using J = Jet<double>;
    std::array<J, 3> x{J::variable(p[0], 0), J::variable(p[1], 1),
                       J::variable(p[2], 2)};
    auto a = f(x);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(i, j) = a[j].d[i];
    return out;
  };
  return OneFormField(value, std::move(domain), first);
}

}  // namespace npp3
