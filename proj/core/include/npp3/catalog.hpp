#pragma once

#include <optional>
#include <string>
#include <vector>

#include "npp3/contact.hpp"

namespace npp3 {

// Real polynomial c0 + c1 x + c2 x^2 + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  template <class S>
  S operator()(const S& x) const {
    S acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const;
  // Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  bool is_zero() const;
  const std::vector<double>& coefficients() const { return c_; }
  std::string to_string() const;

 private:
  std::vector<double> c_;
};

enum class ExampleKind { kStandardFlat, kRoundSphere, kFlatB0Zero, kFlatB0Nonzero, kElliptic };

std::string to_string(ExampleKind k);
std::optional<ExampleKind> parse_example_kind(const std::string& name);
std::vector<ExampleKind> all_example_kinds();

constexpr double kChartMargin = 1e-3;

struct NamedExample {
  ExampleKind kind = ExampleKind::kStandardFlat;
  double lambda = 1.0;
  Polynomial f;     // FlatB0Zero, Elliptic
  Polynomial D, E;  // FlatB0Nonzero
  // FlatB0Nonzero: sign of 1/g = D sin(lambda u) + E cos(lambda u) on the
  // chart; the chart is the region where branch / g > kChartMargin.
  int branch = +1;

  void validate() const;  // throws kInvalidArgument
  // Orientation in which the structure is adapted with lambda > 0.
  int orientation() const;
  std::string name() const { return to_string(kind); }
  Domain domain() const;
  // Point inside the chart used as a default sample location.
  Point base_point() const;
  // Axis-aligned box around base_point used for default grids.
  std::array<std::array<double, 2>, 3> default_box() const;
};

// Regular grid over default_box, keeping points whose coordinate stencil
// (+-0.02 per axis) stays inside the chart.
std::vector<Point> example_grid(const NamedExample& e, int n_per_axis);

// Chart coordinates: (x, y, z) StandardFlat; (rho, theta, phi) RoundSphere;
// (r, u, v) for the three families.
MetricField example_metric(const NamedExample& e);
OneFormField example_contact(const NamedExample& e);
ContactStructure example_structure(const NamedExample& e);

// Checked point evaluations; a non positive definite result is reported as a
// parameter degeneracy.
Mat3 example_metric(const NamedExample& e, const Point& p);
Vec3 example_contact(const NamedExample& e, const Point& p);

// Integration variables of the construction at p. Entries that do not apply
// to the example are left unset.
struct CatalogSolutionData {
  std::optional<double> a0, b0, inv_g, Omega0, P0;
  std::optional<cplx> Omega, eta_u, eta_v, tau0;
};
CatalogSolutionData solution_data(const NamedExample& e, const Point& p);

// Map from `source` chart to `target` chart with target structure; the
// residuals compare the pullback with the source structure.
struct IsometryMap {
  std::string target_model;
  ChartMap forward;
  // Exact Jacobian J(i, a) = d phi^i / d x^a.
  std::function<Mat3(const Point&)> jacobian;
  MetricField source_metric, target_metric;
  OneFormField source_form, target_form;
  Domain source_domain;
};

// Flat families: example chart -> Euclidean R^3 with the standard form.
// Elliptic: round chart (rho, theta, phi) -> example chart, composed from the
// two displayed stages. StandardFlat and RoundSphere use the identity.
IsometryMap isometry(const NamedExample& e);
Point isometry_apply(const NamedExample& e, const Point& p);

// Elliptic stages separately: stage 2 maps (rho, theta, phi) to the
// intermediate chart, stage 1 maps that to (r, u, v).
Point elliptic_stage1(const NamedExample& e, const Point& t);
Point elliptic_stage2(const Point& p);
MetricField elliptic_intermediate_metric(double lambda);
OneFormField elliptic_intermediate_form(double lambda);

struct PullbackResidual {
  double metric = 0.0;
  double form = 0.0;
  double min_abs_det = 0.0;
  Point worst_point = Point::Zero();
};

// Exact Jacobian by default, central differences when use_fd is set.
PullbackResidual pullback_residual(const IsometryMap& m,
                                   const std::vector<Point>& source_grid,
                                   const DiffConfig& cfg, bool use_fd = false);
PullbackResidual pullback_residual(const NamedExample& e,
                                   const std::vector<Point>& source_grid,
                                   const DiffConfig& cfg, bool use_fd = false);
// Grid in the source chart of isometry(e).
std::vector<Point> isometry_grid(const NamedExample& e, int n_per_axis);

// Round chart metric and the embedding form
// (1/c)(x dy - y dx + z dw - w dz), c = 1/lambda, with
// w = c cos rho, z = c sin rho cos theta, (x, y) = c sin rho sin theta (cos phi, sin phi).
MetricField round_sphere_metric(double lambda);
OneFormField round_sphere_form(double lambda);
// max |embedding pullback of the R^4 metric - chart metric| at p.
double sphere_embedding_residual(double lambda, const Point& p);

struct NamedResidual {
  std::string name;
  double value;
};

// Closed-form integration variables substituted into the displayed reduced
// equations, exact derivatives throughout.
std::vector<NamedResidual> reduced_system_residual(const NamedExample& e,
                                                   const Point& p);

enum class EinsteinBranch { kElliptic, kFlat, kNoSolution };
std::string to_string(EinsteinBranch b);

struct BranchResult {
  EinsteinBranch branch = EinsteinBranch::kNoSolution;
  std::optional<double> sigma_abs;  // sqrt(lambda^2 - R/6) when real
  // Residuals of the two candidate reductions: sigma = 0 requires
  // lambda^2 - R/6 = 0, tau = 0 requires R/3 = 0.
  double elliptic_obstruction = 0.0;
  double flat_obstruction = 0.0;
};

BranchResult einstein_branch(double lambda, double R, double rel_tol = 1e-9);

// Frame with Z0 along the geodesics and kappa = epsilon = 0, rho = lambda i,
// built from the closed-form delta operator of the construction. None for
// RoundSphere.
std::optional<FrameField> gauge_frame(const NamedExample& e);

}  // namespace npp3
