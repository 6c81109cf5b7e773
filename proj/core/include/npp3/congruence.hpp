#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "npp3/frames.hpp"

namespace npp3 {

struct GeodesicState {
  Point x = Point::Zero();
  Vec3 v = Vec3::Zero();
  double r = 0.0;
};

struct GeodesicPath {
  std::vector<GeodesicState> states;
  // Parallel-transported vectors, one list per requested vector.
  std::vector<std::vector<Vec3>> transported;
  bool exited_domain = false;
  double energy_drift = 0.0;       // max |g(v,v) - g(v0,v0)|
  double drift_per_unit_r = 0.0;
  bool accuracy_warning = false;   // energy drift above 1e-6
};

constexpr double kDefaultGeodesicStep = 1e-3;

// Classical RK4 on x'' + Gamma(x', x') = 0, optionally transporting extra
// vectors by E' = -Gamma(x', E). A negative r_max integrates backwards.
// Stops early, keeping the partial path, if a stage leaves the domain.
GeodesicPath integrate_geodesic(const MetricField& g, const GeodesicState& init,
                                double r_max, double step = kDefaultGeodesicStep,
                                const DiffConfig& cfg = {},
                                const std::vector<Vec3>& transport = {});

// Integral curve of a vector field by RK4.
std::vector<Point> integrate_field_curve(const VectorField& field, const Point& x0,
                                         double r_max, double step,
                                         const Domain& dom = whole_chart());

// max |nabla_Z Z|_g over the points, the covariant derivative assembled from
// a central difference of Z and the Christoffels.
double geodesic_residual(const MetricField& g, const VectorField& Z,
                         const std::vector<Point>& pts, const DiffConfig& cfg);

using ComplexOfReal = std::function<cplx(double)>;

struct ConnectingSample {
  double r;
  cplx zeta;
};

// RK4 on d zeta/dr = -rho zeta - sigma conj(zeta).
std::vector<ConnectingSample> integrate_connecting(const ComplexOfReal& rho,
                                                   const ComplexOfReal& sigma,
                                                   cplx zeta0, double r_max,
                                                   double step = kDefaultGeodesicStep);

// Closed form for constant coefficients via the exponential of the real 2x2
// system acting on (Re zeta, Im zeta).
cplx connecting_exact(cplx rho, cplx sigma, cplx zeta0, double r);
Eigen::Matrix2d connecting_generator(cplx rho, cplx sigma);
Eigen::Matrix2d expm2(const Eigen::Matrix2d& m);

struct EllipseFit {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double inclination = 0.0;  // angle of the major axis in [0, pi)
  double residual = 0.0;     // rms of the conic equation
};

// Least-squares centred conic a x^2 + b xy + c y^2 = 1 through the points.
EllipseFit ellipse_eccentricity(const std::vector<cplx>& zeta);

struct EmpiricalOptions {
  int neighbors = 16;
  double epsilon = 1e-3;
  double fd_step = 1e-2;  // parameter step for d zeta/dr
  int substeps = 10;      // RK4 steps per fd_step
  bool richardson = true;
  int orientation = +1;
};

struct EmpiricalOpticalScalars {
  cplx rho, sigma;
  double divergence = 0.0;  // reported as -Re rho
  double twist = 0.0;
  double shear = 0.0;
  double fit_residual = 0.0;
  // max |g(V, e0)| / |V| over the neighbours at the stencil parameters.
  double orthogonality_drift = 0.0;
};

// Neighbouring geodesics start on an epsilon-circle in the (e1, e2) plane of
// the Gram-Schmidt frame at x0 with velocity e0 there; separations are read
// in the parallel-transported frame and rho, sigma are fitted by least
// squares to d zeta/dr at r = 0. With richardson, the estimates at epsilon
// and epsilon/2 are combined linearly.
EmpiricalOpticalScalars empirical_optical_scalars(const MetricField& g,
                                                  const VectorField& e0,
                                                  const Point& x0,
                                                  const EmpiricalOptions& opt = {},
                                                  const DiffConfig& cfg = {});

struct BundleTrajectory {
  std::vector<GeodesicState> central;
  // zeta[k][s]: neighbour k at sample s
  std::vector<std::vector<cplx>> zeta;
};

BundleTrajectory bundle_trajectory(const MetricField& g, const VectorField& e0,
                                   const Point& x0, double r_max, double step,
                                   const EmpiricalOptions& opt = {},
                                   const DiffConfig& cfg = {});

// Columns r, x0, x1, x2, v0, v1, v2, then re_zeta_k, im_zeta_k per neighbour.
void write_trajectory_csv(std::ostream& os, const BundleTrajectory& t);

}  // namespace npp3
