#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace npp3 {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

// Chart coordinates (x^0, x^1, x^2). Catalog charts use (r, u, v).
using Point = Eigen::Vector3d;

using Domain = std::function<bool(const Point&)>;
using ScalarField = std::function<double(const Point&)>;
using ComplexField = std::function<cplx(const Point&)>;
using VectorField = std::function<Vec3(const Point&)>;

inline Domain whole_chart() {
  return [](const Point&) { return true; };
}

enum class ErrorKind {
  kDegenerateMetric,
  kDomainViolation,
  kFrameDrift,
  kNotAdapted,
  kReebVerificationFailed,
  kNotGeodesic,
  kFormulaPrecondition,
  kInvalidArgument,
  kQuadratureFailure,
  kSingularJacobian,
  kDegenerateFit,
};

std::string to_string(ErrorKind kind);

// All numerical failures surface as GeometryError; the offending point is
// carried along when one exists.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& what);
  GeometryError(ErrorKind kind, const std::string& what, const Point& where);

  ErrorKind kind() const { return kind_; }
  bool has_point() const { return has_point_; }
  const Point& point() const { return point_; }

 private:
  ErrorKind kind_;
  bool has_point_ = false;
  Point point_ = Point::Zero();
};

std::string format_point(const Point& p);

}  // namespace npp3
