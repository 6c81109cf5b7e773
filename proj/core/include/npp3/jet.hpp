#pragma once

#include <array>
#include <cmath>

namespace npp3 {

// Forward-mode dual number carrying the gradient with respect to the three
// chart coordinates. Nesting Jet<Jet<double>> yields second derivatives.
template <class T>
struct Jet {
  T v{};
  std::array<T, 3> d{};

  Jet() = default;
  Jet(double c) : v(c) {}  // NOLINT: constants promote implicitly
  Jet(T value, std::array<T, 3> grad) : v(value), d(grad) {}

  static Jet variable(T value, int axis) {
    Jet j(value, {});
    j.d[axis] = T(1.0);
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < 3; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < 3; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator-(const Jet& a) {
    Jet r = a;
    r.v = -r.v;
    for (auto& x : r.d) x = -x;
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v / b.v;
    const T inv2 = T(1.0) / (b.v * b.v);
    for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }
  friend Jet operator+(const Jet& a, double b) { return a + Jet(b); }
  friend Jet operator+(double a, const Jet& b) { return Jet(a) + b; }
  friend Jet operator-(const Jet& a, double b) { return a - Jet(b); }
  friend Jet operator-(double a, const Jet& b) { return Jet(a) - b; }
  friend Jet operator*(const Jet& a, double b) {
    Jet r = a;
    r.v = r.v * b;
    for (auto& x : r.d) x = x * b;
    return r;
  }
  friend Jet operator*(double a, const Jet& b) { return b * a; }
  friend Jet operator/(const Jet& a, double b) { return a * (1.0 / b); }
  friend Jet operator/(double a, const Jet& b) { return Jet(a) / b; }
};

namespace detail {
template <class T>
Jet<T> chain(const Jet<T>& x, const T& value, const T& slope) {
  Jet<T> r;
  r.v = value;
  for (int i = 0; i < 3; ++i) r.d[i] = slope * x.d[i];
  return r;
}
}  // namespace detail

template <class T>
Jet<T> sin(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  return detail::chain(x, sin(x.v), cos(x.v));
}
template <class T>
Jet<T> cos(const Jet<T>& x) {
  using std::cos;
  using std::sin;
  return detail::chain(x, cos(x.v), -sin(x.v));
}
template <class T>
Jet<T> tan(const Jet<T>& x) {
  using std::tan;
  const T t = tan(x.v);
  return detail::chain(x, t, T(1.0) + t * t);
}
template <class T>
Jet<T> atan(const Jet<T>& x) {
  using std::atan;
  return detail::chain(x, atan(x.v), T(1.0) / (T(1.0) + x.v * x.v));
}
template <class T>
Jet<T> acos(const Jet<T>& x) {
  using std::acos;
  using std::sqrt;
  return detail::chain(x, acos(x.v), T(-1.0) / sqrt(T(1.0) - x.v * x.v));
}
template <class T>
Jet<T> sqrt(const Jet<T>& x) {
  using std::sqrt;
  const T s = sqrt(x.v);
  return detail::chain(x, s, T(0.5) / s);
}
template <class T>
Jet<T> log(const Jet<T>& x) {
  using std::log;
  return detail::chain(x, log(x.v), T(1.0) / x.v);
}
template <class T>
Jet<T> exp(const Jet<T>& x) {
  using std::exp;
  const T e = exp(x.v);
  return detail::chain(x, e, e);
}

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Jet<T>& x) {
  return value_of(x.v);
}

}  // namespace npp3
