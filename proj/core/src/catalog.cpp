#include "npp3/catalog.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace npp3 {

namespace {

using J = Jet<double>;
using JJ = Jet<J>;
template <class S>
using Mat = std::array<std::array<S, 3>, 3>;
template <class S>
using Vec = std::array<S, 3>;

const double kSqrt2 = std::numbers::sqrt2;

// --- component formulas, generic in the scalar type ------------------------

template <class S>
S omega0(const NamedExample& e, const S& u, const S& v) {
  using std::atan;
  using std::sqrt;
  const S w = 1.0 + u * u;
  const S q = w + v * v;
  const S s = sqrt(w);
  return -(1.0 / kSqrt2) * (v / w + q / (w * s) * atan(v / s) + e.f(u) * q);
}

template <class S>
Mat<S> metric_components(const NamedExample& e, const Vec<S>& x) {
  using std::cos;
  using std::sin;
  const double l = e.lambda;
  Mat<S> g;
  for (auto& row : g) row.fill(S(0.0));
  switch (e.kind) {
    case ExampleKind::kStandardFlat:
      g[0][0] = g[1][1] = g[2][2] = S(1.0);
      break;
    case ExampleKind::kRoundSphere: {
      const S sr = sin(x[0]), st = sin(x[1]);
      g[0][0] = S(1.0 / (l * l));
      g[1][1] = sr * sr / (l * l);
      g[2][2] = sr * sr * st * st / (l * l);
      break;
    }
    case ExampleKind::kFlatB0Zero: {
      const S& r = x[0];
      const S a0 = -l * l * x[2] + e.f(x[1]);
      g[0][0] = S(1.0);
      g[0][1] = g[1][0] = -a0;
      g[1][1] = 0.5 * (2.0 * l * l * r * r - 2.0 * l * r + 1.0) + a0 * a0;
      g[1][2] = g[2][1] = -0.5 * (2.0 * l * l * r - l);
      g[2][2] = S(l * l);
      break;
    }
    case ExampleKind::kFlatB0Nonzero: {
      const S& r = x[0];
      const S su = sin(l * x[1]), cu = cos(l * x[1]);
      const S Dv = e.D(x[2]), Ev = e.E(x[2]);
      const S ig = Dv * su + Ev * cu;
      const S b0g = -l * (Dv * cu - Ev * su);
      g[0][0] = S(1.0);
      g[0][2] = g[2][0] = -b0g;
      g[1][1] = 0.5 * (2.0 * l * l * r * r - 2.0 * l * r + 1.0);
      g[1][2] = g[2][1] = -0.5 * ig * (2.0 * l * l * r - l);
      g[2][2] = l * l * ig * ig + b0g * b0g;
      break;
    }
    case ExampleKind::kElliptic: {
      const S q = 1.0 + x[1] * x[1] + x[2] * x[2];
      const S O = omega0(e, x[1], x[2]);
      g[0][0] = S(1.0);
      g[0][1] = g[1][0] = -kSqrt2 * O / (l * q);
      g[1][1] = (2.0 * O * O + 1.0) / (l * l * q * q);
      g[2][2] = 1.0 / (l * l * q * q);
      break;
    }
  }
  return g;
}

template <class S>
Vec<S> round_form(double l, const Vec<S>& x) {
  using std::cos;
  using std::sin;
  const S sr = sin(x[0]), cr = cos(x[0]), st = sin(x[1]), ct = cos(x[1]);
  return {-ct / l, sr * cr * st / l, sr * sr * st * st / l};
}

template <class S>
Vec<S> standard_form(double l, const Vec<S>& x) {
  using std::cos;
  using std::sin;
  return {sin(2.0 * l * x[2]), cos(2.0 * l * x[2]), S(0.0)};
}

template <class S>
Vec<S> contact_components(const NamedExample& e, const Vec<S>& x) {
  switch (e.kind) {
    case ExampleKind::kStandardFlat:
      return standard_form(e.lambda, x);
    case ExampleKind::kRoundSphere:
      return round_form(e.lambda, x);
    default: {
      // theta^0 = g(d/dr, .)
      const Mat<S> g = metric_components(e, x);
      return g[0];
    }
  }
}

// --- isometry maps ----------------------------------------------------------

double trig_integral_value(const NamedExample& e, double u, bool cosine) {
  if (u == 0.0) return 0.0;
  const Polynomial fp = e.f.derivative();
  if (fp.is_zero()) return 0.0;
  const double l = e.lambda;
  auto integrand = [&](double s) {
    return (cosine ? std::cos(l * s) : std::sin(l * s)) * fp(s);
  };
  double err = 0.0, l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, u, 15, 1e-12, &err, &l1);
  if (!std::isfinite(value) || err > 1e-10 * std::max(1.0, l1))
    throw GeometryError(ErrorKind::kQuadratureFailure,
                        "quadrature error estimate " + std::to_string(err));
  return value;
}

// int_0^u cos(lambda s) f'(s) ds (or sin), with the exact derivative carried
// through Jets.
template <class S>
S trig_integral(const NamedExample& e, const S& u, bool cosine) {
  if constexpr (std::is_same_v<S, double>) {
    return trig_integral_value(e, u, cosine);
  } else {
    static_assert(std::is_same_v<S, J>, "first-order jets only");
    const double l = e.lambda;
    const double slope = (cosine ? std::cos(l * u.v) : std::sin(l * u.v)) *
                         e.f.derivative()(u.v);
    J out(trig_integral_value(e, u.v, cosine));
    for (int i = 0; i < 3; ++i) out.d[i] = slope * u.d[i];
    return out;
  }
}

template <class S>
Vec<S> flat_map(const NamedExample& e, const Vec<S>& x) {
  using std::cos;
  using std::sin;
  const double l = e.lambda;
  const S& r = x[0];
  const S& u = x[1];
  const S& v = x[2];
  const S su = sin(l * u), cu = cos(l * u);
  const S shift = r - 1.0 / (2.0 * l);
  if (e.kind == ExampleKind::kFlatB0Zero) {
    const S w = l * v - e.f(u) / l;
    return {shift * su - w * cu - trig_integral(e, u, true) / l,
            shift * cu + w * su + trig_integral(e, u, false) / l, u / 2.0};
  }
  return {shift * su - l * e.E.antiderivative()(v),
          shift * cu + l * e.D.antiderivative()(v), u / 2.0};
}

template <class S>
Vec<S> stage1(const NamedExample& e, const Vec<S>& t) {
  using std::atan;
  using std::cos;
  using std::sin;
  using std::sqrt;
  using std::tan;
  const double l = e.lambda;
  const S tt = tan(t[1]);
  const S u = cos(t[2]) * tt;
  const S v = sin(t[2]) * tt;
  const S s = sqrt(1.0 + u * u);
  const S r = (t[0] - u / s * atan(v / s)) / l - e.f.antiderivative()(u) / l;
  return {r, u, v};
}

template <class S>
Vec<S> stage2(const Vec<S>& p) {
  using std::acos;
  using std::atan;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S sr = sin(p[0]), cr = cos(p[0]), ct = cos(p[1]);
  const S rt = atan(cr / (sr * ct));
  const S th = acos(sqrt(cr * cr + sr * sr * ct * ct));
  return {rt, th, rt - p[2]};
}

template <class S>
Vec<S> isometry_components(const NamedExample& e, const Vec<S>& x) {
  switch (e.kind) {
    case ExampleKind::kFlatB0Zero:
    case ExampleKind::kFlatB0Nonzero:
      return flat_map(e, x);
    case ExampleKind::kElliptic:
      return stage1(e, stage2(x));
    default:
      return x;
  }
}

Vec<double> arr(const Point& p) { return {p[0], p[1], p[2]}; }
Point pt(const Vec<double>& a) { return Point(a[0], a[1], a[2]); }

template <class F>
Mat3 jet_jacobian(F f, const Point& p) {
  Vec<J> x{J::variable(p[0], 0), J::variable(p[1], 1), J::variable(p[2], 2)};
  const Vec<J> y = f(x);
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) out(i, a) = y[i].d[a];
  return out;
}

// --- complex jets for the reduced systems -----------------------------------

struct CJ {
  J re{0.0}, im{0.0};
  CJ() = default;
  CJ(J r, J i) : re(std::move(r)), im(std::move(i)) {}
  CJ(cplx c) : re(c.real()), im(c.imag()) {}  // NOLINT
  cplx value() const { return {re.v, im.v}; }
  cplx d(int k) const { return {re.d[k], im.d[k]}; }
};
CJ operator*(const CJ& a, const CJ& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
CJ conj(const CJ& a) { return {a.re, -a.im}; }

// delta applied to F for delta = Omega d_r + eta^u d_u + eta^v d_v.
cplx apply(const cplx& om, const cplx& eu, const cplx& ev, const CJ& F) {
  return om * F.d(0) + eu * F.d(1) + ev * F.d(2);
}

std::vector<NamedResidual> flat_reduced(const NamedExample& e, const Point& p) {
  const double l = e.lambda;
  const cplx I(0.0, 1.0);
  const Vec<J> x{J::variable(p[0], 0), J::variable(p[1], 1), J::variable(p[2], 2)};
  const J& r = x[0];
  const J& u = x[1];
  const J& v = x[2];
  CJ Om, eu, ev;
  J a0(0.0), b0(0.0), g(1.0);
  if (e.kind == ExampleKind::kFlatB0Zero) {
    a0 = -l * l * v + e.f(u);
    Om = CJ(a0, -a0);
    eu = CJ(J(1.0), J(-1.0));
    ev = CJ(r, 1.0 / l - r);
  } else {
    const J su = sin(l * u), cu = cos(l * u);
    const J ig = e.D(v) * su + e.E(v) * cu;
    g = 1.0 / ig;
    b0 = -l * (e.D(v) * cu - e.E(v) * su) / ig;
    Om = CJ(b0 * r, b0 / l - b0 * r);
    eu = CJ(J(1.0), J(-1.0));
    ev = CJ(g * r, g / l - g * r);
  }
  const cplx om = Om.value(), hu = eu.value(), hv = ev.value();
  auto delta = [&](const CJ& F) { return apply(om, hu, hv, F); };
  auto delta_bar = [&](const CJ& F) {
    return apply(std::conj(om), std::conj(hu), std::conj(hv), F);
  };
  std::vector<NamedResidual> out;
  auto add = [&](std::string n, cplx z) { out.push_back({std::move(n), std::abs(z)}); };
  add("D Omega + i l Omega - l Omega-bar", Om.d(0) + I * l * om - l * std::conj(om));
  add("D eta^u + i l eta^u - l eta-bar^u", eu.d(0) + I * l * hu - l * std::conj(hu));
  add("D eta^v + i l eta^v - l eta-bar^v", ev.d(0) + I * l * hv - l * std::conj(hv));
  add("delta Omega-bar - delta-bar Omega + 2 l i", delta(conj(Om)) - delta_bar(Om) + 2.0 * l * I);
  add("delta eta-bar^u - delta-bar eta^u", delta(conj(eu)) - delta_bar(eu));
  add("delta eta-bar^v - delta-bar eta^v", delta(conj(ev)) - delta_bar(ev));
  if (e.kind == ExampleKind::kFlatB0Zero) {
    add("B(a0) + l^2", a0.d[2] + l * l);
  } else {
    add("d_u b0 - l^2 - b0^2", b0.d[1] - l * l - b0.v * b0.v);
    add("b0 - d_u g / g", b0.v - g.d[1] / g.v);
  }
  return out;
}

std::vector<NamedResidual> elliptic_reduced(const NamedExample& e, const Point& p) {
  const double l = e.lambda;
  const cplx I(0.0, 1.0);
  const Vec<J> x{J::variable(p[0], 0), J::variable(p[1], 1), J::variable(p[2], 2)};
  const J& r = x[0];
  const J& u = x[1];
  const J& v = x[2];
  const J q = 1.0 + u * u + v * v;
  const J P0 = (l / kSqrt2) * q;
  const J O0 = omega0(e, u, v);
  // tau0 = 2 d_zbar P0 conjugated, minus i lambda Omega0 (Omega0 real):
  // tau-bar0 = sqrt2 lambda z + i lambda Omega0.
  const CJ tau0(kSqrt2 * l * u, -kSqrt2 * l * v - l * O0);
  const CJ phase(cos(l * r), -sin(l * r));  // exp(-i lambda r)
  const CJ Om = CJ(O0, J(0.0)) * phase;
  const CJ eu = CJ(P0, J(0.0)) * phase;
  const CJ ev = CJ(J(0.0), P0) * phase;
  const CJ tau = tau0 * conj(phase);
  const cplx om = Om.value(), hu = eu.value(), hv = ev.value(), t = tau.value();
  auto delta = [&](const CJ& F) { return apply(om, hu, hv, F); };
  auto delta_bar = [&](const CJ& F) {
    return apply(std::conj(om), std::conj(hu), std::conj(hv), F);
  };
  auto dz = [](const CJ& F) { return 0.5 * (F.d(1) - cplx(0, 1) * F.d(2)); };
  auto dzb = [](const CJ& F) { return 0.5 * (F.d(1) + cplx(0, 1) * F.d(2)); };
  const CJ O0c(O0, J(0.0)), P0c(P0, J(0.0));
  const cplx t0 = tau0.value(), o0 = O0c.value();
  const double p0 = P0.v;

  std::vector<NamedResidual> out;
  auto add = [&](std::string n, cplx z) { out.push_back({std::move(n), std::abs(z)}); };
  add("D tau - i l tau", tau.d(0) - I * l * t);
  add("delta tau + delta-bar tau-bar - 2 tau tau-bar - 2 l^2",
      delta(tau) + delta_bar(conj(tau)) - 2.0 * t * std::conj(t) - 2.0 * l * l);
  add("D Omega + i l Omega", Om.d(0) + I * l * om);
  add("D eta^u + i l eta^u", eu.d(0) + I * l * hu);
  add("D eta^v + i l eta^v", ev.d(0) + I * l * hv);
  add("delta Omega-bar - delta-bar Omega - tau-bar Omega-bar + tau Omega + 2 l i",
      delta(conj(Om)) - delta_bar(Om) - std::conj(t) * std::conj(om) + t * om + 2.0 * l * I);
  add("delta eta-bar^u - delta-bar eta^u - tau-bar eta-bar^u + tau eta^u",
      delta(conj(eu)) - delta_bar(eu) - std::conj(t) * std::conj(hu) + t * hu);
  add("delta eta-bar^v - delta-bar eta^v - tau-bar eta-bar^v + tau eta^v",
      delta(conj(ev)) - delta_bar(ev) - std::conj(t) * std::conj(hv) + t * hv);
  add("finell1", 2.0 * p0 * (dzb(tau0) + dz(conj(tau0))) +
                     (o0 * t0 - std::conj(o0) * std::conj(t0)) * l * I -
                     2.0 * t0 * std::conj(t0) - 2.0 * l * l);
  add("finell2", 2.0 * p0 * (dzb(conj(O0c)) - dz(O0c)) + 2.0 * o0 * std::conj(o0) * l * I -
                     (std::conj(t0) * std::conj(o0) - t0 * o0 - 2.0 * l * I));
  add("finell3", 2.0 * dzb(P0c) - std::conj(t0) + o0 * l * I);
  {
    const Vec<JJ> y{JJ::variable(J::variable(p[0], 0), 0),
                    JJ::variable(J::variable(p[1], 1), 1),
                    JJ::variable(J::variable(p[2], 2), 2)};
    const JJ lnP = log((l / kSqrt2) * (1.0 + y[1] * y[1] + y[2] * y[2]));
    const double lap = lnP.d[1].d[1] + lnP.d[2].d[2];
    add("2 P0^2 d_z d_zbar ln P0 - l^2", 2.0 * p0 * p0 * 0.25 * lap - l * l);
  }
  add("Omega0 equation", 0.5 * q.v * O0.d[2] - v.v * O0.v + 1.0 / kSqrt2);
  return out;
}

}  // namespace

// --- Polynomial ---------------------------------------------------------------

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::derivative() const {
  std::vector<double> d;
  for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(static_cast<double>(k) * c_[k]);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  if (c_.empty()) return {};
  std::vector<double> a{0.0};
  for (std::size_t k = 0; k < c_.size(); ++k) a.push_back(c_[k] / static_cast<double>(k + 1));
  return Polynomial(std::move(a));
}

bool Polynomial::is_zero() const { return c_.empty(); }

std::string Polynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < c_.size(); ++k) os << (k ? "," : "") << c_[k];
  return os.str();
}

// --- NamedExample -------------------------------------------------------------

std::string to_string(ExampleKind k) {
  switch (k) {
    case ExampleKind::kStandardFlat: return "standard-flat";
    case ExampleKind::kRoundSphere: return "sphere";
    case ExampleKind::kFlatB0Zero: return "flat-b0zero";
    case ExampleKind::kFlatB0Nonzero: return "flat-b0nonzero";
    case ExampleKind::kElliptic: return "elliptic";
  }
  return "unknown";
}

std::optional<ExampleKind> parse_example_kind(const std::string& name) {
  for (ExampleKind k : all_example_kinds())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::vector<ExampleKind> all_example_kinds() {
  return {ExampleKind::kStandardFlat, ExampleKind::kRoundSphere, ExampleKind::kFlatB0Zero,
          ExampleKind::kFlatB0Nonzero, ExampleKind::kElliptic};
}

void NamedExample::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw GeometryError(ErrorKind::kInvalidArgument, "lambda must be a positive number");
  if (kind == ExampleKind::kFlatB0Nonzero) {
    if (D.is_zero() && E.is_zero())
      throw GeometryError(ErrorKind::kInvalidArgument,
                          "D and E both vanish identically; 1/g is undefined");
    if (branch != 1 && branch != -1)
      throw GeometryError(ErrorKind::kInvalidArgument, "branch must be +1 or -1");
  }
}

int NamedExample::orientation() const {
  switch (kind) {
    case ExampleKind::kStandardFlat: return +1;
    case ExampleKind::kFlatB0Nonzero: return -branch;
    default: return -1;
  }
}

Domain NamedExample::domain() const {
  switch (kind) {
    case ExampleKind::kRoundSphere:
      return [](const Point& p) {
        return p[0] > 0.0 && p[0] < std::numbers::pi && p[1] > 0.0 &&
               p[1] < std::numbers::pi && std::sin(p[0]) > kChartMargin &&
               std::sin(p[1]) > kChartMargin;
      };
    case ExampleKind::kFlatB0Nonzero:
      return [D = D, E = E, l = lambda, b = branch](const Point& p) {
        const double ig = D(p[2]) * std::sin(l * p[1]) + E(p[2]) * std::cos(l * p[1]);
        return b * ig > kChartMargin;
      };
    default:
      return whole_chart();
  }
}

Point NamedExample::base_point() const {
  switch (kind) {
    case ExampleKind::kStandardFlat: return {0.3, -0.1, 0.7};
    case ExampleKind::kRoundSphere: return {1.0, 0.8, 0.5};
    case ExampleKind::kElliptic: return {0.2, 0.3, -0.4};
    case ExampleKind::kFlatB0Zero: return {0.4, 0.3, 0.2};
    case ExampleKind::kFlatB0Nonzero: {
      // Scan u for the point deepest inside the requested branch.
      const Domain dom = domain();
      Point best(0.4, 0.3, 0.2);
      double depth = -1.0;
      for (int k = 0; k <= 400; ++k) {
        const double u = -3.2 + 6.4 * k / 400.0;
        const double ig = D(0.2) * std::sin(lambda * u) + E(0.2) * std::cos(lambda * u);
        if (branch * ig > depth) {
          depth = branch * ig;
          best = Point(0.4, u, 0.2);
        }
      }
      if (!dom(best))
        throw GeometryError(ErrorKind::kInvalidArgument,
                            "no admissible point on the requested branch of 1/g");
      return best;
    }
  }
  return Point::Zero();
}

std::array<std::array<double, 2>, 3> NamedExample::default_box() const {
  const Point c = base_point();
  const double h = kind == ExampleKind::kRoundSphere ? 0.3 : 0.25;
  return {{{c[0] - h, c[0] + h}, {c[1] - h, c[1] + h}, {c[2] - h, c[2] + h}}};
}

std::vector<Point> example_grid(const NamedExample& e, int n) {
  const auto box = e.default_box();
  const Domain dom = e.domain();
  std::vector<Point> out;
  auto coord = [&](int axis, int k) {
    return n == 1 ? 0.5 * (box[axis][0] + box[axis][1])
                  : box[axis][0] + (box[axis][1] - box[axis][0]) * k / (n - 1);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Point p(coord(0, i), coord(1, j), coord(2, k));
        bool ok = dom(p);
        for (int a = 0; a < 3 && ok; ++a)
          ok = dom(p + 0.02 * Vec3::Unit(a)) && dom(p - 0.02 * Vec3::Unit(a));
        if (ok) out.push_back(p);
      }
  return out;
}

MetricField example_metric(const NamedExample& e) {
  e.validate();
  return MetricField::from_generic(
      [e](const auto& x) { return metric_components(e, x); }, e.domain());
}

OneFormField example_contact(const NamedExample& e) {
  e.validate();
  return OneFormField::from_generic(
      [e](const auto& x) { return contact_components(e, x); }, e.domain());
}

ContactStructure example_structure(const NamedExample& e) {
  return {example_contact(e), e.lambda, example_metric(e), e.orientation()};
}

Mat3 example_metric(const NamedExample& e, const Point& p) {
  e.validate();
  if (!e.domain()(p))
    throw GeometryError(ErrorKind::kDomainViolation, e.name() + " chart excludes point", p);
  const auto m = metric_components(e, arr(p));
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = m[i][j];
  try {
    check_spd(g, p, Tolerances{});
  } catch (const GeometryError&) {
    throw GeometryError(ErrorKind::kDegenerateMetric,
                        e.name() + " metric degenerate for lambda=" +
                            std::to_string(e.lambda) + " f=" + e.f.to_string() +
                            " D=" + e.D.to_string() + " E=" + e.E.to_string(),
                        p);
  }
  return g;
}

Vec3 example_contact(const NamedExample& e, const Point& p) {
  e.validate();
  if (!e.domain()(p))
    throw GeometryError(ErrorKind::kDomainViolation, e.name() + " chart excludes point", p);
  return pt(contact_components(e, arr(p)));
}

CatalogSolutionData solution_data(const NamedExample& e, const Point& p) {
  e.validate();
  const double l = e.lambda;
  const double r = p[0], u = p[1], v = p[2];
  const cplx I(0.0, 1.0);
  CatalogSolutionData s;
  switch (e.kind) {
    case ExampleKind::kFlatB0Zero: {
      const double a0 = -l * l * v + e.f(u);
      s.a0 = a0;
      s.b0 = 0.0;
      s.Omega = a0 * (1.0 - I);
      s.eta_u = 1.0 - I;
      s.eta_v = I / l + (1.0 - I) * r;
      break;
    }
    case ExampleKind::kFlatB0Nonzero: {
      const double ig = e.D(v) * std::sin(l * u) + e.E(v) * std::cos(l * u);
      const double b0 = -l * (e.D(v) * std::cos(l * u) - e.E(v) * std::sin(l * u)) / ig;
      s.a0 = 0.0;
      s.b0 = b0;
      s.inv_g = ig;
      s.Omega = (b0 / l) * I + b0 * (1.0 - I) * r;
      s.eta_u = 1.0 - I;
      s.eta_v = (1.0 / ig) * (I / l + (1.0 - I) * r);
      break;
    }
    case ExampleKind::kElliptic: {
      const double q = 1.0 + u * u + v * v;
      const double O0 = omega0(e, u, v);
      const double P0 = l / kSqrt2 * q;
      const cplx ph = std::exp(-I * l * r);
      s.Omega0 = O0;
      s.P0 = P0;
      s.tau0 = kSqrt2 * l * cplx(u, -v) - I * l * O0;
      s.Omega = O0 * ph;
      s.eta_u = P0 * ph;
      s.eta_v = I * P0 * ph;
      break;
    }
    default:
      break;
  }
  return s;
}

// --- isometries -----------------------------------------------------------------

MetricField round_sphere_metric(double l) {
  NamedExample e;
  e.kind = ExampleKind::kRoundSphere;
  e.lambda = l;
  return example_metric(e);
}

OneFormField round_sphere_form(double l) {
  NamedExample e;
  e.kind = ExampleKind::kRoundSphere;
  e.lambda = l;
  return example_contact(e);
}

double sphere_embedding_residual(double l, const Point& p) {
  const double c = 1.0 / l;
  const Vec<J> x{J::variable(p[0], 0), J::variable(p[1], 1), J::variable(p[2], 2)};
  const std::array<J, 4> X{c * sin(x[0]) * sin(x[1]) * cos(x[2]),
                           c * sin(x[0]) * sin(x[1]) * sin(x[2]),
                           c * sin(x[0]) * cos(x[1]), c * cos(x[0])};
  Eigen::Matrix<double, 4, 3> Jm;
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 3; ++a) Jm(i, a) = X[i].d[a];
  const Mat3 pulled = Jm.transpose() * Jm;
  return (pulled - round_sphere_metric(l)(p)).cwiseAbs().maxCoeff();
}

Point elliptic_stage1(const NamedExample& e, const Point& t) { return pt(stage1(e, arr(t))); }
Point elliptic_stage2(const Point& p) { return pt(stage2(arr(p))); }

MetricField elliptic_intermediate_metric(double l) {
  return MetricField::from_generic([l](const auto& t) {
    using S = std::decay_t<decltype(t[0])>;
    using std::sin;
    const S s2 = sin(t[1]) * sin(t[1]);
    Mat<S> g;
    for (auto& row : g) row.fill(S(0.0));
    g[0][0] = S(1.0 / (l * l));
    g[1][1] = S(1.0 / (l * l));
    g[2][2] = s2 / (l * l);
    g[0][2] = g[2][0] = -s2 / (l * l);
    return g;
  });
}

OneFormField elliptic_intermediate_form(double l) {
  return OneFormField::from_generic([l](const auto& t) {
    using S = std::decay_t<decltype(t[0])>;
    using std::sin;
    return Vec<S>{S(1.0 / l), S(0.0), -sin(t[1]) * sin(t[1]) / l};
  });
}

IsometryMap isometry(const NamedExample& e) {
  e.validate();
  IsometryMap m;
  m.forward = [e](const Point& p) { return pt(isometry_components(e, arr(p))); };
  m.jacobian = [e](const Point& p) {
    return jet_jacobian([&e](const Vec<J>& x) { return isometry_components(e, x); }, p);
  };
  switch (e.kind) {
    case ExampleKind::kFlatB0Zero:
    case ExampleKind::kFlatB0Nonzero: {
      NamedExample std_flat;
      std_flat.lambda = e.lambda;
      m.target_model = "euclidean";
      m.source_metric = example_metric(e);
      m.source_form = example_contact(e);
      m.target_metric = MetricField::euclidean();
      m.target_form = example_contact(std_flat);
      m.source_domain = e.domain();
      break;
    }
    case ExampleKind::kElliptic: {
      m.target_model = "elliptic";
      m.source_metric = round_sphere_metric(e.lambda);
      m.source_form = round_sphere_form(e.lambda);
      m.target_metric = example_metric(e);
      m.target_form = example_contact(e);
      m.source_domain = [](const Point& p) {
        const double sr = std::sin(p[0]), st = std::sin(p[1]);
        if (!(p[0] > 0.0 && p[0] < std::numbers::pi && p[1] > 0.0 &&
              p[1] < std::numbers::pi))
          return false;
        if (sr < kChartMargin || st < kChartMargin) return false;
        if (std::abs(sr * std::cos(p[1])) < kChartMargin) return false;
        const double th = stage2(arr(p))[1];
        return th > kChartMargin && th < 0.5 * std::numbers::pi - kChartMargin;
      };
      break;
    }
    default:
      m.target_model = e.kind == ExampleKind::kRoundSphere ? "round-sphere" : "euclidean";
      m.source_metric = m.target_metric = example_metric(e);
      m.source_form = m.target_form = example_contact(e);
      m.source_domain = e.domain();
      break;
  }
  return m;
}

Point isometry_apply(const NamedExample& e, const Point& p) {
  const IsometryMap m = isometry(e);
  if (!m.source_domain(p))
    throw GeometryError(ErrorKind::kDomainViolation, "isometry source chart excludes point", p);
  return m.forward(p);
}

std::vector<Point> isometry_grid(const NamedExample& e, int n) {
  if (e.kind != ExampleKind::kElliptic) return example_grid(e, n);
  const IsometryMap m = isometry(e);
  std::vector<Point> out;
  const std::array<std::array<double, 2>, 3> box{{{0.6, 1.3}, {0.5, 1.2}, {0.0, 2.0}}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        auto c = [&](int a, int t) {
          return n == 1 ? 0.5 * (box[a][0] + box[a][1])
                        : box[a][0] + (box[a][1] - box[a][0]) * t / (n - 1);
        };
        const Point p(c(0, i), c(1, j), c(2, k));
        bool ok = m.source_domain(p);
        for (int a = 0; a < 3 && ok; ++a)
          ok = m.source_domain(p + 0.02 * Vec3::Unit(a)) &&
               m.source_domain(p - 0.02 * Vec3::Unit(a));
        if (ok) out.push_back(p);
      }
  return out;
}

PullbackResidual pullback_residual(const IsometryMap& m, const std::vector<Point>& grid,
                                   const DiffConfig& cfg, bool use_fd) {
  PullbackResidual res;
  res.min_abs_det = std::numeric_limits<double>::infinity();
  for (const Point& p : grid) {
    if (!m.source_domain(p))
      throw GeometryError(ErrorKind::kDomainViolation, "grid point outside source chart", p);
    const Mat3 Jm = use_fd ? jacobian(m.forward, p, cfg, m.source_domain) : m.jacobian(p);
    const double det = Jm.determinant();
    if (std::abs(det) < cfg.tol.singular_jacobian)
      throw GeometryError(ErrorKind::kSingularJacobian, "singular isometry Jacobian", p);
    const Point q = m.forward(p);
    const Mat3 pg = Jm.transpose() * m.target_metric(q) * Jm;
    const Vec3 pa = Jm.transpose() * m.target_form(q);
    const double em = (pg - m.source_metric(p)).cwiseAbs().maxCoeff();
    const double ef = (pa - m.source_form(p)).cwiseAbs().maxCoeff();
    if (std::max(em, ef) > std::max(res.metric, res.form)) res.worst_point = p;
    res.metric = std::max(res.metric, em);
    res.form = std::max(res.form, ef);
    res.min_abs_det = std::min(res.min_abs_det, std::abs(det));
  }
  return res;
}

PullbackResidual pullback_residual(const NamedExample& e, const std::vector<Point>& grid,
                                   const DiffConfig& cfg, bool use_fd) {
  return pullback_residual(isometry(e), grid, cfg, use_fd);
}

std::vector<NamedResidual> reduced_system_residual(const NamedExample& e, const Point& p) {
  e.validate();
  if (!e.domain()(p))
    throw GeometryError(ErrorKind::kDomainViolation, e.name() + " chart excludes point", p);
  switch (e.kind) {
    case ExampleKind::kFlatB0Zero:
    case ExampleKind::kFlatB0Nonzero:
      return flat_reduced(e, p);
    case ExampleKind::kElliptic:
      return elliptic_reduced(e, p);
    default:
      return {};
  }
}

std::string to_string(EinsteinBranch b) {
  switch (b) {
    case EinsteinBranch::kElliptic: return "elliptic";
    case EinsteinBranch::kFlat: return "flat";
    case EinsteinBranch::kNoSolution: return "no-solution";
  }
  return "unknown";
}

BranchResult einstein_branch(double lambda, double R, double rel_tol) {
  if (!(lambda > 0.0))
    throw GeometryError(ErrorKind::kInvalidArgument, "lambda must be positive");
  BranchResult b;
  const double scale = 6.0 * lambda * lambda;
  const double rad = lambda * lambda - R / 6.0;
  if (rad >= -rel_tol * lambda * lambda) b.sigma_abs = std::sqrt(std::max(0.0, rad));
  b.elliptic_obstruction = std::abs(rad);
  b.flat_obstruction = std::abs(R) / 3.0;
  if (std::abs(R - scale) <= rel_tol * scale)
    b.branch = EinsteinBranch::kElliptic;
  else if (std::abs(R) <= rel_tol * scale)
    b.branch = EinsteinBranch::kFlat;
  return b;
}

std::optional<FrameField> gauge_frame(const NamedExample& e) {
  e.validate();
  const MetricField g = example_metric(e);
  const double l = e.lambda;
  if (e.kind == ExampleKind::kRoundSphere) return std::nullopt;
  if (e.kind == ExampleKind::kStandardFlat) {
    return FrameField(g, [l](const Point& p) {
      const double s = std::sin(2.0 * l * p[2]), c = std::cos(2.0 * l * p[2]);
      // Phase chosen so that sigma is real and positive.
      const double h = 1.0 / std::numbers::sqrt2;
      OrthonormalTriad t;
      t[0] = Vec3(s, c, 0.0);
      t[1] = h * Vec3(c, -s, -1.0);
      t[2] = h * Vec3(-c, s, -1.0);
      return t;
    });
  }
  return FrameField(g, [e](const Point& p) {
    const CatalogSolutionData s = solution_data(e, p);
    const CVec3 delta(*s.Omega, *s.eta_u, *s.eta_v);
    OrthonormalTriad t;
    t[0] = Vec3::UnitX();
    t[1] = std::numbers::sqrt2 * delta.real();
    t[2] = -std::numbers::sqrt2 * delta.imag();
    return t;
  });
}

}  // namespace npp3
