#include "npp3/perturbed.hpp"

#include <random>

namespace npp3 {

namespace {

// Monomials x^a y^b z^c with a + b + c <= 3.
constexpr int kMonomials = 20;

std::array<std::array<int, 3>, kMonomials> exponents() {
  std::array<std::array<int, 3>, kMonomials> e{};
  int k = 0;
  for (int d = 0; d <= 3; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) e[k++] = {a, b, d - a - b};
  return e;
}

template <class S>
S power(const S& x, int n) {
  S r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

struct Cubic {
  std::array<double, kMonomials> c{};

  template <class S>
  S operator()(const std::array<S, 3>& x) const {
    static const auto ex = exponents();
    S acc(0.0);
    for (int k = 0; k < kMonomials; ++k)
      acc = acc + c[k] * (power(x[0], ex[k][0]) * power(x[1], ex[k][1]) * power(x[2], ex[k][2]));
    return acc;
  }
};

}  // namespace

PerturbedMetric perturbed_metric(std::uint64_t seed, double amplitude, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (;;) {
    std::array<Cubic, 6> P;  // (00, 11, 22, 01, 02, 12)
    for (auto& p : P)
      for (double& c : p.c) c = U(rng);
    std::array<Cubic, 3> F;
    for (auto& p : F)
      for (double& c : p.c) c = U(rng);
    auto comps = [P, amplitude](const auto& x) {
      using S = std::decay_t<decltype(x[0])>;
      std::array<std::array<S, 3>, 3> g;
      const int idx[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          g[i][j] = (i == j ? S(1.0) : S(0.0)) + amplitude * P[idx[i][j]](x);
      return g;
    };
    MetricField g = MetricField::from_generic(comps);
    // Positive definiteness on a coarse lattice of the box, with margin.
    bool ok = true;
    for (int i = 0; i <= 4 && ok; ++i)
      for (int j = 0; j <= 4 && ok; ++j)
        for (int k = 0; k <= 4 && ok; ++k) {
          const Point p(-box + 0.5 * box * i, -box + 0.5 * box * j, -box + 0.5 * box * k);
          const Eigen::SelfAdjointEigenSolver<Mat3> es(g(p));
          ok = es.eigenvalues()[0] > 0.5;
        }
    if (!ok) continue;
    PerturbedMetric out;
    out.metric = g;
    out.box = box;
    out.e0 = [F](const Point& p) {
      const std::array<double, 3> x{p[0], p[1], p[2]};
      return Vec3(1.0 + 0.3 * F[0](x), 0.3 * F[1](x), 0.3 * F[2](x));
    };
    return out;
  }
}

std::vector<Point> random_points(std::uint64_t seed, int n, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-box, box);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    const double a = U(rng), b = U(rng), c = U(rng);
    pts.emplace_back(a, b, c);
  }
  return pts;
}

}  // namespace npp3
