#include <gtest/gtest.h>

#include <random>

#include "npp3/npp3.hpp"
#include "oracle.hpp"

using namespace npp3;

namespace {

NamedExample make(ExampleKind k, double lambda, std::vector<double> f = {0.0},
                  std::vector<double> D = {1.0}, std::vector<double> E = {0.0}) {
  NamedExample e;
  e.kind = k;
  e.lambda = lambda;
  e.f = Polynomial(std::move(f));
  e.D = Polynomial(std::move(D));
  e.E = Polynomial(std::move(E));
  return e;
}

std::vector<Point> random_in_box(const std::array<std::array<double, 2>, 3>& box, const Domain& dom,
                                 int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> d;
  for (const auto& b : box) d.emplace_back(b[0], b[1]);
  std::vector<Point> out;
  while (static_cast<int>(out.size()) < n) {
    const Point p(d[0](rng), d[1](rng), d[2](rng));
    if (dom(p)) out.push_back(p);
  }
  return out;
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Polynomial, EvaluateDeriveIntegrate) {
  const Polynomial p({1.0, -2.0, 3.0});
  EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 12.0);
  EXPECT_EQ(p.derivative().coefficients(), (std::vector<double>{-2.0, 6.0}));
  EXPECT_EQ(p.antiderivative().coefficients(), (std::vector<double>{0.0, 1.0, -1.0, 1.0}));
  EXPECT_DOUBLE_EQ(p.antiderivative()(0.0), 0.0);
  EXPECT_TRUE(Polynomial({0.0, 0.0}).is_zero());
  EXPECT_TRUE(Polynomial().is_zero());
  EXPECT_FALSE(p.is_zero());
}

TEST(Polynomial, JetEvaluation) {
  const Polynomial p({0.0, 0.0, 1.0});
  const Jet<double> x = Jet<double>::variable(3.0, 0);
  const Jet<double> y = p(x);
  EXPECT_DOUBLE_EQ(y.v, 9.0);
  EXPECT_DOUBLE_EQ(y.d[0], 6.0);
}

TEST(ExampleKind, NamesRoundTrip) {
  for (ExampleKind k : all_example_kinds()) EXPECT_EQ(parse_example_kind(to_string(k)), k);
  EXPECT_FALSE(parse_example_kind("hyperbolic").has_value());
  EXPECT_EQ(all_example_kinds().size(), 5u);
}

TEST(Metric, FlatB0ZeroOrigin) {
  const Mat3 g = example_metric(make(ExampleKind::kFlatB0Zero, 1.0), Point(0, 0, 0));
  Mat3 want;
  want << 1, 0, 0, 0, 0.5, 0.5, 0, 0.5, 1;
  EXPECT_LT(max_abs(g - want), 1e-15);
}

TEST(Metric, StandardFlat) {
  const NamedExample e = make(ExampleKind::kStandardFlat, 1.0);
  for (double z : {0.0, 0.4, -1.1}) {
    const Point p(0.2, -0.3, z);
    EXPECT_LT(max_abs(example_metric(e, p) - Mat3::Identity()), 1e-15);
    EXPECT_LT((example_contact(e, p) - Vec3(std::sin(2 * z), std::cos(2 * z), 0)).norm(), 1e-15);
  }
}

TEST(Metric, EllipticOrigin) {
  const NamedExample e = make(ExampleKind::kElliptic, 1.0);
  const Mat3 g = example_metric(e, Point(0, 0, 0));
  EXPECT_NEAR(g(2, 2), 1.0, 1e-14);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-14);
  EXPECT_NEAR(g(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(g(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(*solution_data(e, Point(0, 0, 0)).Omega0, 0.0, 1e-15);
}

TEST(Metric, SolutionDataInvariants) {
  const NamedExample a = make(ExampleKind::kFlatB0Zero, 1.5, {0.3, 1.0});
  const Point p(0.1, 0.4, -0.2);
  EXPECT_NEAR(*solution_data(a, p).a0, -1.5 * 1.5 * p[2] + 0.3 + p[1], 1e-14);
  const NamedExample el = make(ExampleKind::kElliptic, 2.0);
  const Point q(0.0, 0.3, -0.4);
  const double zz = 0.3 * 0.3 + 0.4 * 0.4;
  EXPECT_NEAR(*solution_data(el, q).P0, 2.0 / std::sqrt(2.0) * (1 + zz), 1e-14);
}

TEST(Metric, DegenerateParametersRejected) {
  EXPECT_THROW(make(ExampleKind::kFlatB0Nonzero, 1.0, {0.0}, {0.0}, {0.0}).validate(),
               GeometryError);
  EXPECT_THROW(make(ExampleKind::kStandardFlat, 0.0).validate(), GeometryError);
  EXPECT_THROW(make(ExampleKind::kStandardFlat, -1.0).validate(), GeometryError);
}

TEST(Metric, DomainViolation) {
  const NamedExample e = make(ExampleKind::kFlatB0Nonzero, 1.0, {0.0}, {1.0}, {0.0});
  try {
    example_metric(e, Point(0.0, 0.0, 0.0));  // D sin(lambda u) + E cos(lambda u) = 0
    FAIL();
  } catch (const GeometryError& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kDomainViolation);
  }
}

TEST(Isometry, FlatB0ZeroMapsToOrigin) {
  const Point x = isometry_apply(make(ExampleKind::kFlatB0Zero, 1.0), Point(0.5, 0, 0));
  EXPECT_LT(x.norm(), 1e-14);
}

TEST(Isometry, FlatB0ZeroRandomPoints) {
  const DiffConfig cfg;
  for (std::vector<double> f : {std::vector<double>{0.0}, {1.0}, {0.0, 1.0}, {1.0, 1.0},
                                {1.0, 0.0, 1.0}}) {
    const NamedExample e = make(ExampleKind::kFlatB0Zero, 1.0, f);
    const auto pts = random_in_box(e.default_box(), e.domain(), 100, 7);
    const auto r = pullback_residual(e, pts, cfg);
    EXPECT_LT(r.metric, 1e-6) << Polynomial(f).to_string();
    EXPECT_LT(r.form, 1e-6) << Polynomial(f).to_string();
    EXPECT_GT(r.min_abs_det, 1e-3);
  }
}

TEST(Isometry, FlatB0NonzeroRandomPoints) {
  const DiffConfig cfg;
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
      {{1.0}, {0.0}}, {{1.0}, {0.0, 1.0}}, {{0.0}, {1.0}}, {{1.0, 0.0, 1.0}, {1.0}}};
  for (const auto& [D, E] : cases) {
    for (double l : {1.0, 2.0}) {
      const NamedExample e = make(ExampleKind::kFlatB0Nonzero, l, {0.0}, D, E);
      const auto pts = random_in_box(e.default_box(), e.domain(), 100, 11);
      const auto r = pullback_residual(e, pts, cfg);
      EXPECT_LT(r.metric, 1e-5) << l;
      EXPECT_LT(r.form, 1e-5) << l;
    }
  }
}

TEST(Isometry, FiniteDifferenceJacobianAgrees) {
  const DiffConfig cfg;
  const NamedExample e = make(ExampleKind::kFlatB0Nonzero, 1.0, {0.0}, {1.0}, {0.0, 1.0});
  const auto grid = isometry_grid(e, 3);
  EXPECT_LT(pullback_residual(e, grid, cfg, true).metric, 1e-6);
  EXPECT_LT(pullback_residual(e, grid, cfg, true).form, 1e-6);
}

TEST(Isometry, EllipticToRoundSphere) {
  const DiffConfig cfg;
  for (double l : {1.0, 2.0}) {
    for (std::vector<double> f : {std::vector<double>{0.0}, {0.0, 1.0}}) {
      const NamedExample e = make(ExampleKind::kElliptic, l, f);
      const IsometryMap m = isometry(e);
      EXPECT_EQ(m.target_model.empty(), false);
      const auto grid = isometry_grid(e, 5);
      ASSERT_GT(grid.size(), 50u);
      const auto r = pullback_residual(m, grid, cfg);
      EXPECT_LT(r.metric, 1e-5) << l;
      EXPECT_LT(r.form, 1e-5) << l;
    }
  }
}

TEST(Isometry, RoundSphereEmbedding) {
  for (double l : {1.0, 2.0}) {
    const NamedExample e = make(ExampleKind::kRoundSphere, l);
    for (const Point& p : example_grid(e, 3)) EXPECT_LT(sphere_embedding_residual(l, p), 1e-10);
  }
}

TEST(Isometry, IntegrationConstantIrrelevant) {
  const DiffConfig cfg;
  const NamedExample e = make(ExampleKind::kFlatB0Zero, 1.0, {1.0, 0.0, 1.0});
  const IsometryMap base = isometry(e);
  IsometryMap shifted = base;
  const Vec3 c(0.37, -1.2, 0.0);
  shifted.forward = [f = base.forward, c](const Point& p) { return Point(f(p) + c); };
  const auto grid = example_grid(e, 3);
  const auto r0 = pullback_residual(base, grid, cfg, true);
  const auto r1 = pullback_residual(shifted, grid, cfg, true);
  EXPECT_LT(r1.metric, 1e-6);
  EXPECT_LT(r1.form, 1e-6);
  EXPECT_NEAR(r0.metric, r1.metric, 1e-8);
  EXPECT_NEAR(r0.form, r1.form, 1e-8);
}

TEST(Reduced, FlatB0Zero) {
  const NamedExample e = make(ExampleKind::kFlatB0Zero, 1.0, {1.0, 1.0});
  for (const Point& p : random_in_box(e.default_box(), e.domain(), 10, 3)) {
    const auto res = reduced_system_residual(e, p);
    ASSERT_FALSE(res.empty());
    for (const auto& r : res) EXPECT_LT(std::abs(r.value), 1e-8) << r.name;
  }
}

TEST(Reduced, FlatB0Nonzero) {
  for (double l : {1.0, 1.5}) {
    const NamedExample e = make(ExampleKind::kFlatB0Nonzero, l, {0.0}, {1.0}, {0.0, 1.0});
    for (const Point& p : random_in_box(e.default_box(), e.domain(), 10, 5)) {
      const auto res = reduced_system_residual(e, p);
      ASSERT_FALSE(res.empty());
      for (const auto& r : res) EXPECT_LT(std::abs(r.value), 1e-8) << r.name;
    }
  }
}

TEST(Reduced, EllipticIncludingLiouville) {
  for (double l : {1.0, 2.0}) {
    const NamedExample e = make(ExampleKind::kElliptic, l, {0.0, 1.0});
    for (const Point& p : random_in_box(e.default_box(), e.domain(), 10, 9)) {
      const auto res = reduced_system_residual(e, p);
      bool saw_liouville = false;
      for (const auto& r : res) {
        EXPECT_LT(std::abs(r.value), 1e-8) << r.name;
        if (r.name.find("ln P0") != std::string::npos) {
          saw_liouville = true;
          EXPECT_LT(std::abs(r.value), 1e-10);
        }
      }
      EXPECT_TRUE(saw_liouville);
    }
  }
}

TEST(Reduced, LiouvilleIndependentCheck) {
  // 2 P^2 d^2 ln P / dz dzbar = lambda^2 with d^2/dz dzbar = Laplacian / 4.
  const double l = 1.7;
  auto lnP = [l](double u, double v) { return std::log(l / std::sqrt(2.0) * (1 + u * u + v * v)); };
  const double u = 0.3, v = -0.6, h = 1e-3;
  const double lap = (lnP(u + h, v) + lnP(u - h, v) + lnP(u, v + h) + lnP(u, v - h) -
                      4 * lnP(u, v)) / (h * h);
  const double P = std::exp(lnP(u, v));
  EXPECT_NEAR(2 * P * P * lap / 4, l * l, 1e-5);
}

TEST(Branch, Classifier) {
  const auto a = einstein_branch(1.0, 6.0);
  EXPECT_EQ(a.branch, EinsteinBranch::kElliptic);
  EXPECT_NEAR(*a.sigma_abs, 0.0, 1e-15);
  const auto b = einstein_branch(1.0, 0.0);
  EXPECT_EQ(b.branch, EinsteinBranch::kFlat);
  EXPECT_NEAR(*b.sigma_abs, 1.0, 1e-15);
  const auto c = einstein_branch(1.0, -6.0);
  EXPECT_EQ(c.branch, EinsteinBranch::kNoSolution);
  EXPECT_NEAR(*c.sigma_abs, std::sqrt(2.0), 1e-15);
  const auto d = einstein_branch(1.0, 3.0);
  EXPECT_EQ(d.branch, EinsteinBranch::kNoSolution);
  EXPECT_NEAR(*d.sigma_abs, std::sqrt(0.5), 1e-15);
  const auto e = einstein_branch(1.0, 7.0);
  EXPECT_EQ(e.branch, EinsteinBranch::kNoSolution);
  EXPECT_FALSE(e.sigma_abs.has_value());
  EXPECT_EQ(einstein_branch(2.0, 24.0).branch, EinsteinBranch::kElliptic);
  EXPECT_EQ(einstein_branch(2.0, 6.0).branch, EinsteinBranch::kNoSolution);
  EXPECT_EQ(einstein_branch(2.0, 24.0 * (1 + 1e-7)).branch, EinsteinBranch::kNoSolution);
  EXPECT_THROW(einstein_branch(0.0, 0.0), GeometryError);
  EXPECT_THROW(einstein_branch(-1.0, 0.0), GeometryError);
}

TEST(Branch, HyperbolicSamplesHaveNoBranch) {
  for (double R : {-0.5, -6.0, -60.0})
    for (double l : {0.5, 1.0, 3.0}) {
      const auto b = einstein_branch(l, R);
      EXPECT_EQ(b.branch, EinsteinBranch::kNoSolution);
      EXPECT_GT(b.elliptic_obstruction, 0.0);
      EXPECT_GT(b.flat_obstruction, 0.0);
    }
}

TEST(Einstein, AllExamplesAgainstOracle) {
  for (ExampleKind k : all_example_kinds()) {
    for (double l : {1.0, 2.0}) {
      const NamedExample e = make(k, l, {0.0, 1.0}, {1.0}, {0.0, 1.0});
      const MetricField g = example_metric(e);
      const auto grid = example_grid(e, 2);
      for (const Point& p : grid) {
        const oracle::Mat3 Ric = oracle::ricci([g](const oracle::Vec3& q) { return g(q); }, p);
        const double R = (g(p).inverse() * Ric).trace();
        EXPECT_LT(max_abs(Ric - R / 3.0 * g(p)), 1e-4) << e.name() << " " << l;
      }
    }
  }
}

TEST(Einstein, LibraryCurvatureOnGrids) {
  const DiffConfig cfg;
  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = make(k, 1.0, {1.0, 1.0}, {1.0}, {0.0, 1.0});
    const MetricField g = example_metric(e);
    for (const Point& p : example_grid(e, 3))
      EXPECT_LT(curvature(g, p, cfg).einstein_residual(g(p)), 1e-4) << e.name();
  }
}

TEST(Einstein, FrameLevelBranch) {
  DiffConfig cfg;
  cfg.scheme = DiffScheme::kCentral4;
  cfg.step = Vec3::Constant(1e-4);
  cfg.spin_step = 1e-3;
  for (ExampleKind k : all_example_kinds()) {
    for (double l : {1.0, 2.0}) {
      const NamedExample e = make(k, l, {0.0, 1.0}, {1.0}, {0.0, 1.0});
      const ContactStructure c = example_structure(e);
      const FrameField frame = gauge_frame(e).value_or(adapted_frame(c));
      const auto S = SpinCoefficientField::from_frame(frame, cfg);
      const Point p = e.base_point();
      const double R = curvature(c.g, p, cfg).scalar;
      const SpinCoefficients s = S(p);
      const double sig = std::abs(s.sigma);
      EXPECT_NEAR(sig * sig, l * l - R / 6.0, 1e-4) << e.name();
      const double scale = 6.0 * l * l;
      const bool elliptic = sig < 1e-4 && std::abs(R - scale) < 1e-3 * scale;
      const bool flat = std::abs(s.tau) < 1e-4 && std::abs(R) < 1e-3 * scale;
      EXPECT_NE(elliptic, flat) << e.name() << " l=" << l;
    }
  }
}
