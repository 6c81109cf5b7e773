#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "npp3/npp3.hpp"

using namespace npp3;

namespace {

NamedExample example(ExampleKind k, double lambda = 1.0) {
  NamedExample e;
  e.kind = k;
  e.lambda = lambda;
  e.f = Polynomial({0.0, 1.0});
  e.D = Polynomial({1.0});
  e.E = Polynomial({0.0, 1.0});
  return e;
}

FrameField constant_frame(const MetricField& g, const OrthonormalTriad& t) {
  return FrameField(g, [t](const Point&) { return t; });
}

void expect_vec(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), tol) << a.transpose() << " vs " << b.transpose();
}

}  // namespace

TEST(GramSchmidt, CoordinateCandidate) {
  const auto t = gram_schmidt_triad(Vec3(0, 0, 5), Mat3::Identity(), Point::Zero());
  expect_vec(t[0], Vec3(0, 0, 1), 1e-15);
  expect_vec(t[1], Vec3(1, 0, 0), 1e-15);
  expect_vec(t[2], Vec3(0, 1, 0), 1e-15);
}

TEST(GramSchmidt, RightHandedFlip) {
  const auto t = gram_schmidt_triad(Vec3(0, 1, 0), Mat3::Identity(), Point::Zero());
  expect_vec(t[0], Vec3(0, 1, 0), 1e-15);
  expect_vec(t[1], Vec3(1, 0, 0), 1e-15);
  expect_vec(t[2], Vec3(0, 0, -1), 1e-15);
  EXPECT_GT(t.handedness(), 0.0);
  const auto s = gram_schmidt_triad(Vec3(0, 1, 0), Mat3::Identity(), Point::Zero(), -1);
  EXPECT_LT(s.handedness(), 0.0);
}

TEST(GramSchmidt, RoundSphereReeb) {
  const NamedExample e = example(ExampleKind::kRoundSphere);
  const ContactStructure c = example_structure(e);
  const Point p = e.base_point();
  const Mat3 g = c.g(p);
  const auto t = gram_schmidt_triad(reeb_field(c, p, DiffConfig{}), g, p, e.orientation());
  EXPECT_LT(t.orthonormality_residual(g), 1e-10);
}

TEST(GramSchmidt, ZeroCandidateRejected) {
  EXPECT_THROW(gram_schmidt_triad(Vec3::Zero(), Mat3::Identity(), Point::Zero()), GeometryError);
}

TEST(ComplexTriad, Duality) {
  const PerturbedMetric pm = perturbed_metric(5);
  const Point p(0.1, 0.3, -0.2);
  const Mat3 g = pm.metric(p);
  const auto t = gram_schmidt_triad(pm.e0(p), g, p);
  const ComplexTriad T = ComplexTriad::from(t, g);
  EXPECT_LT(T.duality_residual(), 1e-12);
  EXPECT_LT((T.Z[kMinus] - T.Z[kPlus].conjugate()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinCoefficients, ConstantTriadInEuclideanSpace) {
  const FrameField f = constant_frame(MetricField::euclidean(), OrthonormalTriad{});
  const SpinCoefficients s = spin_coefficients(f, Point(0.2, 0.1, 0.3), DiffConfig{});
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      for (int q = 0; q < 3; ++q) EXPECT_EQ(std::abs(s(m, n, q)), 0.0);
}

TEST(SpinCoefficients, StandardFlat) {
  const NamedExample e = example(ExampleKind::kStandardFlat);
  const FrameField f = adapted_frame(example_structure(e));
  const SpinCoefficients s = spin_coefficients(f, e.base_point(), DiffConfig{});
  EXPECT_LT(std::abs(s.kappa), 1e-6);
  EXPECT_LT(std::abs(s.rho.real()), 1e-6);
  EXPECT_NEAR(std::abs(s.rho.imag()), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(s.sigma), 1.0, 1e-6);
}

TEST(SpinCoefficients, RoundSphere) {
  const NamedExample e = example(ExampleKind::kRoundSphere);
  const FrameField f = adapted_frame(example_structure(e));
  const SpinCoefficients s = spin_coefficients(f, e.base_point(), DiffConfig{});
  EXPECT_LT(std::abs(s.kappa), 1e-6);
  EXPECT_LT(std::abs(s.rho.real()), 1e-6);
  EXPECT_NEAR(std::abs(s.rho.imag()), 1.0, 1e-6);
  EXPECT_LT(std::abs(s.sigma), 1e-6);
}

TEST(SpinCoefficients, AdaptedFramesGivePositiveTwist) {
  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = example(k, 1.5);
    const FrameField f = adapted_frame(example_structure(e));
    const SpinCoefficients s = spin_coefficients(f, e.base_point(), DiffConfig{});
    EXPECT_NEAR(s.rho.imag(), 1.5, 1e-6) << e.name();
  }
}

TEST(SpinCoefficients, TableAntisymmetryAndNamedEntries) {
  const PerturbedMetric pm = perturbed_metric(8);
  const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
  const SpinCoefficients s = spin_coefficients(f, Point(0.1, -0.1, 0.2), DiffConfig{});
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n)
      for (int q = 0; q < 3; ++q) EXPECT_LT(std::abs(s(m, n, q) + s(n, m, q)), 1e-10);
  EXPECT_LT(s.antisymmetry_residual, 1e-6);
  EXPECT_EQ(s.rho, s(kPlus, k0, kMinus));
  EXPECT_EQ(s.sigma, s(kPlus, k0, kPlus));
  EXPECT_EQ(s.tau, s(kPlus, kMinus, kMinus));
  EXPECT_EQ(s.kappa, s(kPlus, k0, k0));
  EXPECT_EQ(s.epsilon, s(kPlus, kMinus, k0));
}

TEST(SpinCoefficients, GaugeCovariance) {
  const NamedExample e = example(ExampleKind::kFlatB0Zero);
  const FrameField f = adapted_frame(example_structure(e));
  const Point p = e.base_point();
  const DiffConfig cfg;
  const SpinCoefficients s0 = spin_coefficients(f, p, cfg);
  for (double c : {std::numbers::pi / 6, std::numbers::pi / 3}) {
    const SpinCoefficients s = spin_coefficients(rotate_frame(f, c), p, cfg);
    EXPECT_LT(std::abs(s.rho - s0.rho), 1e-8);
    EXPECT_LT(std::abs(s.sigma - std::exp(cplx(0, 2 * c)) * s0.sigma), 1e-8);
    EXPECT_NEAR(std::abs(s.sigma), std::abs(s0.sigma), 1e-8);
  }
}

TEST(SpinCoefficients, FrameDriftDetected) {
  OrthonormalTriad bad;
  bad[1] = Vec3(1.0, 0.1, 0.0);
  const FrameField f = constant_frame(MetricField::euclidean(), bad);
  try {
    spin_coefficients(f, Point::Zero(), DiffConfig{});
    FAIL() << "expected frame drift";
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFrameDrift);
  }
}

TEST(OpticalScalars, ConstantField) {
  const auto o = optical_scalars_direct([](const Point&) { return Vec3(0, 0, 1); },
                                        MetricField::euclidean(), Point(1, 2, 3), DiffConfig{});
  EXPECT_NEAR(o.divergence, 0.0, 1e-12);
  EXPECT_NEAR(o.twist, 0.0, 1e-12);
  EXPECT_NEAR(o.shear_modulus, 0.0, 1e-6);
}

TEST(OpticalScalars, RadialField) {
  const auto o = optical_scalars_direct([](const Point& p) { return Vec3(p / p.norm()); },
                                        MetricField::euclidean(), Point(2, 0, 0), DiffConfig{});
  EXPECT_NEAR(o.divergence, 0.5, 1e-8);
  EXPECT_NEAR(o.twist, 0.0, 1e-6);
  EXPECT_NEAR(o.shear_modulus, 0.0, 1e-4);
  EXPECT_NEAR(o.geodesic_residual, 0.0, 1e-8);
}

TEST(OpticalScalars, StandardFlatReeb) {
  const NamedExample e = example(ExampleKind::kStandardFlat);
  const ContactStructure c = example_structure(e);
  const auto o = optical_scalars_direct(reeb_vector_field(c), c.g, e.base_point(), DiffConfig{});
  EXPECT_NEAR(o.divergence, 0.0, 1e-6);
  EXPECT_NEAR(o.twist, 1.0, 1e-6);
  EXPECT_NEAR(o.shear_modulus, 1.0, 1e-6);
}

TEST(OpticalScalars, DirectAgreesWithSpinOnCatalog) {
  const DiffConfig cfg;
  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = example(k);
    const ContactStructure c = example_structure(e);
    const FrameField f = adapted_frame(c);
    for (const Point& p : example_grid(e, 2)) {
      const auto d = optical_scalars_direct(reeb_vector_field(c), c.g, p, cfg, e.orientation());
      const auto s = optical_scalars_from_spin(spin_coefficients(f, p, cfg));
      EXPECT_NEAR(d.divergence, s.divergence, 1e-5) << e.name();
      EXPECT_NEAR(std::abs(d.twist), std::abs(s.twist), 1e-5) << e.name();
      EXPECT_NEAR(d.shear_modulus, s.shear_modulus, 1e-5) << e.name();
    }
  }
}

TEST(Directional, ConstantFunction) {
  const ComplexTriad T = ComplexTriad::from(OrthonormalTriad{}, Mat3::Identity());
  const Directional d = directional(ScalarField([](const Point&) { return 3.0; }), T, Point::Zero(), DiffConfig{});
  EXPECT_EQ(std::abs(d.D) + std::abs(d.delta) + std::abs(d.delta_bar), 0.0);
}

TEST(Directional, StandardFlatFrameOnZ) {
  OrthonormalTriad t;
  t[0] = Vec3(0, 1, 0);
  t[1] = Vec3(1, 0, 0);
  t[2] = Vec3(0, 0, -1);
  const ComplexTriad T = ComplexTriad::from(t, Mat3::Identity());
  const Directional d = directional(ScalarField([](const Point& p) { return p[2]; }), T, Point::Zero(), DiffConfig{});
  const double h = 1.0 / std::numbers::sqrt2;
  EXPECT_LT(std::abs(d.D), 1e-10);
  EXPECT_LT(std::abs(d.delta - cplx(0, h)), 1e-10);
  EXPECT_LT(std::abs(d.delta_bar - cplx(0, -h)), 1e-10);
}

TEST(Directional, AffineParameterAlongGauge) {
  const NamedExample e = example(ExampleKind::kFlatB0Zero);
  const FrameField f = *gauge_frame(e);
  const Point p = e.base_point();
  const Directional d = directional(ScalarField([](const Point& q) { return q[0]; }), f.complex_triad(p), p,
                                    DiffConfig{});
  EXPECT_NEAR(d.D.real(), 1.0, 1e-10);
  EXPECT_NEAR(d.D.imag(), 0.0, 1e-10);
  EXPECT_LT(std::abs(d.delta - *solution_data(e, p).Omega), 1e-8);
}

TEST(Directional, RealFunctionConjugateSymmetry) {
  const PerturbedMetric pm = perturbed_metric(2);
  const Point p(0.1, 0.2, 0.3);
  const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
  const Directional d = directional(ScalarField([](const Point& q) { return std::sin(q[0]) * q[1] + q[2]; }),
                                    f.complex_triad(p), p, DiffConfig{});
  EXPECT_LT(std::abs(d.delta_bar - std::conj(d.delta)), 1e-12);
}

TEST(Commutators, ConstantFunction) {
  const NamedExample e = example(ExampleKind::kElliptic);
  const FrameField f = adapted_frame(example_structure(e));
  const auto c = commutator_residuals([](const Point&) { return 1.0; }, f, e.base_point(), DiffConfig{});
  EXPECT_LT(std::abs(c.c1) + std::abs(c.c2), 1e-12);
}

TEST(Commutators, StandardFlat) {
  const FrameField f = adapted_frame(example_structure(example(ExampleKind::kStandardFlat)));
  const auto c = commutator_residuals([](const Point& p) { return p[0] + p[1] * p[1]; }, f,
                                      Point(0.1, 0.2, 0.3), DiffConfig{});
  EXPECT_LT(std::abs(c.c1), 1e-4);
  EXPECT_LT(std::abs(c.c2), 1e-4);
}

TEST(Commutators, RoundSphere) {
  const NamedExample e = example(ExampleKind::kRoundSphere);
  const FrameField f = adapted_frame(example_structure(e));
  const auto c = commutator_residuals([](const Point& p) { return p[0]; }, f, e.base_point(),
                                      DiffConfig{});
  EXPECT_LT(std::abs(c.c1), 1e-4);
  EXPECT_LT(std::abs(c.c2), 1e-4);
}

TEST(Commutators, RandomCubicsOnPerturbedMetrics) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int m = 0; m < 5; ++m) {
    const PerturbedMetric pm = perturbed_metric(100 + m);
    const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
    std::array<double, 8> c;
    for (double& x : c) x = u(rng);
    const ScalarField fn = [c](const Point& p) {
      const double x = p[0], y = p[1], z = p[2];
      return c[0] * x * x * x + c[1] * x * y * z + c[2] * y * y * z + c[3] * z * z +
             c[4] * x * y + c[5] * y + c[6] * z * z * z + c[7];
    };
    for (const Point& p : random_points(200 + m, 2, 0.3)) {
      const auto r = commutator_residuals(fn, f, p, DiffConfig{});
      EXPECT_LT(std::abs(r.c1), 1e-3);
      EXPECT_LT(std::abs(r.c2), 1e-3);
    }
  }
}
