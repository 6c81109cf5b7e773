#include <gtest/gtest.h>

#include "npp3/npp3.hpp"
#include "oracle.hpp"

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

// Oracle Ricci projected on the complex frame, independent of the library's
// curvature routine.
std::array<cplx, 6> oracle_frame_ricci(const MetricField& g, const ComplexTriad& T,
                                       const Point& p) {
  const Mat3 ric = oracle::ricci([g](const oracle::Vec3& q) { return g(q); }, p);
  auto R = [&](int m, int n) {
    return cplx((T.Z[m].transpose() * ric.cast<cplx>() * T.Z[n])(0, 0));
  };
  const cplx half = 0.5 * (R(k0, k0) + 2.0 * R(kPlus, kMinus));
  return {R(k0, k0), R(kPlus, kPlus), R(k0, kPlus), R(k0, kMinus), R(kPlus, kMinus), half};
}

// Fourth order, the same choice the verification suite makes.
DiffConfig accurate() {
  DiffConfig d;
  d.scheme = DiffScheme::kCentral4;
  d.step = Vec3::Constant(1e-4);
  d.spin_step = 1e-3;
  return d;
}

double worst(const FrameRicci& a, const std::array<cplx, 6>& b) {
  const std::array<cplx, 6> v{a.R00, a.Rpp, a.R0p, a.R0m, a.Rpm, a.half_scalar};
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(v[i] - b[i]));
  return m;
}

}  // namespace

TEST(RicciFromSpin, StandardFlatGauge) {
  const NamedExample e = example(ExampleKind::kStandardFlat);
  const FrameField f = *gauge_frame(e);
  const DiffConfig cfg;
  const Point p = e.base_point();
  const SpinCoefficients s = spin_coefficients(f, p, cfg);
  EXPECT_LT(std::abs(s.kappa) + std::abs(s.epsilon) + std::abs(s.tau), 1e-8);
  EXPECT_LT(std::abs(s.rho - cplx(0, 1)), 1e-8);
  EXPECT_LT(std::abs(s.sigma - 1.0), 1e-8);
  const FrameRicci r = ricci_from_spin(SpinCoefficientField::from_frame(f, cfg),
                                       f.complex_triad(p), p, cfg);
  EXPECT_LT(std::abs(r.R00), 1e-4);
  EXPECT_LT(std::abs(r.Rpp), 1e-4);
  EXPECT_LT(std::abs(r.R0p), 1e-4);
  EXPECT_LT(std::abs(r.R0m), 1e-4);
  EXPECT_LT(std::abs(r.Rpm), 1e-4);
  EXPECT_LT(std::abs(r.half_scalar), 1e-4);
}

TEST(RicciFromSpin, RoundSphere) {
  const NamedExample e = example(ExampleKind::kRoundSphere);
  const FrameField f = adapted_frame(example_structure(e));
  const DiffConfig cfg;
  const Point p = e.base_point();
  const FrameRicci r = ricci_from_spin(SpinCoefficientField::from_frame(f, cfg),
                                       f.complex_triad(p), p, cfg);
  EXPECT_NEAR(r.R00.real(), 2.0, 1e-4);
  EXPECT_NEAR(r.Rpm.real(), 2.0, 1e-4);
  EXPECT_NEAR(r.scalar(), 6.0, 1e-4);
  EXPECT_LT(r.reality_residual(), 1e-6);
}

TEST(RicciFromSpin, CatalogMatchesOracle) {
  const DiffConfig cfg;
  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = example(k);
    const ContactStructure c = example_structure(e);
    const FrameField f = adapted_frame(c);
    const SpinCoefficientField S = SpinCoefficientField::from_frame(f, cfg);
    for (const Point& p : example_grid(e, 2)) {
      const ComplexTriad T = f.complex_triad(p);
      const FrameRicci r = ricci_from_spin(S, T, p, cfg);
      EXPECT_LT(worst(r, oracle_frame_ricci(c.g, T, p)), 1e-3) << e.name();
      EXPECT_LT(r.max_difference(direct_frame_ricci(c.g, T, p, cfg)), 1e-3) << e.name();
      EXPECT_LT(r.reality_residual(), 1e-6) << e.name();
    }
  }
}

TEST(RicciFromSpin, PerturbedMetricsMatchOracle) {
  const DiffConfig cfg = accurate();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const PerturbedMetric pm = perturbed_metric(seed);
    const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
    const SpinCoefficientField S = SpinCoefficientField::from_frame(f, cfg);
    for (const Point& p : random_points(seed + 31, 5, 0.3)) {
      const ComplexTriad T = f.complex_triad(p);
      const FrameRicci r = ricci_from_spin(S, T, p, cfg);
      const auto o = oracle_frame_ricci(pm.metric, T, p);
      EXPECT_LT(worst(r, o), 1e-3);
      // trace identity: R = R00 + 2 R+-, with the scalar from its own equation
      EXPECT_NEAR(r.half_scalar.real(), o[5].real(), 1e-3);
      EXPECT_LT(std::abs(r.R00.imag()), 1e-6);
      EXPECT_LT(std::abs(r.Rpm.imag()), 1e-6);
    }
  }
}

TEST(RicciFromSpin, ProjectionOfSymmetricTensor) {
  const PerturbedMetric pm = perturbed_metric(13);
  const Point p(0.05, 0.1, -0.2);
  const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
  const ComplexTriad T = f.complex_triad(p);
  const FrameRicci d = direct_frame_ricci(pm.metric, T, p, DiffConfig{});
  EXPECT_LT(std::abs(d.R0m - std::conj(d.R0p)), 1e-12);
  EXPECT_LT(d.reality_residual(), 1e-12);
}

TEST(Identities, ConstantFrameEuclidean) {
  const FrameField f(MetricField::euclidean(), [](const Point&) { return OrthonormalTriad{}; });
  const DiffConfig cfg;
  const Point p(0.1, 0.2, 0.3);
  const auto r = identity_residuals(SpinCoefficientField::from_frame(f, cfg), f.complex_triad(p),
                                    p, cfg);
  EXPECT_EQ(std::abs(r.i1) + std::abs(r.i2), 0.0);
}

TEST(Identities, StandardFlatAndPerturbed) {
  const DiffConfig cfg;
  {
    const NamedExample e = example(ExampleKind::kStandardFlat);
    const FrameField f = adapted_frame(example_structure(e));
    const Point p = e.base_point();
    const auto r = identity_residuals(SpinCoefficientField::from_frame(f, cfg),
                                      f.complex_triad(p), p, cfg);
    EXPECT_LT(std::abs(r.i1), 1e-4);
    EXPECT_LT(std::abs(r.i2), 1e-4);
  }
  for (std::uint64_t seed = 40; seed < 43; ++seed) {
    const PerturbedMetric pm = perturbed_metric(seed);
    const FrameField f = gram_schmidt_frame(pm.metric, pm.e0);
    const SpinCoefficientField S = SpinCoefficientField::from_frame(f, cfg);
    for (const Point& p : random_points(seed, 3, 0.3)) {
      const auto r = identity_residuals(S, f.complex_triad(p), p, cfg);
      EXPECT_LT(std::abs(r.i1), 1e-3);
      EXPECT_LT(std::abs(r.i2), 1e-3);
    }
  }
}

TEST(PrintedEquations, LayoutAndSignCorrections) {
  const NamedExample e = example(ExampleKind::kElliptic);
  const FrameField f = adapted_frame(example_structure(e));
  const DiffConfig cfg;
  const Point p = e.base_point();
  const SpinDerivatives d = spin_derivatives(SpinCoefficientField::from_frame(f, cfg),
                                             f.complex_triad(p), p, cfg);
  const auto eqs = printed_equations(d);
  ASSERT_EQ(eqs.size(), 8u);
  EXPECT_EQ(eqs[0].name, "R00");
  EXPECT_TRUE(sign_corrections().empty());
  const FrameRicci r = ricci_from_spin(d);
  EXPECT_LT(std::abs(eqs[0].sum() - r.R00), 1e-14);
  for (std::size_t t = 0; t < eqs[0].terms.size(); ++t) {
    const Term& term = eqs[0].terms[t];
    EXPECT_LT(std::abs(eqs[0].sum_flipped(t) - (eqs[0].sum() - 2.0 * term.coefficient * term.value)),
              1e-12);
  }
}

TEST(ReducedGauge, CatalogFamilies) {
  const DiffConfig cfg;
  for (ExampleKind k : {ExampleKind::kStandardFlat, ExampleKind::kFlatB0Zero,
                        ExampleKind::kFlatB0Nonzero, ExampleKind::kElliptic}) {
    const NamedExample e = example(k);
    const FrameField f = *gauge_frame(e);
    const Point p = e.base_point();
    const SpinCoefficients s = spin_coefficients(f, p, cfg);
    EXPECT_LT(std::abs(s.kappa), 1e-8) << e.name();
    EXPECT_LT(std::abs(s.epsilon), 1e-8) << e.name();
    EXPECT_LT(std::abs(s.rho - cplx(0, e.lambda)), 1e-8) << e.name();
    const SpinDerivatives d = spin_derivatives(SpinCoefficientField::from_frame(f, cfg),
                                               f.complex_triad(p), p, cfg);
    EXPECT_LT(reduced_gauge_residuals(d).max_abs(), 1e-6) << e.name();
  }
}

TEST(TwistLemma, ReebCurves) {
  const DiffConfig cfg;
  for (ExampleKind k : {ExampleKind::kStandardFlat, ExampleKind::kRoundSphere}) {
    const NamedExample e = example(k);
    const ContactStructure c = example_structure(e);
    const FrameField f = adapted_frame(c);
    const auto curve = integrate_field_curve(reeb_vector_field(c), e.base_point(), 1.0, 0.01,
                                             e.domain());
    std::vector<SpinCoefficients> along;
    for (std::size_t i = 0; i < curve.size(); i += 10) along.push_back(spin_coefficients(f, curve[i], cfg));
    const TwistLemmaCheck t = geodesic_twist_lemma_check(along, 1e-5);
    EXPECT_LT(t.residual, 1e-5);
    EXPECT_LT(t.max_divergence, 1e-5);
    EXPECT_FALSE(t.violation);
  }
}

TEST(TwistLemma, SyntheticViolation) {
  SpinCoefficients s;
  s.rho = cplx(0.1, 1.0);
  const TwistLemmaCheck t = geodesic_twist_lemma_check({s, s, s}, 1e-5);
  EXPECT_NEAR(t.residual, 0.1, 1e-15);
  EXPECT_TRUE(t.violation);
}

TEST(TwistLemma, NotGeodesic) {
  SpinCoefficients s;
  s.kappa = cplx(0.01, 0.0);
  try {
    geodesic_twist_lemma_check({s}, 1e-5);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotGeodesic);
  }
}

TEST(Discrepancy, NoFlipsNeeded) {
  const DiffConfig cfg;
  std::vector<DiscrepancySample> samples;
  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = example(k);
    const ContactStructure c = example_structure(e);
    samples.push_back({SpinCoefficientField::from_frame(adapted_frame(c), cfg), c.g, e.base_point()});
  }
  const PerturbedMetric pm = perturbed_metric(77);
  samples.push_back({SpinCoefficientField::from_frame(gram_schmidt_frame(pm.metric, pm.e0), cfg),
                     pm.metric, Point(0.1, 0.1, 0.1)});
  const DiscrepancyReport rep = discrepancy_report(samples, cfg);
  EXPECT_TRUE(rep.consistent()) << rep.to_text();
  EXPECT_TRUE(rep.required_flips.empty());
  EXPECT_EQ(rep.samples, 6);
  EXPECT_LT(rep.trace_identity_residual, 1e-3);
  EXPECT_EQ(rep.agreement.size(), 8u);
}

TEST(Discrepancy, MismatchedMetricIsReported) {
  const DiffConfig cfg;
  const NamedExample e = example(ExampleKind::kRoundSphere);
  const ContactStructure c = example_structure(e);
  // Spin coefficients of the sphere against a flat metric: no single sign
  // flip can reconcile them.
  const DiscrepancySample bad{SpinCoefficientField::from_frame(adapted_frame(c), cfg),
                              MetricField::euclidean(), e.base_point()};
  const DiscrepancyReport rep = discrepancy_report({bad}, cfg);
  EXPECT_FALSE(rep.consistent());
  EXPECT_FALSE(rep.to_text().empty());
}
