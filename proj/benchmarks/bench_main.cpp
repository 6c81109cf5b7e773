#include <benchmark/benchmark.h>

#include "npp3/npp3.hpp"

namespace {

using namespace npp3;

NamedExample elliptic() {
  NamedExample e;
  e.kind = ExampleKind::kElliptic;
  e.f = Polynomial({0.0, 1.0});
  return e;
}

void BM_Christoffel(benchmark::State& st) {
  const NamedExample e = elliptic();
  const MetricField g = example_metric(e);
  const Point p = e.base_point();
  const DiffConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(christoffel(g, p, cfg));
}
BENCHMARK(BM_Christoffel);

void BM_ChristoffelFD(benchmark::State& st) {
  const NamedExample e = elliptic();
  const MetricField g = example_metric(e).without_derivatives();
  const Point p = e.base_point();
  const DiffConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(christoffel(g, p, cfg));
}
BENCHMARK(BM_ChristoffelFD);

void BM_Curvature(benchmark::State& st) {
  const PerturbedMetric pm = perturbed_metric(7);
  const DiffConfig cfg;
  const Point p(0.1, -0.2, 0.05);
  for (auto _ : st) benchmark::DoNotOptimize(curvature(pm.metric, p, cfg));
}
BENCHMARK(BM_Curvature);

void BM_SpinCoefficients(benchmark::State& st) {
  const NamedExample e = elliptic();
  const FrameField frame = adapted_frame(example_structure(e));
  const Point p = e.base_point();
  const DiffConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(spin_coefficients(frame, p, cfg));
}
BENCHMARK(BM_SpinCoefficients);

void BM_RicciFromSpin(benchmark::State& st) {
  const PerturbedMetric pm = perturbed_metric(7);
  const DiffConfig cfg;
  const FrameField frame = gram_schmidt_frame(pm.metric, pm.e0);
  const SpinCoefficientField S = SpinCoefficientField::from_frame(frame, cfg);
  const Point p(0.1, -0.2, 0.05);
  const ComplexTriad T = frame.complex_triad(p);
  for (auto _ : st) benchmark::DoNotOptimize(ricci_from_spin(S, T, p, cfg));
}
BENCHMARK(BM_RicciFromSpin)->Unit(benchmark::kMillisecond);

void BM_Geodesic(benchmark::State& st) {
  const NamedExample e = elliptic();
  const ContactStructure c = example_structure(e);
  GeodesicState init;
  init.x = e.base_point();
  init.v = reeb_vector_field(c)(init.x);
  for (auto _ : st)
    benchmark::DoNotOptimize(integrate_geodesic(c.g, init, static_cast<double>(st.range(0)) * 0.1));
}
BENCHMARK(BM_Geodesic)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
