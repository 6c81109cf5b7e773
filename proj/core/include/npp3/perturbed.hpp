#pragma once

#include <cstdint>

#include "npp3/frames.hpp"

namespace npp3 {

// g_ij = delta_ij + amplitude * P_ij(x) with P a random symmetric matrix of
// cubic polynomials (coefficients uniform in [-1, 1]), redrawn until positive
// definite on the sampling box [-box, box]^3.
struct PerturbedMetric {
  MetricField metric;
  VectorField e0;  // smooth random frame generator, close to d/dx
  double box = 0.5;
};

PerturbedMetric perturbed_metric(std::uint64_t seed, double amplitude = 0.05,
                                 double box = 0.5);

// Uniform points in [-box, box]^3.
std::vector<Point> random_points(std::uint64_t seed, int n, double box);

}  // namespace npp3
