#include <cmath>
#include <sstream>

#include "npp3cli/cli.hpp"

namespace npp3::cli {

namespace {

NamedExample default_example(ExampleKind k, double lambda) {
  NamedExample e;
  e.kind = k;
  e.lambda = lambda;
  e.f = Polynomial({0.0, 1.0});
  e.D = Polynomial({1.0});
  e.E = Polynomial({0.0, 1.0});
  return e;
}

// Five well separated admissible points of the default grid.
std::vector<Point> spread_points(const NamedExample& e, int n) {
  const std::vector<Point> grid = example_grid(e, 3);
  std::vector<Point> out;
  if (grid.empty()) return {e.base_point()};
  out.push_back(e.base_point());
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / (n - 1));
  for (std::size_t i = 0; i < grid.size() && static_cast<int>(out.size()) < n; i += stride)
    out.push_back(grid[i]);
  return out;
}

}  // namespace

nlohmann::json discrepancies(const DiscrepancyOptions& opt) {
  using nlohmann::json;
  const DiffConfig& diff = opt.diff;
  std::vector<DiscrepancySample> samples;
  json w_entries = json::array();

  for (ExampleKind k : all_example_kinds()) {
    const NamedExample e = default_example(k, opt.lambda);
    const ContactStructure C = example_structure(e);
    const FrameField frame = adapted_frame(C, diff.tol);
    const SpinCoefficientField S = SpinCoefficientField::from_frame(frame, diff);
    for (const Point& p : spread_points(e, opt.points_per_metric))
      samples.push_back({S, C.g, p});

    const Point p = e.base_point();
    const ComplexTriad T = frame.complex_triad(p);
    const double R = curvature(C.g, p, diff).scalar;
    const SpinDerivatives d = spin_derivatives(S, T, p, diff);
    const PseudohermitianData ph = pseudohermitian(d, T, e.lambda);
    const double l = e.lambda;
    const double r3 = R / (3.0 * l) + l, r6 = R / (6.0 * l) + l;
    const auto reading = [&](double v) { return std::abs(ph.W - v) < 1e-3; };
    w_entries.push_back({{"example", e.name()},
                         {"lambda", l},
                         {"R", R},
                         {"W_measured", ph.W},
                         {"W_epsilon_free", ph.W_epsilon_free},
                         {"epsilon_abs", std::abs(d.value[kEpsilon])},
                         {"reading_R_over_3lambda_plus_lambda", r3},
                         {"reading_R_over_6lambda_plus_lambda", r6},
                         {"matches_R_over_3lambda", reading(r3)},
                         {"matches_R_over_6lambda", reading(r6)},
                         {"readings_coincide", std::abs(r3 - r6) < 1e-9},
                         {"scalar_relation_residual",
                          scalar_relation_residual(R, ph.W, d.value[kSigma], l)}});
  }

  for (int m = 0; m < opt.random_metrics; ++m) {
    const PerturbedMetric pm = perturbed_metric(opt.seed + static_cast<std::uint64_t>(m));
    const FrameField frame = gram_schmidt_frame(pm.metric, pm.e0, +1, diff.tol);
    const SpinCoefficientField S = SpinCoefficientField::from_frame(frame, diff);
    for (const Point& p : random_points(opt.seed * 7919 + static_cast<std::uint64_t>(m),
                                        opt.points_per_metric, 0.6 * pm.box))
      samples.push_back({S, pm.metric, p});
  }

  const DiscrepancyReport rep = discrepancy_report(samples, diff, 1e-3);
  json agreement = json::array();
  for (const auto& a : rep.agreement)
    agreement.push_back({{"equation", a.equation}, {"max_residual", a.max_residual}});
  json flips = json::array();
  for (const auto& f : rep.required_flips)
    flips.push_back({{"equation", f.equation},
                     {"term", f.term},
                     {"printed_coefficient", f.printed_coefficient},
                     {"samples_fixed", f.samples_fixed}});

  json j;
  j["schema_version"] = 1;
  j["samples"] = rep.samples;
  j["tolerance"] = rep.tolerance;
  j["consistent"] = rep.consistent();
  j["sign_corrections_applied"] = sign_corrections();
  j["required_flips"] = flips;
  j["agreement"] = agreement;
  j["trace_identity_residual"] = rep.trace_identity_residual;
  j["tanaka_webster"] = w_entries;
  j["notes"] = json::array(
      {"divergence is reported as -Re rho: with gamma_mnp as defined, Re rho = -(1/2) div e0 "
       "for a geodesic congruence",
       "twist uses the bracket (nabla_i e0_j - nabla_j e0_i) nabla^i e0^j without a factor 1/2, "
       "which makes it equal |Im rho|",
       "the W expression without the epsilon (rho - rho-bar) term agrees with W only in frames "
       "with epsilon = 0; see W_epsilon_free",
       "W = R/(6 lambda) + lambda follows from the scalar relation with |A|^2 = lambda^2 - R/6; "
       "the reading R/(3 lambda) + lambda disagrees whenever R != 0"});
  return j;
}

std::string discrepancies_text(const nlohmann::json& j) {
  std::ostringstream os;
  os << "samples: " << j["samples"].get<int>() << " (tolerance " << j["tolerance"].get<double>()
     << ")\n";
  os << "sign corrections applied: "
     << (j["sign_corrections_applied"].empty() ? std::string("none")
                                                : j["sign_corrections_applied"].dump())
     << "\n";
  for (const auto& a : j["agreement"])
    os << "  " << a["equation"].get<std::string>() << ": max residual "
       << a["max_residual"].get<double>() << "\n";
  if (j["required_flips"].empty()) {
    os << "required sign flips: none\n";
  } else {
    for (const auto& f : j["required_flips"])
      os << "required flip: " << f["equation"].get<std::string>() << " term "
         << f["term"].get<std::string>() << "\n";
  }
  os << "trace identity residual: " << j["trace_identity_residual"].get<double>() << "\n";
  os << "Tanaka-Webster curvature:\n";
  for (const auto& w : j["tanaka_webster"]) {
    os << "  " << w["example"].get<std::string>() << " lambda=" << w["lambda"].get<double>()
       << " R=" << w["R"].get<double>() << " W=" << w["W_measured"].get<double>()
       << " | R/(3l)+l=" << w["reading_R_over_3lambda_plus_lambda"].get<double>()
       << (w["matches_R_over_3lambda"].get<bool>() ? " (match)" : " (no match)")
       << " | R/(6l)+l=" << w["reading_R_over_6lambda_plus_lambda"].get<double>()
       << (w["matches_R_over_6lambda"].get<bool>() ? " (match)" : " (no match)")
       << (w["readings_coincide"].get<bool>() ? " | readings coincide" : "")
       << " | epsilon-free=" << w["W_epsilon_free"].get<double>() << "\n";
  }
  for (const auto& n : j["notes"]) os << "note: " << n.get<std::string>() << "\n";
  os << (j["consistent"].get<bool>() ? "consistent" : "INCONSISTENT") << "\n";
  return os.str();
}

}  // namespace npp3::cli
