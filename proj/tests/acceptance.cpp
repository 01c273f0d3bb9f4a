// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "test_support.hpp"

#include "elastica/continuation.hpp"
#include "elastica/io.hpp"
#include "elastica/verifier.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"

using namespace elastica;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Solved {
  Scenario scenario;
  ContinuationReport report;
  double seconds = 0.0;
};

Solved solve(const std::string& name) {
  Solved out{load_scenario(fs::path(ELASTICA_SCENARIO_DIR) / (name + ".json")), {}, 0.0};
  const auto t0 = Clock::now();
  out.report = run_schedule(out.scenario.bc, out.scenario.model, out.scenario.N, PenaltySpec{}, out.scenario.solver,
                            out.scenario.p_schedule);
  out.seconds = seconds_since(t0);
  return out;
}

double final_p(const Solved& s) { return s.report.records.back().p; }

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Geometry properties at random points of a 3-dimensional chart; returns the
// worst deviation of each property.
struct GeometryErrors {
  double symmetry = 0.0;
  double sectional = 0.0;
  double roundtrip = 0.0;
};

GeometryErrors geometry_suite(const Manifold& model, std::mt19937_64& rng) {
  GeometryErrors e;
  const int n = model.dimension();
  for (int trial = 0; trial < 100; ++trial) {
    const VecX x = testing::random_point(model, rng);
    const VecX X = testing::random_vector(n, rng), Y = testing::random_vector(n, rng);
    const VecX Z = testing::random_vector(n, rng), W = testing::random_vector(n, rng);
    auto R = [&](const VecX& a, const VecX& b, const VecX& c) { return riemann<double>(model, x, a, b, c); };
    auto g = [&](const VecX& a, const VecX& b) { return inner<double>(model, x, a, b); };
    const double scale = std::pow(conformal_factor<double>(model, x), 2) * X.norm() * Y.norm() * Z.norm();
    const double rw = scale * W.norm() * std::pow(conformal_factor<double>(model, x), 2);
    e.symmetry = std::max(e.symmetry, (R(X, Y, Z) + R(Y, X, Z)).norm() / scale);
    e.symmetry = std::max(e.symmetry, std::abs(g(R(X, Y, Z), W) + g(R(X, Y, W), Z)) / rw);
    e.symmetry = std::max(e.symmetry, std::abs(g(R(X, Y, Z), W) - g(R(Z, W, X), Y)) / rw);
    e.symmetry = std::max(e.symmetry, (R(X, Y, Z) + R(Y, Z, X) + R(Z, X, Y)).norm() / scale);
    const double area = g(X, X) * g(Y, Y) - g(X, Y) * g(X, Y);
    e.sectional = std::max(e.sectional, std::abs(g(R(X, Y, Y), X) / area - model.curvature_sign()));
    // Tangent vector of metric length below the injectivity radius.
    VecX v = testing::random_vector(n, rng);
    v *= std::uniform_real_distribution<double>(0.05, 1.5)(rng) / norm<double>(model, x, v);
    const VecX y = exp_map(model, x, v);
    e.roundtrip = std::max(e.roundtrip, norm<double>(model, x, log_map(model, x, y) - v));
    e.roundtrip = std::max(e.roundtrip, distance(model, exp_map(model, x, log_map(model, x, y)), y));
  }
  return e;
}

}  // namespace

int main() {
  // 9. Geometry suite
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(9);
    GeometryErrors worst;
    for (const auto& model : testing::all_models(3)) {
      const auto e = geometry_suite(model, rng);
      worst.symmetry = std::max(worst.symmetry, e.symmetry);
      worst.sectional = std::max(worst.sectional, e.sectional);
      worst.roundtrip = std::max(worst.roundtrip, e.roundtrip);
    }
    const double t = seconds_since(t0);
    report(9, worst.symmetry <= 1e-10 && worst.sectional <= 1e-8 && worst.roundtrip <= 1e-8 && t <= 5.0,
           "geometry suite",
           fmt("symmetry/Bianchi %.1e, sectional %.1e, exp/log %.1e, %.2fs", worst.symmetry, worst.sectional,
               worst.roundtrip, t));
  }

  // 1. Euclidean geodesic baseline
  const Solved line = solve("line");
  report(1, line.report.K_estimate <= 1e-6 && line.seconds <= 10.0, "geodesic baseline (euclidean)",
         fmt("K_estimate=%.3e, runtime %.2fs", line.report.K_estimate, line.seconds));

  // 2. Curved-model geodesic baselines
  {
    bool pass = true;
    std::string detail;
    for (const char* name : {"sphere_geodesic", "hyperbolic_geodesic"}) {
      const Solved s = solve(name);
      const double d = distance(s.scenario.model, s.scenario.bc.x1, s.scenario.bc.x2);
      const bool ok = std::abs(s.scenario.bc.L - d) <= 1e-12 && s.report.K_estimate <= 1e-5;
      pass = pass && ok;
      detail += fmt("%s K_estimate=%.3e (L - d = %.1e) ", name, s.report.K_estimate, s.scenario.bc.L - d);
    }
    report(2, pass, "geodesic baseline (sphere, hyperbolic)", detail);
  }

  // 3. Quarter circle against the arc-chain oracle
  const Solved quarter = solve("quarter_circle");
  const Solved sphere_quarter = solve("sphere_quarter");
  const Solved hyperbolic_quarter = solve("hyperbolic_quarter");
  {
    const ArcChainSolution chain = arc_chain_oracle(quarter.scenario.bc);
    const auto v = verify_curve(quarter.report.final_result->curve, final_p(quarter));
    const double cls = classify_two_value(curvature_profile(quarter.report.final_result->curve), v.K_used, 0.05)
                           .fractions.near_K;
    report(3, std::abs(quarter.report.K_estimate - chain.K_max) <= 0.02 && cls >= 0.90, "quarter circle",
           fmt("K_estimate=%.8f oracle K=%.8f (%s), near_K=%.3f", quarter.report.K_estimate, chain.K_max,
               chain.word.c_str(), cls));
  }

  // 4. Two-value structure on the S-bend
  const Solved sbend = solve("sbend");
  {
    std::ifstream in(std::string(ELASTICA_FIXTURE_DIR) + "/sbend_oracle.json");
    const auto fixture = nlohmann::json::parse(in);
    const double K_fixture = fixture["K_max"].get<double>();
    const auto v = verify_curve(sbend.report.final_result->curve, final_p(sbend));
    report(4, v.fractions.other <= 0.05 && std::abs(sbend.report.K_estimate - K_fixture) <= 0.02 * K_fixture,
           "two-value structure (S-bend)",
           fmt("other=%.4f near_K=%.4f near_zero=%.4f, K_estimate=%.6f fixture %s K=%.6f", v.fractions.other,
               v.fractions.near_K, v.fractions.near_zero, sbend.report.K_estimate,
               fixture["word"].get<std::string>().c_str(), K_fixture));
  }

  const std::vector<const Solved*> curved_cases{&quarter, &sphere_quarter, &hyperbolic_quarter, &sbend};

  // 5. EL2 residual
  {
    bool pass = true;
    std::string detail;
    for (const Solved* s : curved_cases) {
      const auto v = verify_curve(s->report.final_result->curve, final_p(*s));
      pass = pass && v.el2_residual_rel <= 1e-2;
      detail += fmt("%s %.2e ", s->scenario.name.c_str(), v.el2_residual_rel);
    }
    report(5, pass, "EL2 residual", detail);
  }

  // 6. EL1 residual with the solver's multiplier estimate
  {
    bool pass = true;
    std::string detail;
    for (const Solved* s : {&quarter, &sphere_quarter, &hyperbolic_quarter}) {
      const double p = final_p(*s);
      const double lambda = estimate_lambda(*s->report.final_result, p);
      const auto v = verify_curve(s->report.final_result->curve, p, lambda);
      pass = pass && v.el1_residual_rel <= 5e-2;
      detail += fmt("%s %.2e (lambda %.4f) ", s->scenario.model.id().c_str(), v.el1_residual_rel, lambda);
    }
    report(6, pass, "EL1 residual (quarter circle, three models)", detail);
  }

  // 7. Monotonicity
  {
    bool pass = line.report.monotone_ok;
    for (const Solved* s : curved_cases) pass = pass && s->report.monotone_ok;
    std::mt19937_64 rng(7);
    const auto models = testing::all_models();
    double worst = -1.0;
    for (int trial = 0; trial < 200; ++trial) {
      worst = std::max(worst, testing::kp_monotonicity_excess(testing::random_curve(models[trial % 3], 64, rng)));
    }
    report(7, pass && worst <= 1e-10, "monotonicity of K_p",
           fmt("scenario monotone_ok %s, worst K_p - K_q over 200 curves %.2e", pass ? "all" : "NOT all", worst));
  }

  // 8. Gradient correctness
  {
    std::mt19937_64 rng(8);
    double worst = 0.0;
    for (const auto& model : testing::all_models()) {
      for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_gradient_instance(model, rng, trial % 2 == 1);
        worst = std::max(worst, testing::gradient_fd_error(inst.curve, inst.p, inst.spec));
      }
    }
    report(8, worst <= 1e-5, "gradient vs central differences", fmt("worst rel error %.2e over 60 instances", worst));
  }

  // 10. Reference tracking
  {
    const DiscreteCurve& ref = quarter.report.final_result->curve;
    const double sigma = default_sigma(quarter.report.K_estimate, quarter.scenario.bc.L);
    const auto t = track_reference(quarter.scenario.bc, quarter.scenario.model, ref, sigma, quarter.scenario.solver,
                                   quarter.scenario.p_schedule);
    const auto& r = t.records;
    const double dist = r.back().reference_distance;
    const double a = r[r.size() - 2].lambda_p, b = r.back().lambda_p;
    const double variation = std::abs(b - a) / std::max(std::abs(a), std::abs(b));
    report(10, dist <= 1e-3 && variation < 0.2, "reference tracking (euclidean quarter circle)",
           fmt("max node distance %.2e, lambda_p %.4f -> %.4f (%.1f%%), sigma %.3g", dist, a, b, 100 * variation,
               sigma));
  }

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
