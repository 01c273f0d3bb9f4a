#pragma once

#include "elastica/boundary.hpp"
#include "elastica/curve.hpp"
#include "elastica/functionals.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace elastica::testing {

inline const Manifold kEuclid2{ModelKind::Euclidean, 2};
inline const Manifold kSphere2{ModelKind::Sphere, 2};
inline const Manifold kHyper2{ModelKind::Hyperbolic, 2};

inline std::vector<Manifold> all_models(int dim = 2) {
  return {Manifold(ModelKind::Euclidean, dim), Manifold(ModelKind::Sphere, dim), Manifold(ModelKind::Hyperbolic, dim)};
}

/// Chart radius that keeps random points well inside every model's domain.
inline double safe_radius(const Manifold& model) {
  return model.kind() == ModelKind::Hyperbolic ? 0.6 : 1.5;
}

inline VecX random_point(const Manifold& model, std::mt19937_64& rng, double radius = -1.0) {
  if (radius < 0.0) radius = safe_radius(model);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  VecX x(model.dimension());
  for (int k = 0; k < x.size(); ++k) x[k] = normal(rng);
  return x.normalized() * radius * std::pow(uniform(rng), 1.0 / x.size());
}

inline VecX random_vector(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  VecX v(dim);
  for (int k = 0; k < dim; ++k) v[k] = scale * normal(rng);
  return v;
}

/// Chart segment a -> b plus a few random sine modes; target length set to
/// the metric length of the result so spacing is meaningful.
inline DiscreteCurve wiggly_curve(const Manifold& model, const VecX& a, const VecX& b, int N, double amplitude,
                                  std::mt19937_64& rng) {
  const int n = model.dimension();
  std::vector<VecX> modes;
  for (int k = 1; k <= 3; ++k) modes.push_back(random_vector(n, rng, amplitude / k));
  NodeMatrix X(N + 1, n);
  for (int i = 0; i <= N; ++i) {
    const double t = static_cast<double>(i) / N;
    VecX x = (1.0 - t) * a + t * b;
    for (int k = 0; k < 3; ++k) x += std::sin((k + 1) * std::numbers::pi * t) * modes[k];
    X.row(i) = x.transpose();
  }
  double L = 0.0;
  for (int i = 0; i < N; ++i) L += distance(model, X.row(i).transpose(), X.row(i + 1).transpose());
  return {model, X, L};
}

inline DiscreteCurve random_curve(const Manifold& model, int N, std::mt19937_64& rng) {
  const double r = 0.5 * safe_radius(model);
  return wiggly_curve(model, random_point(model, rng, r), random_point(model, rng, r), N, 0.3 * r, rng);
}

/// Planar circle arc of radius R starting at the origin heading along +x,
/// turning left, sampled at arclength i L / N.
inline DiscreteCurve planar_arc(double R, double L, int N) {
  NodeMatrix X(N + 1, 2);
  for (int i = 0; i <= N; ++i) {
    const double t = i * L / N / R;
    X(i, 0) = R * std::sin(t);
    X(i, 1) = R * (1.0 - std::cos(t));
  }
  return {kEuclid2, X, L};
}

inline BoundaryConditions make_bc(VecX x1, VecX v1, VecX x2, VecX v2, double L) {
  return {std::move(x1), std::move(x2), std::move(v1), std::move(v2), L};
}

inline VecX vec2(double a, double b) {
  VecX v(2);
  v << a, b;
  return v;
}

inline BoundaryConditions quarter_circle_bc() {
  return make_bc(vec2(0, 0), vec2(0, 1), vec2(1, 1), vec2(1, 0), std::numbers::pi / 2);
}

inline BoundaryConditions sbend_bc() { return make_bc(vec2(0, 0), vec2(1, 0), vec2(2, 1), vec2(1, 0), 2.6); }

inline BoundaryConditions line_bc() { return make_bc(vec2(0, 0), vec2(1, 0), vec2(1, 0), vec2(1, 0), 1.0); }

/// Quarter circles of geodesic curvature 1 in the curved models (chart data
/// with the unit end tangents written as chart components).
inline BoundaryConditions sphere_quarter_bc() {
  return make_bc(vec2(0, 0), vec2(0, 0.5), vec2(0.5, 0.5), vec2(0.75, 0), std::sqrt(2.0) * std::atan(std::sqrt(2.0)));
}

inline BoundaryConditions hyperbolic_quarter_bc() {
  return make_bc(vec2(0, 0), vec2(0, 0.5), vec2(0.5, 0.5), vec2(0.25, 0), 2.0);
}

/// Boundary data read off a curve: its endpoints, the unit directions of the
/// end chords and its target length.
inline BoundaryConditions bc_of(const DiscreteCurve& curve) {
  const Manifold& m = curve.model();
  const int n = curve.segments();
  VecX v1 = log_map(m, curve.node(0), curve.node(1));
  VecX v2 = -log_map(m, curve.node(n), curve.node(n - 1));
  v1 /= norm<double>(m, curve.node(0), v1);
  v2 /= norm<double>(m, curve.node(n), v2);
  return make_bc(curve.node(0), v1, curve.node(n), v2, curve.target_length());
}

/// max |analytic - central FD| / max |analytic| for the full objective.
inline double gradient_fd_error(const DiscreteCurve& curve, double p, const PenaltySpec& spec) {
  const NodeMatrix g = objective_gradient(curve, p, spec, bc_of(curve)).covectors;
  NodeMatrix fd(g.rows(), g.cols());
  const double eps = 1e-6 * curve.spacing();
  for (int i = 0; i < g.rows(); ++i) {
    for (int k = 0; k < g.cols(); ++k) {
      NodeMatrix plus = curve.nodes(), minus = curve.nodes();
      plus(i, k) += eps;
      minus(i, k) -= eps;
      fd(i, k) = (objective(curve.with_nodes(plus), p, spec).total - objective(curve.with_nodes(minus), p, spec).total) /
                 (2.0 * eps);
    }
  }
  return (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff();
}

/// Random (curve, p, sigma) instance; sigma > 0 on odd draws with a
/// perturbed copy of the curve as reference.
struct GradientInstance {
  DiscreteCurve curve;
  double p;
  PenaltySpec spec;
};

inline GradientInstance random_gradient_instance(const Manifold& model, std::mt19937_64& rng, bool with_penalty) {
  const double ps[] = {2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  std::uniform_int_distribution<int> pick(0, 6);
  const double r = 0.5 * safe_radius(model);
  const VecX a = random_point(model, rng, r), b = random_point(model, rng, r);
  const auto curve = wiggly_curve(model, a, b, 40, 0.3 * r, rng);
  PenaltySpec spec;
  if (with_penalty) {
    spec.sigma = std::uniform_real_distribution<double>(0.5, 20.0)(rng);
    spec.reference = wiggly_curve(model, a, b, 40, 0.3 * r, rng);
  }
  return {curve, ps[pick(rng)], spec};
}

inline const std::vector<double> kMonotoneExponents{2, 4, 8, 16, 32, 64};

/// Largest kp_energy(c, p) - kp_energy(c, q) over p <= q.
inline double kp_monotonicity_excess(const DiscreteCurve& curve) {
  std::vector<double> k;
  for (double p : kMonotoneExponents) k.push_back(kp_energy(curve, p));
  double worst = -1.0;
  for (size_t i = 0; i < k.size(); ++i)
    for (size_t j = i; j < k.size(); ++j) worst = std::max(worst, k[i] - k[j]);
  return worst;
}

}  // namespace elastica::testing
