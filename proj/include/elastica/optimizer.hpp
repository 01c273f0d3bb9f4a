#pragma once

// Constrained minimization of K_p + penalty over discrete clamped curves.
//
// Feasible set: nodes 0 and N at the endpoints, nodes 1 and N-1 on the end
// geodesics (exp-placed at distance h), and every geodesic chord between
// consecutive nodes equal to h = L/N. The last condition is the discrete
// arclength condition and also fixes the length to N * h = L.

#include "elastica/boundary.hpp"
#include "elastica/functionals.hpp"

#include <cstdint>
#include <vector>

namespace elastica {

struct SolverConfig {
  int max_iters = 3000;
  /// Stop when the largest predicted node displacement (chart units, relative
  /// to L) of the preconditioned projected gradient drops below this.
  double grad_tol = 1e-9;
  /// Initial step relative to the preconditioned (Newton-scaled) direction.
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  /// Full nonlinear arclength projection every k accepted steps; in between,
  /// steps stay in the linearized constraint tangent space.
  int reparam_every = 1;
  /// Objective non-decrease over this many iterations counts as converged.
  int stall_window = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PSolveResult {
  explicit PSolveResult(DiscreteCurve c) : curve(std::move(c)) {}

  DiscreteCurve curve;
  double p = 2.0;
  double lambda_p = 0.0;  // NaN when the curve is a geodesic
  double K_p = 0.0;
  double penalty_value = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  bool geodesic = false;
  std::vector<double> history;  // objective after each accepted step
};

/// Curves with K_p * L below this are treated as geodesics.
inline constexpr double kGeodesicThreshold = 1e-6;

/// C^1 seed: blend of the geodesic leaving x1 along v1 and the geodesic
/// arriving at x2 along v2, with the arm length bisected so the seed has
/// length L; then resampled to N uniform segments and projected onto the
/// feasible set.
DiscreteCurve initial_curve(const BoundaryConditions& bc, const Manifold& model, int N);

/// Snap nodes 0, 1, N-1, N to the boundary data; interior nodes untouched.
DiscreteCurve enforce_boundary(const DiscreteCurve& curve, const BoundaryConditions& bc);

/// Newton projection of the free nodes onto equal chords h. Returns the
/// projected curve; throws DegenerateCurve if it does not converge.
DiscreteCurve project_arclength(const DiscreteCurve& curve, double tol = 1e-12);

/// Largest |chord - h| / h over all segments.
double arclength_defect(const DiscreteCurve& curve);

PSolveResult solve_p(const DiscreteCurve& curve0, const BoundaryConditions& bc, double p, const PenaltySpec& spec,
                     const SolverConfig& config);

/// Least-squares length multiplier from the limiting Euler-Lagrange form
/// with phi_p = K_p^(1-p) |a|^(p-2) a. Throws GeodesicDegenerate.
double estimate_lambda(const PSolveResult& result, double p);

}  // namespace elastica
