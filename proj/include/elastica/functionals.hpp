#pragma once

// Curvature energies K_p, K_inf, the squared-distance penalty to a reference
// curve, and exact gradients of their discrete forms.

#include "elastica/boundary.hpp"
#include "elastica/curve.hpp"

#include <optional>
#include <vector>

namespace elastica {

struct PenaltySpec {
  double sigma = 0.0;
  std::optional<DiscreteCurve> reference;
  /// Arclength half-width of the reference segment seen from node s; empty
  /// means the distance to the whole reference image.
  std::optional<double> window_halfwidth;

  /// Throws MissingReference or InvalidArgument.
  void validate() const;
};

/// min(c/4, L/4) with the planar loop scale c = 2 pi / K.
double default_window_halfwidth(double K_estimate, double L);

struct ObjectiveValue {
  double kp = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

/// Chart covectors dJ/dx per node. Nodes 0, 1, N-1, N are clamped by the
/// boundary conditions and flagged frozen; their entries are still reported.
struct ObjectiveGradient {
  NodeMatrix covectors;
  std::vector<bool> frozen;
};

/// ((1/L) sum kappa_i^p w)^(1/p) with equal weights over the interior nodes,
/// accumulated in log space so large p does not overflow.
double kp_energy(const CurvatureProfile& profile, double p);
double kp_energy(const DiscreteCurve& curve, double p);

double kinf_energy(const CurvatureProfile& profile);
double kinf_energy(const DiscreteCurve& curve);

/// (sigma / 2L) * trapezoid sum of d(node_i, reference segment)^2.
double penalty(const DiscreteCurve& curve, const PenaltySpec& spec);

ObjectiveValue objective(const DiscreteCurve& curve, double p, const PenaltySpec& spec);

ObjectiveGradient objective_gradient(const DiscreteCurve& curve, double p, const PenaltySpec& spec,
                                     const BoundaryConditions& bc);

/// Value and gradient in one pass; the solver's evaluation entry point.
struct Evaluation {
  ObjectiveValue value;
  NodeMatrix gradient;
};
Evaluation evaluate(const DiscreteCurve& curve, double p, const PenaltySpec& spec, bool with_gradient);

/// Per-node distances to the reference used by the penalty.
VecX reference_distances(const DiscreteCurve& curve, const PenaltySpec& spec);

}  // namespace elastica
