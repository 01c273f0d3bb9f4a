#pragma once

// Residual checks of the limiting Euler-Lagrange system
//
//   nabla_T^2 phi + R(phi, T)T = L lambda nabla_T T - 2 nabla_T(<phi, nabla_T T> T)   (EL1)
//   |phi| nabla_T T = K phi                                                          (EL2)
//
// along a solved curve, the two-value curvature classification, and the
// planar arc-chain ground truth.

#include "elastica/boundary.hpp"
#include "elastica/curve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elastica {

struct VerifyOptions {
  /// Excluded arclength fraction at each end.
  double boundary_layer = 0.1;
  /// Half-width, in units of h, of the mask around curvature jumps.
  double jump_mask = 3.0;
  double eps_rel = 0.05;
};

VectorFieldAlongCurve phi_hat(const DiscreteCurve& curve, double p);

/// K_p^(1-p) phi_hat, evaluated in log-magnitude form.
VectorFieldAlongCurve phi_normalized(const DiscreteCurve& curve, double p, double K_p);

/// The pieces of EL1 for a given field: nabla_T^2 phi, R(phi, T)T,
/// 2 nabla_T(<phi, nabla_T T> T) and nabla_T T itself.
struct El1Terms {
  VectorFieldAlongCurve second_derivative;
  VectorFieldAlongCurve curvature_term;
  VectorFieldAlongCurve coupling_term;
  VectorFieldAlongCurve acceleration;
};

El1Terms el1_terms(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi);

/// Second covariant derivative along the curve with the compact stencil.
VectorFieldAlongCurve second_covariant_derivative(const VectorFieldAlongCurve& field, const DiscreteCurve& curve);

/// Arclengths where the curvature crosses K/2.
std::vector<double> curvature_jumps(const CurvatureProfile& profile, double K);

/// Arclengths where the curvature vector flips direction (negative inner
/// product of neighbors) while |a| >= K/2 on both sides.
std::vector<double> normal_reversals(const DiscreteCurve& curve, double K);

/// Sorted union of curvature_jumps and normal_reversals.
std::vector<double> singular_locations(const DiscreteCurve& curve, double K);

/// Nodes (0..N) that enter the EL1 residual: interior, outside the boundary
/// layers and outside the jump neighborhoods.
std::vector<bool> residual_mask(const DiscreteCurve& curve, const std::vector<double>& jumps,
                                const VerifyOptions& options);

/// lambda minimizing sum |A - L lambda nabla_T T|_g^2 over the masked nodes,
/// A = nabla^2 phi + R(phi,T)T + 2 nabla(<phi, a> T). Throws GeodesicDegenerate.
double fit_lambda(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, const std::vector<bool>& mask);

struct El1Result {
  VectorFieldAlongCurve residual;
  double rel_norm = 0.0;
  std::vector<double> jump_locations;
  std::vector<bool> mask;
};

El1Result el1_residual(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, double lambda, double K,
                       const VerifyOptions& options = {});

double el2_residual(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, double K);

struct TwoValueFractions {
  double near_zero = 0.0;
  double near_K = 0.0;
  double other = 0.0;
};

struct Classification {
  TwoValueFractions fractions;
  std::vector<double> jump_locations;
  int counted = 0;  // nodes left after jump masking
};

/// Fractions of unmasked interior nodes with kappa <= eps K, |kappa - K| <=
/// eps K, or neither. Nodes within mask_halfwidth * h of a K/2 crossing are
/// left out of the counts.
Classification classify_two_value(const CurvatureProfile& profile, double K, double eps_rel,
                                  double mask_halfwidth = 3.0);

struct VerificationReport {
  double el1_residual_rel = 0.0;
  double el2_residual_rel = 0.0;
  double lambda_used = 0.0;
  double K_used = 0.0;
  TwoValueFractions fractions;
  double boundary_layer = 0.0;
  std::vector<double> jump_locations;
};

/// Full check at exponent p: phi from K_p = kp_energy(curve, p), K the
/// curve's own K_inf, lambda from the least-squares fit unless given.
VerificationReport verify_curve(const DiscreteCurve& curve, double p, std::optional<double> lambda = std::nullopt,
                                const VerifyOptions& options = {});

/// EL1 relative residual as a function of lambda (ill-conditioning probe).
std::vector<std::pair<double, double>> lambda_sweep(const DiscreteCurve& curve, double p,
                                                    const std::vector<double>& lambdas,
                                                    const VerifyOptions& options = {});

// ---------------------------------------------------------------------------
// Planar arc-chain oracle

enum class PieceType { Arc, Segment };

struct ChainPiece {
  PieceType type = PieceType::Segment;
  double signed_curvature = 0.0;
  double length = 0.0;
};

struct ArcChainSolution {
  std::vector<ChainPiece> pieces;
  double K_max = 0.0;
  std::string word;  // e.g. "LSR"
};

/// Chain of at most max_pieces arcs/segments with one curvature magnitude
/// that meets the planar boundary data and has length L, minimizing that
/// magnitude. Throws NoChainFound.
ArcChainSolution arc_chain_oracle(const BoundaryConditions& bc, int max_pieces = 3);

/// Position and unit tangent at arclength s along the chain.
std::pair<VecX, VecX> chain_state(const ArcChainSolution& chain, const BoundaryConditions& bc, double s);

/// Nodes of the chain at s_i = i L / N.
DiscreteCurve sample_arc_chain(const ArcChainSolution& chain, const BoundaryConditions& bc, int N);

}  // namespace elastica
