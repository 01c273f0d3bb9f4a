#pragma once

// Discrete arclength-parametrized curves in a chart and finite-difference
// covariant calculus along them.

#include "elastica/manifold.hpp"

#include <optional>

namespace elastica {

/// N + 1 chart points; node i sits at arclength s_i = i * L / N.
class DiscreteCurve {
 public:
  static constexpr int kMinSegments = 8;

  DiscreteCurve(Manifold model, NodeMatrix nodes, double target_length);

  const Manifold& model() const noexcept { return model_; }
  const NodeMatrix& nodes() const noexcept { return nodes_; }
  int segments() const noexcept { return static_cast<int>(nodes_.rows()) - 1; }
  int size() const noexcept { return static_cast<int>(nodes_.rows()); }
  int dimension() const noexcept { return model_.dimension(); }
  double target_length() const noexcept { return target_length_; }
  double spacing() const noexcept { return target_length_ / segments(); }
  VecX node(int i) const { return nodes_.row(i).transpose(); }

  /// Copy with different node positions; validates the new nodes.
  DiscreteCurve with_nodes(NodeMatrix nodes) const { return {model_, std::move(nodes), target_length_}; }

 private:
  Manifold model_;
  NodeMatrix nodes_;
  double target_length_;
};

/// Per-node tangent vectors; value i is based at node i.
struct VectorFieldAlongCurve {
  NodeMatrix values;

  VecX at(int i) const { return values.row(i).transpose(); }
  static VectorFieldAlongCurve zeros(const DiscreteCurve& curve) {
    return {NodeMatrix::Zero(curve.size(), curve.dimension())};
  }
};

/// Unsigned curvature at the interior nodes 1..N-1 (kappa[i - 1] is node i).
struct CurvatureProfile {
  VecX kappa;
  double spacing = 0.0;

  int size() const noexcept { return static_cast<int>(kappa.size()); }
  /// Arclength of profile entry j.
  double arclength(int j) const noexcept { return (j + 1) * spacing; }
};

/// Covariant acceleration a = gamma'' + Gamma(gamma', gamma') at the middle of
/// three consecutive nodes, with the compact second difference for gamma''.
template <typename Scalar, typename D0, typename D1, typename D2>
Vec<Scalar> acceleration_stencil(const Manifold& model, const Eigen::MatrixBase<D0>& prev,
                                 const Eigen::MatrixBase<D1>& mid, const Eigen::MatrixBase<D2>& next,
                                 double h) {
  const Vec<Scalar> velocity = (next - prev) / Scalar(2 * h);
  const Vec<Scalar> second = (next - Scalar(2) * mid + prev) / Scalar(h * h);
  return Vec<Scalar>(second + christoffel_contract<Scalar>(model, mid, velocity, velocity));
}

/// Scale applied to the stencil at node i. Nodes 1 and N-1 sit on the end
/// geodesics, so their outer chord samples the end tangent itself (s = 0 or
/// L) rather than the chord midpoint: the tangent samples are 3h/2 apart
/// there, not h.
inline double stencil_scale(int i, int segments) noexcept {
  return (i == 1 || i == segments - 1) ? 2.0 / 3.0 : 1.0;
}

/// |a|_g^2 for the same stencil; smooth in the nodes even where a = 0.
template <typename Scalar, typename D0, typename D1, typename D2>
Scalar curvature_sq_stencil(const Manifold& model, const Eigen::MatrixBase<D0>& prev,
                            const Eigen::MatrixBase<D1>& mid, const Eigen::MatrixBase<D2>& next, double h) {
  const Vec<Scalar> a = acceleration_stencil<Scalar>(model, prev, mid, next, h);
  return inner<Scalar>(model, mid, a, a);
}

/// Central differences inside, second-order one-sided stencils at the ends.
VectorFieldAlongCurve tangent_field(const DiscreteCurve& curve);

/// (nabla_T X)_i = dX_i/ds + Gamma(node_i)(T_i, X_i); the end values use
/// one-sided differences and are low-accuracy.
VectorFieldAlongCurve covariant_derivative(const VectorFieldAlongCurve& field, const DiscreteCurve& curve);

/// nabla_T T by the compact three-point stencil; end values are zero.
VectorFieldAlongCurve curvature_vector(const DiscreteCurve& curve);

CurvatureProfile curvature_profile(const DiscreteCurve& curve);

/// Sum of segment lengths with the metric evaluated at segment midpoints.
double length(const DiscreteCurve& curve);

/// Geodesic distances between consecutive nodes.
VecX segment_lengths(const DiscreteCurve& curve);

/// Resample nodes so consecutive geodesic chords are equal, keeping the
/// endpoints. Interpolates the old nodes with a cubic Hermite spline over
/// cumulative chord length.
DiscreteCurve reparametrize_arclength(const DiscreteCurve& curve);

struct NodeWindow {
  int begin = 0;
  int end = 0;  // inclusive
};

struct NearestPoint {
  double parameter = 0.0;  // segment index plus fraction along it
  double distance = 0.0;
  VecX foot;
};

/// Closest point of the piecewise-geodesic polyline restricted to a window.
NearestPoint nearest_point(const DiscreteCurve& curve, const VecX& x, NodeWindow window);

inline NearestPoint nearest_point(const DiscreteCurve& curve, const VecX& x) {
  return nearest_point(curve, x, {0, curve.segments()});
}

}  // namespace elastica
