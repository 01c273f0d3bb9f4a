#pragma once

// Riemannian data of the built-in chart models.
//
// Every model is conformally flat in its chart, g = lambda(x)^2 * delta:
//   euclidean   lambda = 1
//   sphere      lambda = 2 / (1 + |x|^2)   (stereographic from the south pole)
//   hyperbolic  lambda = 2 / (1 - |x|^2)   (Poincare ball)
//
// The geometric kernels are templated on the scalar so the curvature stencil
// can be differentiated with Eigen's forward-mode AutoDiff. Exp/log/distance
// use closed forms that need transcendental functions and are double-only in
// practice.

#include "elastica/types.hpp"

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

namespace elastica {

enum class ModelKind { Euclidean, Sphere, Hyperbolic };

/// Immutable description of (M, g) in a single chart.
class Manifold {
 public:
  static constexpr double kSphereChartRadius = 10.0;
  static constexpr double kHyperbolicGuard = 1e-6;

  Manifold(ModelKind kind, int dimension);

  /// "euclidean", "sphere" or "hyperbolic".
  static Manifold from_id(const std::string& id, int dimension);

  ModelKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  std::string id() const;

  /// Sectional curvature of the model: -1, 0 or +1.
  int curvature_sign() const noexcept {
    switch (kind_) {
      case ModelKind::Sphere: return 1;
      case ModelKind::Hyperbolic: return -1;
      default: return 0;
    }
  }

  bool in_domain(const VecX& x) const;

  /// Throws OutOfChartDomain (or InvalidArgument on a dimension mismatch).
  void check_domain(const VecX& x) const;

  bool operator==(const Manifold& other) const noexcept {
    return kind_ == other.kind_ && dimension_ == other.dimension_;
  }

 private:
  ModelKind kind_;
  int dimension_;
};

template <typename Scalar>
struct TangentVector {
  Vec<Scalar> base;
  Vec<Scalar> components;
};

/// Rank-3 array Gamma^k_{ij}; gamma[k](i, j).
template <typename Scalar>
using ChristoffelSymbols = std::vector<Mat<Scalar>>;

namespace detail {

template <typename Scalar>
double value_of(const Scalar& s) {
  if constexpr (std::is_arithmetic_v<Scalar>) {
    return static_cast<double>(s);
  } else {
    return value_of(s.value());
  }
}

template <typename Derived>
VecX values_of(const Eigen::MatrixBase<Derived>& v) {
  VecX out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = value_of(v[i]);
  return out;
}

// Mobius addition in the constant-curvature stereographic model with
// curvature k in {-1, +1}.
inline VecX mobius_add(const VecX& a, const VecX& b, double k) {
  const double ab = a.dot(b);
  const double a2 = a.squaredNorm();
  const double b2 = b.squaredNorm();
  const double denom = 1.0 - 2.0 * k * ab + k * k * a2 * b2;
  return ((1.0 - 2.0 * k * ab - k * b2) * a + (1.0 + k * a2) * b) / denom;
}

}  // namespace detail

/// lambda(x) with g = lambda^2 * delta. Unchecked.
template <typename Scalar, typename Derived>
Scalar conformal_factor(const Manifold& model, const Eigen::MatrixBase<Derived>& x) {
  switch (model.kind()) {
    case ModelKind::Sphere: return Scalar(2) / (Scalar(1) + x.squaredNorm());
    case ModelKind::Hyperbolic: return Scalar(2) / (Scalar(1) - x.squaredNorm());
    default: return Scalar(1);
  }
}

/// Gradient of log(lambda) in chart coordinates. Unchecked.
template <typename Scalar, typename Derived>
Vec<Scalar> log_factor_gradient(const Manifold& model, const Eigen::MatrixBase<Derived>& x) {
  const int c = model.curvature_sign();
  if (c == 0) return Vec<Scalar>::Zero(x.size());
  const Scalar lambda = conformal_factor<Scalar>(model, x);
  return Vec<Scalar>(-Scalar(c) * lambda * x);
}

/// Christoffel contraction Gamma^k_{ij} u^i v^j. Unchecked; the curvature
/// stencil calls this in its inner loop.
template <typename Scalar, typename D0, typename D1, typename D2>
Vec<Scalar> christoffel_contract(const Manifold& model, const Eigen::MatrixBase<D0>& x,
                                 const Eigen::MatrixBase<D1>& u, const Eigen::MatrixBase<D2>& v) {
  if (model.curvature_sign() == 0) return Vec<Scalar>::Zero(x.size());
  const Vec<Scalar> df = log_factor_gradient<Scalar>(model, x);
  const Scalar df_u = df.dot(u);
  const Scalar df_v = df.dot(v);
  return Vec<Scalar>(u * df_v + v * df_u - u.dot(v) * df);
}

template <typename Scalar>
Mat<Scalar> metric(const Manifold& model, const Vec<Scalar>& x) {
  model.check_domain(detail::values_of(x));
  const Scalar lambda = conformal_factor<Scalar>(model, x);
  return Mat<Scalar>::Identity(x.size(), x.size()) * (lambda * lambda);
}

template <typename Scalar>
ChristoffelSymbols<Scalar> christoffel(const Manifold& model, const Vec<Scalar>& x) {
  model.check_domain(detail::values_of(x));
  const auto n = x.size();
  const Vec<Scalar> df = log_factor_gradient<Scalar>(model, x);
  ChristoffelSymbols<Scalar> gamma(n, Mat<Scalar>::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        Scalar value(0);
        if (i == k) value += df[j];
        if (j == k) value += df[i];
        if (i == j) value -= df[k];
        gamma[k](i, j) = value;
      }
    }
  }
  return gamma;
}

/// g_x(u, v). Unchecked.
template <typename Scalar, typename D0, typename D1, typename D2>
Scalar inner(const Manifold& model, const Eigen::MatrixBase<D0>& x, const Eigen::MatrixBase<D1>& u,
             const Eigen::MatrixBase<D2>& v) {
  const Scalar lambda = conformal_factor<Scalar>(model, x);
  return lambda * lambda * u.dot(v);
}

template <typename Scalar, typename D0, typename D1>
Scalar norm(const Manifold& model, const Eigen::MatrixBase<D0>& x, const Eigen::MatrixBase<D1>& u) {
  using std::sqrt;
  return sqrt(inner<Scalar>(model, x, u, u));
}

/// R(X, Y)Z at x, by the constant-curvature closed form.
template <typename Scalar>
Vec<Scalar> riemann(const Manifold& model, const Vec<Scalar>& x, const Vec<Scalar>& X,
                    const Vec<Scalar>& Y, const Vec<Scalar>& Z) {
  model.check_domain(detail::values_of(x));
  const int c = model.curvature_sign();
  if (c == 0) return Vec<Scalar>::Zero(x.size());
  return Scalar(c) * (inner<Scalar>(model, x, Y, Z) * X - inner<Scalar>(model, x, X, Z) * Y);
}

template <typename Scalar>
TangentVector<Scalar> riemann(const Manifold& model, const TangentVector<Scalar>& X,
                              const TangentVector<Scalar>& Y, const TangentVector<Scalar>& Z) {
  if (X.base != Y.base || X.base != Z.base) {
    throw Error(ErrorCode::MismatchedBasePoints, "riemann arguments are based at different points");
  }
  return {X.base, riemann<Scalar>(model, X.base, X.components, Y.components, Z.components)};
}

/// Unchecked curvature term R(X, Y)Z for the hot loops.
template <typename Scalar, typename D0, typename D1, typename D2, typename D3>
Vec<Scalar> riemann_unchecked(const Manifold& model, const Eigen::MatrixBase<D0>& x,
                              const Eigen::MatrixBase<D1>& X, const Eigen::MatrixBase<D2>& Y,
                              const Eigen::MatrixBase<D3>& Z) {
  const int c = model.curvature_sign();
  if (c == 0) return Vec<Scalar>::Zero(x.size());
  return Vec<Scalar>(Scalar(c) * (inner<Scalar>(model, x, Y, Z) * X - inner<Scalar>(model, x, X, Z) * Y));
}

double distance(const Manifold& model, const VecX& x, const VecX& y);

/// Point reached at time t along the geodesic with initial velocity v.
VecX exp_map(const Manifold& model, const VecX& x, const VecX& v, double t = 1.0);

/// Inverse of exp_map; throws BeyondInjectivityRadius near the cut locus.
VecX log_map(const Manifold& model, const VecX& x, const VecX& y);

/// Covector d/dx d(x, y) (chart components); zero when x == y.
VecX distance_gradient(const Manifold& model, const VecX& x, const VecX& y);

/// Unit-speed geodesic interpolation between a and b at fraction t in [0, 1].
VecX geodesic_point(const Manifold& model, const VecX& a, const VecX& b, double t);

}  // namespace elastica
