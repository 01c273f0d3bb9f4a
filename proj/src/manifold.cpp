#include "elastica/manifold.hpp"

#include <cmath>
#include <sstream>

namespace elastica {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Antipodal guard on the sphere: log is undefined at distance pi.
constexpr double kCutLocusMargin = 1e-9;

std::string describe(const VecX& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

Manifold::Manifold(ModelKind kind, int dimension) : kind_(kind), dimension_(dimension) {
  if (dimension < 2) {
    throw Error(ErrorCode::InvalidArgument, "manifold dimension must be >= 2");
  }
}

Manifold Manifold::from_id(const std::string& id, int dimension) {
  if (id == "euclidean") return {ModelKind::Euclidean, dimension};
  if (id == "sphere") return {ModelKind::Sphere, dimension};
  if (id == "hyperbolic") return {ModelKind::Hyperbolic, dimension};
  throw Error(ErrorCode::InvalidArgument, "unknown model id '" + id + "'");
}

std::string Manifold::id() const {
  switch (kind_) {
    case ModelKind::Sphere: return "sphere";
    case ModelKind::Hyperbolic: return "hyperbolic";
    default: return "euclidean";
  }
}

bool Manifold::in_domain(const VecX& x) const {
  if (x.size() != dimension_ || !x.allFinite()) return false;
  switch (kind_) {
    case ModelKind::Sphere: return x.norm() < kSphereChartRadius;
    case ModelKind::Hyperbolic: return x.norm() <= 1.0 - kHyperbolicGuard;
    default: return true;
  }
}

void Manifold::check_domain(const VecX& x) const {
  if (x.size() != dimension_) {
    throw Error(ErrorCode::InvalidArgument, "point has dimension " + std::to_string(x.size()) +
                                                ", model has " + std::to_string(dimension_));
  }
  if (!in_domain(x)) {
    throw Error(ErrorCode::OutOfChartDomain, "point " + describe(x) + " outside the " + id() + " chart");
  }
}

double distance(const Manifold& model, const VecX& x, const VecX& y) {
  model.check_domain(x);
  model.check_domain(y);
  const double diff = (x - y).norm();
  switch (model.kind()) {
    case ModelKind::Sphere: {
      // tan(d/2) = |x - y| / sqrt(1 + 2 x.y + |x|^2 |y|^2)
      const double c = 1.0 + 2.0 * x.dot(y) + x.squaredNorm() * y.squaredNorm();
      return 2.0 * std::atan2(diff, std::sqrt(std::max(c, 0.0)));
    }
    case ModelKind::Hyperbolic: {
      const double s = diff / std::sqrt((1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm()));
      return 2.0 * std::asinh(s);
    }
    default: return diff;
  }
}

VecX exp_map(const Manifold& model, const VecX& x, const VecX& v, double t) {
  model.check_domain(x);
  if (v.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "tangent dimension mismatch");
  const VecX tv = t * v;
  const double speed = tv.norm();
  if (speed == 0.0) return x;
  const int k = model.curvature_sign();
  VecX y;
  if (k == 0) {
    y = x + tv;
  } else {
    const double lambda = conformal_factor<double>(model, x);
    const double half = 0.5 * lambda * speed;
    const double scale = (k > 0) ? std::tan(half) : std::tanh(half);
    y = detail::mobius_add(x, scale * tv / speed, k);
  }
  model.check_domain(y);
  return y;
}

VecX log_map(const Manifold& model, const VecX& x, const VecX& y) {
  model.check_domain(x);
  model.check_domain(y);
  const int k = model.curvature_sign();
  if (k == 0) return y - x;
  const VecX w = detail::mobius_add(-x, y, k);
  // Exactly antipodal sphere points make the Mobius denominator vanish.
  if (!w.allFinite()) throw Error(ErrorCode::BeyondInjectivityRadius, "points are (nearly) antipodal");
  const double wn = w.norm();
  if (wn == 0.0) return VecX::Zero(x.size());
  const double lambda = conformal_factor<double>(model, x);
  double half;
  if (k > 0) {
    half = std::atan(wn);
    if (2.0 * half > kPi - kCutLocusMargin) {
      throw Error(ErrorCode::BeyondInjectivityRadius, "points are (nearly) antipodal");
    }
  } else {
    half = std::atanh(std::min(wn, 1.0 - 1e-16));
  }
  return (2.0 / lambda) * half * w / wn;
}

VecX distance_gradient(const Manifold& model, const VecX& x, const VecX& y) {
  const VecX v = log_map(model, x, y);
  const double lambda = conformal_factor<double>(model, x);
  const double d = lambda * v.norm();
  if (d == 0.0) return VecX::Zero(x.size());
  return -(lambda * lambda / d) * v;
}

VecX geodesic_point(const Manifold& model, const VecX& a, const VecX& b, double t) {
  if (model.curvature_sign() == 0) return a + t * (b - a);
  return exp_map(model, a, log_map(model, a, b), t);
}

}  // namespace elastica
