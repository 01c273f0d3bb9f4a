#include "elastica/curve.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace elastica {

DiscreteCurve::DiscreteCurve(Manifold model, NodeMatrix nodes, double target_length)
    : model_(std::move(model)), nodes_(std::move(nodes)), target_length_(target_length) {
  if (nodes_.rows() - 1 < kMinSegments) {
    throw Error(ErrorCode::CurveTooCoarse, "curve needs at least " + std::to_string(kMinSegments) +
                                               " segments, got " + std::to_string(nodes_.rows() - 1));
  }
  if (nodes_.cols() != model_.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "node dimension does not match the model");
  }
  if (!(target_length_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "target length must be positive");
  for (Eigen::Index i = 0; i < nodes_.rows(); ++i) model_.check_domain(nodes_.row(i).transpose());
}

namespace {

// First derivative of a node-sampled quantity with spacing h.
template <typename Rows>
VecX d1(const Rows& values, int i, int last, double h) {
  if (i == 0) return (-3.0 * values.row(0) + 4.0 * values.row(1) - values.row(2)).transpose() / (2.0 * h);
  if (i == last) {
    return (3.0 * values.row(last) - 4.0 * values.row(last - 1) + values.row(last - 2)).transpose() / (2.0 * h);
  }
  return (values.row(i + 1) - values.row(i - 1)).transpose() / (2.0 * h);
}

}  // namespace

VectorFieldAlongCurve tangent_field(const DiscreteCurve& curve) {
  const int last = curve.segments();
  const double h = curve.spacing();
  VectorFieldAlongCurve T{NodeMatrix(curve.size(), curve.dimension())};
  for (int i = 0; i <= last; ++i) T.values.row(i) = d1(curve.nodes(), i, last, h).transpose();
  return T;
}

VectorFieldAlongCurve covariant_derivative(const VectorFieldAlongCurve& field, const DiscreteCurve& curve) {
  if (field.values.rows() != curve.size() || field.values.cols() != curve.dimension()) {
    throw Error(ErrorCode::FieldCurveMismatch, "field is not sampled on this curve");
  }
  const int last = curve.segments();
  const double h = curve.spacing();
  const VectorFieldAlongCurve T = tangent_field(curve);
  VectorFieldAlongCurve out{NodeMatrix(curve.size(), curve.dimension())};
  for (int i = 0; i <= last; ++i) {
    const VecX x = curve.node(i);
    out.values.row(i) =
        (d1(field.values, i, last, h) + christoffel_contract<double>(curve.model(), x, T.at(i), field.at(i)))
            .transpose();
  }
  return out;
}

VectorFieldAlongCurve curvature_vector(const DiscreteCurve& curve) {
  const double h = curve.spacing();
  const auto& X = curve.nodes();
  VectorFieldAlongCurve out = VectorFieldAlongCurve::zeros(curve);
  for (int i = 1; i < curve.segments(); ++i) {
    out.values.row(i) = stencil_scale(i, curve.segments()) *
                        acceleration_stencil<double>(curve.model(), X.row(i - 1).transpose(),
                                                     X.row(i).transpose(), X.row(i + 1).transpose(), h)
                            .transpose();
  }
  return out;
}

CurvatureProfile curvature_profile(const DiscreteCurve& curve) {
  const double h = curve.spacing();
  const auto& X = curve.nodes();
  CurvatureProfile profile{VecX(curve.segments() - 1), h};
  for (int i = 1; i < curve.segments(); ++i) {
    const double q = curvature_sq_stencil<double>(curve.model(), X.row(i - 1).transpose(), X.row(i).transpose(),
                                                  X.row(i + 1).transpose(), h);
    profile.kappa[i - 1] = stencil_scale(i, curve.segments()) * std::sqrt(std::max(q, 0.0));
  }
  return profile;
}

double length(const DiscreteCurve& curve) {
  const auto& X = curve.nodes();
  double total = 0.0;
  for (int i = 0; i < curve.segments(); ++i) {
    const VecX a = X.row(i).transpose();
    const VecX b = X.row(i + 1).transpose();
    const VecX mid = 0.5 * (a + b);
    total += conformal_factor<double>(curve.model(), mid) * (b - a).norm();
  }
  return total;
}

VecX segment_lengths(const DiscreteCurve& curve) {
  VecX out(curve.segments());
  for (int i = 0; i < curve.segments(); ++i) out[i] = distance(curve.model(), curve.node(i), curve.node(i + 1));
  return out;
}

namespace {

// Cubic Hermite interpolant of chart coordinates over a strictly increasing
// knot vector.
class HermiteSpline {
 public:
  HermiteSpline(VecX knots, NodeMatrix values) : knots_(std::move(knots)), values_(std::move(values)) {
    const int m = static_cast<int>(knots_.size()) - 1;
    slopes_ = NodeMatrix(values_.rows(), values_.cols());
    for (int i = 1; i < m; ++i) {
      const double hl = knots_[i] - knots_[i - 1];
      const double hr = knots_[i + 1] - knots_[i];
      slopes_.row(i) = (hr * (values_.row(i) - values_.row(i - 1)) / hl +
                        hl * (values_.row(i + 1) - values_.row(i)) / hr) /
                       (hl + hr);
    }
    slopes_.row(0) = end_slope(0, 1, 2);
    slopes_.row(m) = end_slope(m, m - 1, m - 2);
  }

  VecX operator()(double u) const {
    const int m = static_cast<int>(knots_.size()) - 1;
    auto it = std::upper_bound(knots_.data(), knots_.data() + m + 1, u);
    int i = static_cast<int>(it - knots_.data()) - 1;
    i = std::clamp(i, 0, m - 1);
    const double w = knots_[i + 1] - knots_[i];
    const double t = (u - knots_[i]) / w;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return (h00 * values_.row(i) + h10 * w * slopes_.row(i) + h01 * values_.row(i + 1) +
            h11 * w * slopes_.row(i + 1))
        .transpose();
  }

 private:
  // Derivative of the quadratic through nodes a, b, c evaluated at a.
  Eigen::RowVectorXd end_slope(int a, int b, int c) const {
    const double ua = knots_[a], ub = knots_[b], uc = knots_[c];
    const double wa = (2 * ua - ub - uc) / ((ua - ub) * (ua - uc));
    const double wb = (ua - uc) / ((ub - ua) * (ub - uc));
    const double wc = (ua - ub) / ((uc - ua) * (uc - ub));
    return wa * values_.row(a) + wb * values_.row(b) + wc * values_.row(c);
  }

  VecX knots_;
  NodeMatrix values_;
  NodeMatrix slopes_;
};

}  // namespace

DiscreteCurve reparametrize_arclength(const DiscreteCurve& curve) {
  const int n_seg = curve.segments();
  const VecX chords = segment_lengths(curve);
  if ((chords.array() <= 0.0).any()) {
    throw Error(ErrorCode::DegenerateCurve, "two consecutive nodes coincide");
  }
  const double total = chords.sum();
  if (std::abs(total - curve.target_length()) > 0.1 * curve.target_length()) {
    throw Error(ErrorCode::InvalidArgument, "curve length is not within 10% of the target length");
  }
  VecX knots(n_seg + 1);
  knots[0] = 0.0;
  for (int i = 0; i < n_seg; ++i) knots[i + 1] = knots[i] + chords[i];
  const HermiteSpline spline(knots, curve.nodes());

  // Fixed point on the sample parameters: move them until the chords between
  // consecutive samples of the spline are all equal.
  VecX params = knots;
  NodeMatrix samples = curve.nodes();
  VecX cumulative(n_seg + 1);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    cumulative[0] = 0.0;
    for (int i = 0; i < n_seg; ++i) {
      cumulative[i + 1] = cumulative[i] + distance(curve.model(), samples.row(i).transpose(),
                                                   samples.row(i + 1).transpose());
    }
    const double mean = cumulative[n_seg] / n_seg;
    double worst = 0.0;
    for (int i = 0; i < n_seg; ++i) {
      worst = std::max(worst, std::abs(cumulative[i + 1] - cumulative[i] - mean) / mean);
    }
    if (worst < 1e-13) break;
    VecX next = params;
    int j = 0;
    for (int k = 1; k < n_seg; ++k) {
      const double target = k * mean;
      while (j < n_seg - 1 && cumulative[j + 1] < target) ++j;
      const double span = cumulative[j + 1] - cumulative[j];
      const double f = span > 0 ? (target - cumulative[j]) / span : 0.0;
      next[k] = params[j] + f * (params[j + 1] - params[j]);
    }
    params = next;
    for (int k = 1; k < n_seg; ++k) samples.row(k) = spline(params[k]).transpose();
  }
  samples.row(0) = curve.nodes().row(0);
  samples.row(n_seg) = curve.nodes().row(n_seg);
  return curve.with_nodes(std::move(samples));
}

NearestPoint nearest_point(const DiscreteCurve& curve, const VecX& x, NodeWindow window) {
  if (window.begin < 0 || window.end > curve.segments() || window.begin > window.end) {
    throw Error(ErrorCode::EmptyWindow, "node window is empty or out of range");
  }
  const Manifold& model = curve.model();
  model.check_domain(x);
  int best = window.begin;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = window.begin; j <= window.end; ++j) {
    const double d = distance(model, x, curve.node(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  NearestPoint result{static_cast<double>(best), best_d, curve.node(best)};
  for (int seg : {best - 1, best}) {
    if (seg < window.begin || seg + 1 > window.end) continue;
    const VecX a = curve.node(seg);
    const VecX b = curve.node(seg + 1);
    double t_best = 0.0;
    double d_best = 0.0;
    if (model.curvature_sign() == 0) {
      const VecX ab = b - a;
      t_best = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      d_best = (x - (a + t_best * ab)).norm();
    } else {
      const VecX v = log_map(model, a, b);
      auto f = [&](double t) { return distance(model, x, exp_map(model, a, v, t)); };
      const auto [t, d] = boost::math::tools::brent_find_minima(f, 0.0, 1.0, std::numeric_limits<double>::digits / 2);
      t_best = t;
      d_best = d;
    }
    if (d_best < result.distance) {
      result.distance = d_best;
      result.parameter = seg + t_best;
      result.foot = geodesic_point(model, a, b, t_best);
    }
  }
  return result;
}

}  // namespace elastica
