#include "elastica/functionals.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <iostream>
#include <limits>

namespace elastica {

namespace {

constexpr double kPi = 3.14159265358979323846;

// log of (1/m) sum q_i^(p/2) over entries with q_i > 0; -inf when all vanish.
double log_mean_power(const VecX& q, double p) {
  double shift = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) shift = std::max(shift, 0.5 * p * std::log(q[i]));
  }
  if (!std::isfinite(shift)) return shift;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) acc += std::exp(0.5 * p * std::log(q[i]) - shift);
  }
  return shift + std::log(acc) - std::log(static_cast<double>(q.size()));
}

double kp_from_squares(const VecX& q, double p) {
  const double lm = log_mean_power(q, p);
  return std::isfinite(lm) ? std::exp(lm / p) : 0.0;
}

void check_exponent(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "p must be finite and >= 2");
}

VecX trapezoid_weights(int segments, double h) {
  VecX w = VecX::Constant(segments + 1, h);
  w[0] = w[segments] = 0.5 * h;
  return w;
}

NodeWindow reference_window(const DiscreteCurve& reference, double s, const std::optional<double>& halfwidth) {
  const int n = reference.segments();
  if (!halfwidth) return {0, n};
  const double h = reference.spacing();
  int begin = static_cast<int>(std::ceil((s - *halfwidth) / h));
  int end = static_cast<int>(std::floor((s + *halfwidth) / h));
  begin = std::clamp(begin, 0, n);
  end = std::clamp(end, 0, n);
  if (begin > end) throw Error(ErrorCode::EmptyWindow, "no reference nodes within the segment window");
  return {begin, end};
}

template <typename Derivatives>
void accumulate_curvature_gradient(const DiscreteCurve& curve, const VecX& weights, NodeMatrix& grad) {
  using AD = Eigen::AutoDiffScalar<Derivatives>;
  const int n = curve.dimension();
  const double h = curve.spacing();
  const auto& X = curve.nodes();
  Vec<AD> prev(n), mid(n), next(n);
  for (int i = 1; i < curve.segments(); ++i) {
    const double w = weights[i - 1];
    if (w == 0.0) continue;
    for (int k = 0; k < n; ++k) {
      prev[k] = AD(X(i - 1, k), 3 * n, k);
      mid[k] = AD(X(i, k), 3 * n, n + k);
      next[k] = AD(X(i + 1, k), 3 * n, 2 * n + k);
    }
    const double f = stencil_scale(i, curve.segments());
    const AD q = f * f * curvature_sq_stencil<AD>(curve.model(), prev, mid, next, h);
    const auto& d = q.derivatives();
    for (int k = 0; k < n; ++k) {
      grad(i - 1, k) += w * d[k];
      grad(i, k) += w * d[n + k];
      grad(i + 1, k) += w * d[2 * n + k];
    }
  }
}

VecX curvature_squares(const DiscreteCurve& curve) {
  const double h = curve.spacing();
  const auto& X = curve.nodes();
  VecX q(curve.segments() - 1);
  for (int i = 1; i < curve.segments(); ++i) {
    const double f = stencil_scale(i, curve.segments());
    q[i - 1] = f * f * std::max(0.0, curvature_sq_stencil<double>(curve.model(), X.row(i - 1).transpose(),
                                                                  X.row(i).transpose(), X.row(i + 1).transpose(), h));
  }
  return q;
}

}  // namespace

void PenaltySpec::validate() const {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma > 0.0 && !reference) throw Error(ErrorCode::MissingReference, "sigma > 0 requires a reference curve");
  if (window_halfwidth && !(*window_halfwidth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "window half-width must be positive");
  }
}

double default_window_halfwidth(double K_estimate, double L) {
  if (!(K_estimate > 0.0)) return 0.25 * L;
  return std::min(0.5 * kPi / K_estimate, 0.25 * L);
}

double kp_energy(const CurvatureProfile& profile, double p) {
  check_exponent(p);
  if (!profile.kappa.allFinite()) throw Error(ErrorCode::InvalidArgument, "curvature profile contains NaN");
  return kp_from_squares(profile.kappa.array().square().matrix(), p);
}

double kp_energy(const DiscreteCurve& curve, double p) {
  check_exponent(p);
  return kp_from_squares(curvature_squares(curve), p);
}

double kinf_energy(const CurvatureProfile& profile) { return profile.kappa.size() ? profile.kappa.maxCoeff() : 0.0; }

double kinf_energy(const DiscreteCurve& curve) { return std::sqrt(curvature_squares(curve).maxCoeff()); }

VecX reference_distances(const DiscreteCurve& curve, const PenaltySpec& spec) {
  spec.validate();
  VecX d = VecX::Zero(curve.size());
  if (!spec.reference) return d;
  const DiscreteCurve& ref = *spec.reference;
  if (!(ref.model() == curve.model())) throw Error(ErrorCode::InvalidArgument, "reference lives on another model");
  const double h = curve.spacing();
  for (int i = 0; i <= curve.segments(); ++i) {
    d[i] = nearest_point(ref, curve.node(i), reference_window(ref, i * h, spec.window_halfwidth)).distance;
  }
  return d;
}

double penalty(const DiscreteCurve& curve, const PenaltySpec& spec) {
  spec.validate();
  if (spec.sigma == 0.0) return 0.0;
  const VecX d = reference_distances(curve, spec);
  const VecX w = trapezoid_weights(curve.segments(), curve.spacing());
  return spec.sigma / (2.0 * curve.target_length()) * w.dot(d.array().square().matrix());
}

ObjectiveValue objective(const DiscreteCurve& curve, double p, const PenaltySpec& spec) {
  return evaluate(curve, p, spec, false).value;
}

Evaluation evaluate(const DiscreteCurve& curve, double p, const PenaltySpec& spec, bool with_gradient) {
  check_exponent(p);
  spec.validate();
  Evaluation out;
  const VecX q = curvature_squares(curve);
  const double log_mean = log_mean_power(q, p);
  out.value.kp = std::isfinite(log_mean) ? std::exp(log_mean / p) : 0.0;
  if (with_gradient) out.gradient = NodeMatrix::Zero(curve.size(), curve.dimension());

  if (with_gradient && out.value.kp > 0.0) {
    // dK_p = (1/m) * 1/2 * sum K_p^(1-p) q_i^(p/2-1) dq_i, in log form.
    const double log_kp = log_mean / p;
    const double m = static_cast<double>(q.size());
    VecX weights(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      if (q[i] > 0.0) {
        weights[i] = 0.5 / m * std::exp((0.5 * p - 1.0) * std::log(q[i]) - (p - 1.0) * log_kp);
      } else {
        weights[i] = (p == 2.0) ? 0.5 / m * std::exp(-log_kp) : 0.0;
      }
    }
    constexpr int kBoundedDim = 8;
    if (curve.dimension() <= kBoundedDim) {
      using Bounded = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3 * kBoundedDim, 1>;
      accumulate_curvature_gradient<Bounded>(curve, weights, out.gradient);
    } else {
      accumulate_curvature_gradient<VecX>(curve, weights, out.gradient);
    }
  }

  if (spec.sigma > 0.0) {
    const DiscreteCurve& ref = *spec.reference;
    if (!(ref.model() == curve.model())) throw Error(ErrorCode::InvalidArgument, "reference lives on another model");
    const Manifold& model = curve.model();
    const double h = curve.spacing();
    const double scale = spec.sigma / (2.0 * curve.target_length());
    const VecX w = trapezoid_weights(curve.segments(), h);
    double acc = 0.0;
    for (int i = 0; i <= curve.segments(); ++i) {
      const VecX x = curve.node(i);
      const NearestPoint np = nearest_point(ref, x, reference_window(ref, i * h, spec.window_halfwidth));
      acc += w[i] * np.distance * np.distance;
      if (with_gradient && np.distance > 0.0) {
        // d(d^2) = -2 g log_x(foot)
        VecX g;
        try {
          g = 2.0 * np.distance * distance_gradient(model, x, np.foot);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BeyondInjectivityRadius) throw;
          std::clog << "[warn] penalty gradient at node " << i << " falls back to chart distance\n";
          const double lambda = conformal_factor<double>(model, x);
          g = 2.0 * lambda * lambda * (x - np.foot);
        }
        out.gradient.row(i) += scale * w[i] * g.transpose();
      }
    }
    out.value.penalty = scale * acc;
  }
  out.value.total = out.value.kp + out.value.penalty;
  if (with_gradient && !out.gradient.allFinite()) {
    throw Error(ErrorCode::NonFiniteGradient, "objective gradient has non-finite entries");
  }
  return out;
}

ObjectiveGradient objective_gradient(const DiscreteCurve& curve, double p, const PenaltySpec& spec,
                                     const BoundaryConditions& bc) {
  bc.validate(curve.model());
  ObjectiveGradient out;
  out.covectors = evaluate(curve, p, spec, true).gradient;
  const int n = curve.segments();
  out.frozen.assign(curve.size(), false);
  out.frozen[0] = out.frozen[1] = out.frozen[n - 1] = out.frozen[n] = true;
  return out;
}

}  // namespace elastica
