#include "elastica/optimizer.hpp"

#include "elastica/verifier.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace elastica {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_free(int i, int n) { return i >= 2 && i <= n - 2; }

// H^2 preconditioner D2^T W D2 + mu I on the free nodes 2..N-2. W carries the
// squared conformal factor and, for p > 2, the power-mean curvature weight
// (p-1) (kappa_i / K_p)^(p-2), floored so flat stretches stay coupled.
constexpr double kWeightFloor = 0.05;

Eigen::SparseMatrix<double> sobolev_matrix(const DiscreteCurve& curve, double p) {
  const int n = curve.segments();
  const CurvatureProfile profile = curvature_profile(curve);
  const double kp = kp_energy(profile, p);
  const int m = n - 3;
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 1; i <= n - 1; ++i) {
    const int cols[3] = {i - 1, i, i + 1};
    double weight = conformal_factor<double>(curve.model(), curve.node(i));
    if (p > 2.0 && kp > 0.0) {
      const double ratio = profile.kappa[i - 1] / kp;
      weight *= std::sqrt(std::max((p - 1.0) * std::pow(ratio, p - 2.0), kWeightFloor));
    }
    const double w[3] = {weight, -2.0 * weight, weight};
    for (int s = 0; s < 3; ++s) {
      if (!is_free(cols[s], n)) continue;
      for (int t = 0; t < 3; ++t) {
        if (!is_free(cols[t], n)) continue;
        entries.emplace_back(cols[s] - 2, cols[t] - 2, w[s] * w[t]);
      }
    }
  }
  for (int k = 0; k < m; ++k) entries.emplace_back(k, k, 1e-10);
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

class Preconditioner {
 public:
  Preconditioner(const DiscreteCurve& curve, double p) : n_(curve.segments()), solver_(sobolev_matrix(curve, p)) {
    if (solver_.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "preconditioner factorization failed");
  }

  // A^{-1} v on the free rows; frozen rows of the result are zero.
  NodeMatrix solve(const NodeMatrix& v) const {
    NodeMatrix out = NodeMatrix::Zero(v.rows(), v.cols());
    out.middleRows(2, n_ - 3) = solver_.solve(NodeMatrix(v.middleRows(2, n_ - 3)));
    return out;
  }

 private:
  int n_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

// Lifts normal node displacements to first-order chord-preserving motions.
// Chords 1..N-3 fix the tangential shift of nodes 2..N-2 by a forward
// recursion; the last chord is left as one linear condition (the length).
class ChordLift {
 public:
  explicit ChordLift(const DiscreteCurve& curve) : n_(curve.segments()) {
    const Manifold& model = curve.model();
    a_.resize(n_ - 1);
    b_.resize(n_ - 1);
    t_.resize(n_ + 1);
    for (int j = 1; j <= n_ - 2; ++j) {
      a_[j] = distance_gradient(model, curve.node(j), curve.node(j + 1));
      b_[j] = distance_gradient(model, curve.node(j + 1), curve.node(j));
    }
    for (int i = 1; i < n_; ++i) {
      t_[i] = curve.node(i + 1) - curve.node(i - 1);
      t_[i] /= t_[i].norm();
    }
  }

  // d = Lambda(N v) on rows 2..N-2.
  NodeMatrix apply(const NodeMatrix& v) const {
    NodeMatrix d = NodeMatrix::Zero(v.rows(), v.cols());
    for (int i = 2; i <= n_ - 2; ++i) d.row(i) = normal(i, v.row(i).transpose()).transpose();
    for (int j = 1; j <= n_ - 3; ++j) {
      const double source = (j >= 2 ? a_[j].dot(d.row(j).transpose()) : 0.0) + b_[j].dot(d.row(j + 1).transpose());
      d.row(j + 1) += -source / b_[j].dot(t_[j + 1]) * t_[j + 1].transpose();
    }
    return d;
  }

  // (Lambda N)^T G.
  NodeMatrix adjoint(const NodeMatrix& G) const {
    NodeMatrix out = NodeMatrix::Zero(G.rows(), G.cols());
    for (int i = 2; i <= n_ - 2; ++i) out.row(i) = G.row(i);
    double mu = 0.0;  // adjoint of tau_{j+1}
    for (int j = n_ - 3; j >= 1; --j) {
      const int k = j + 1;
      mu = G.row(k).dot(t_[k].transpose()) + (k <= n_ - 3 ? carry(k) * mu : 0.0);
      const double scale = -mu / b_[j].dot(t_[k]);
      out.row(k) += scale * b_[j].transpose();
      if (j >= 2) out.row(j) += scale * a_[j].transpose();
    }
    for (int i = 2; i <= n_ - 2; ++i) out.row(i) = normal(i, out.row(i).transpose()).transpose();
    return out;
  }

  // Change of the last free chord, N-2 -> N-1, under apply(v).
  NodeMatrix length_condition(int dim) const {
    NodeMatrix G = NodeMatrix::Zero(n_ + 1, dim);
    G.row(n_ - 2) = a_[n_ - 2].transpose();
    return adjoint(G);
  }

  double length_change(const NodeMatrix& d) const { return a_[n_ - 2].dot(d.row(n_ - 2).transpose()); }

 private:
  VecX normal(int i, const VecX& v) const { return v - v.dot(t_[i]) * t_[i]; }
  // d tau_{k+1} / d tau_k
  double carry(int k) const { return -a_[k].dot(t_[k]) / b_[k].dot(t_[k + 1]); }

  int n_;
  std::vector<VecX> a_;
  std::vector<VecX> b_;
  std::vector<VecX> t_;
};

double frobenius_dot(const NodeMatrix& a, const NodeMatrix& b) { return (a.array() * b.array()).sum(); }

// Length of the polyline through nodes 1..N-1 and its gradient on the free
// nodes.
double inner_length(const DiscreteCurve& curve, NodeMatrix* gradient) {
  const Manifold& model = curve.model();
  const int n = curve.segments();
  if (gradient) *gradient = NodeMatrix::Zero(curve.size(), curve.dimension());
  double total = 0.0;
  for (int j = 1; j <= n - 2; ++j) {
    const VecX a = curve.node(j);
    const VecX b = curve.node(j + 1);
    total += distance(model, a, b);
    if (!gradient) continue;
    if (is_free(j, n)) gradient->row(j) += distance_gradient(model, a, b).transpose();
    if (is_free(j + 1, n)) gradient->row(j + 1) += distance_gradient(model, b, a).transpose();
  }
  return total;
}

// Equal chords on nodes 1..N-1 at fixed image; nodes 0, 1, N-1, N untouched.
DiscreteCurve redistribute(const DiscreteCurve& curve) {
  const int n = curve.segments();
  const NodeMatrix inner_nodes = curve.nodes().middleRows(1, n - 1);
  const double inner = inner_length(curve, nullptr);
  DiscreteCurve sub(curve.model(), inner_nodes, inner);
  try {
    sub = reparametrize_arclength(sub);
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateCurve, std::string("redistribution failed: ") + e.what());
  }
  NodeMatrix x = curve.nodes();
  x.middleRows(1, n - 1) = sub.nodes();
  return curve.with_nodes(std::move(x));
}

// Uniformly spaced samples of a dense polyline by cumulative geodesic chord.
NodeMatrix resample_polyline(const Manifold& model, const NodeMatrix& dense, int segments) {
  const int m = static_cast<int>(dense.rows());
  std::vector<double> cum(m, 0.0);
  for (int k = 1; k < m; ++k) {
    cum[k] = cum[k - 1] + distance(model, dense.row(k - 1).transpose(), dense.row(k).transpose());
  }
  NodeMatrix out(segments + 1, dense.cols());
  int k = 1;
  for (int i = 0; i <= segments; ++i) {
    const double s = cum.back() * i / segments;
    while (k < m - 1 && cum[k] < s) ++k;
    const double span = cum[k] - cum[k - 1];
    const double t = span > 0.0 ? std::clamp((s - cum[k - 1]) / span, 0.0, 1.0) : 0.0;
    out.row(i) = (1.0 - t) * dense.row(k - 1) + t * dense.row(k);
  }
  out.row(0) = dense.row(0);
  out.row(segments) = dense.row(m - 1);
  return out;
}

NodeMatrix blended_seed(const BoundaryConditions& bc, const Manifold& model, double arm, int samples) {
  NodeMatrix out(samples + 1, model.dimension());
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double w = t * t * (3.0 - 2.0 * t);
    const VecX from = exp_map(model, bc.x1, bc.v1, arm * t);
    const VecX into = exp_map(model, bc.x2, bc.v2, -arm * (1.0 - t));
    const VecX x = (1.0 - w) * from + w * into;
    model.check_domain(x);
    out.row(k) = x.transpose();
  }
  return out;
}

double polyline_length(const Manifold& model, const NodeMatrix& pts) {
  double total = 0.0;
  for (Eigen::Index k = 1; k < pts.rows(); ++k) {
    total += distance(model, pts.row(k - 1).transpose(), pts.row(k).transpose());
  }
  return total;
}

}  // namespace

void BoundaryConditions::validate(const Manifold& model) const {
  const int n = model.dimension();
  if (x1.size() != n || x2.size() != n || v1.size() != n || v2.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "boundary data dimension does not match the model");
  }
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidArgument, "L must be positive");
  if (!model.in_domain(x1) || !model.in_domain(x2)) {
    throw Error(ErrorCode::OutOfChartDomain, "endpoint outside the chart domain");
  }
  if (std::abs(norm<double>(model, x1, v1) - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "|v1|_g = 1 violated");
  }
  if (std::abs(norm<double>(model, x2, v2) - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "|v2|_g = 1 violated");
  }
  const double d = distance(model, x1, x2);
  if (L < d - 1e-12 * std::max(1.0, d)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "L >= distance(x1, x2) violated: L = " << L << ", distance = " << d;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

void SolverConfig::validate() const {
  if (max_iters <= 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");
  if (!(grad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "grad_tol must be positive");
  if (!(step_init > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_init must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::InvalidArgument, "armijo_c must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error(ErrorCode::InvalidArgument, "backtrack must lie in (0, 1)");
  if (reparam_every <= 0) throw Error(ErrorCode::InvalidArgument, "reparam_every must be positive");
  if (stall_window <= 0) throw Error(ErrorCode::InvalidArgument, "stall_window must be positive");
}

DiscreteCurve enforce_boundary(const DiscreteCurve& curve, const BoundaryConditions& bc) {
  const Manifold& model = curve.model();
  const int n = curve.segments();
  const double h = curve.spacing();
  NodeMatrix x = curve.nodes();
  x.row(0) = bc.x1.transpose();
  x.row(n) = bc.x2.transpose();
  x.row(1) = exp_map(model, bc.x1, bc.v1, h).transpose();
  x.row(n - 1) = exp_map(model, bc.x2, bc.v2, -h).transpose();
  return curve.with_nodes(std::move(x));
}

double arclength_defect(const DiscreteCurve& curve) {
  const double h = curve.spacing();
  return (segment_lengths(curve).array() - h).abs().maxCoeff() / h;
}

DiscreteCurve project_arclength(const DiscreteCurve& curve, double tol) {
  const Manifold& model = curve.model();
  const int n = curve.segments();
  const double h = curve.spacing();
  const double target = (n - 2) * h;
  const Preconditioner precond(curve, 2.0);
  DiscreteCurve x = curve;
  for (int it = 0; it < 30; ++it) {
    x = redistribute(x);
    NodeMatrix grad;
    double err = inner_length(x, &grad) - target;
    if (std::abs(err) <= 1e-14 * target && arclength_defect(x) <= tol) return x;
    // Scalar Newton along the smooth direction A^{-1} grad(length).
    const NodeMatrix w = precond.solve(grad);
    const double rate = frobenius_dot(grad, w);
    if (!(rate > 0.0)) {
      if (std::abs(err) <= 1e-12 * target) return x;
      throw Error(ErrorCode::DegenerateCurve, "length cannot be corrected: no admissible direction");
    }
    double t = 0.0;
    NodeMatrix moved = x.nodes();
    for (int k = 0; k < 8 && std::abs(err) > 1e-15 * target; ++k) {
      t -= err / rate;
      moved = x.nodes() + t * w;
      for (int i = 2; i <= n - 2; ++i) {
        if (!model.in_domain(moved.row(i).transpose())) {
          throw Error(ErrorCode::OutOfChartDomain, "length correction left the chart domain");
        }
      }
      err = inner_length(x.with_nodes(moved), nullptr) - target;
    }
    x = x.with_nodes(std::move(moved));
  }
  if (arclength_defect(x) <= 1e-9) return x;
  throw Error(ErrorCode::DegenerateCurve, "arclength projection did not converge");
}

DiscreteCurve initial_curve(const BoundaryConditions& bc, const Manifold& model, int N) {
  bc.validate(model);
  if (N < DiscreteCurve::kMinSegments) throw Error(ErrorCode::CurveTooCoarse, "N below the minimum segment count");
  const int samples = std::max(4000, 10 * N);
  auto mismatch = [&](double arm) {
    try {
      return polyline_length(model, blended_seed(bc, model, arm, samples)) - bc.L;
    } catch (const Error&) {
      return kNaN;
    }
  };

  const double tol = 1e-5 * bc.L;
  double arm = kNaN;
  constexpr int kGrid = 64;
  double lo = 0.0;
  double f_lo = mismatch(0.0);
  double best = std::abs(f_lo);
  if (std::abs(f_lo) <= tol) arm = 0.0;
  for (int k = 1; k <= kGrid && std::isnan(arm); ++k) {
    const double hi = 4.0 * bc.L * k / kGrid;
    const double f_hi = mismatch(hi);
    if (std::isnan(f_hi)) break;
    best = std::min(best, std::abs(f_hi));
    if (std::abs(f_hi) <= tol) {
      arm = hi;
    } else if (!std::isnan(f_lo) && (f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo;
      double fa = f_lo;
      double b = hi;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = mismatch(mid);
        if (std::isnan(fm)) break;
        if (std::abs(fm) <= 1e-3 * tol || it == 79) {
          a = b = mid;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      arm = 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (std::isnan(arm)) {
    std::ostringstream msg;
    msg << "blend bow cannot reach L = " << bc.L << " (closest length mismatch " << best << ")";
    throw Error(ErrorCode::SeedFailure, msg.str());
  }

  const NodeMatrix dense = blended_seed(bc, model, arm, samples);
  DiscreteCurve seed(model, resample_polyline(model, dense, N), bc.L);
  seed = enforce_boundary(seed, bc);
  return project_arclength(seed);
}

PSolveResult solve_p(const DiscreteCurve& curve0, const BoundaryConditions& bc, double p, const PenaltySpec& spec,
                     const SolverConfig& config) {
  config.validate();
  spec.validate();
  const Manifold& model = curve0.model();
  bc.validate(model);
  if (!(p >= 2.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 2");
  const int n = curve0.segments();
  const double L = curve0.target_length();
  const double h = curve0.spacing();

  DiscreteCurve x = project_arclength(enforce_boundary(curve0, bc));
  Evaluation eval = evaluate(x, p, spec, true);

  PSolveResult result(x);
  result.p = p;
  double alpha = config.step_init;
  double best_in_window = eval.value.total;
  int window_start = 0;
  int since_projection = 0;
  int iter = 0;

  for (; iter < config.max_iters; ++iter) {
    NodeMatrix g = eval.gradient;
    g.row(0).setZero();
    g.row(1).setZero();
    g.row(n - 1).setZero();
    g.row(n).setZero();

    // Sobolev gradient over lifted normal displacements, with the
    // first-order length change removed in the A metric.
    const ChordLift lift(x);
    const Preconditioner precond(x, p);
    const NodeMatrix reduced = lift.adjoint(g);
    const NodeMatrix condition = lift.length_condition(g.cols());
    const NodeMatrix u = precond.solve(reduced);
    const NodeMatrix w = precond.solve(condition);
    const double rate = frobenius_dot(condition, w);
    const double beta = rate > 0.0 ? frobenius_dot(condition, u) / rate : 0.0;
    const double scale = (n - 1) * std::pow(h, 4) * std::max(eval.value.kp, 1.0 / L);
    const NodeMatrix direction = -scale * lift.apply(u - beta * w);

    const double slope = frobenius_dot(g, direction);
    const double step_norm = direction.cwiseAbs().maxCoeff();
    if (step_norm <= config.grad_tol * L || slope >= 0.0) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    for (int trial = 0; trial < 60; ++trial) {
      try {
        NodeMatrix moved = x.nodes() + alpha * direction;
        DiscreteCurve candidate = x.with_nodes(std::move(moved));
        const bool project = (since_projection + 1) % config.reparam_every == 0;
        if (project) candidate = project_arclength(candidate);
        Evaluation trial_eval = evaluate(candidate, p, spec, true);
        if (trial_eval.value.total <= eval.value.total + config.armijo_c * alpha * slope) {
          x = std::move(candidate);
          eval = std::move(trial_eval);
          since_projection = project ? 0 : since_projection + 1;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OutOfChartDomain && e.code() != ErrorCode::DegenerateCurve &&
            e.code() != ErrorCode::InvalidArgument) {
          throw;
        }
      }
      alpha *= config.backtrack;
    }
    if (!accepted) {
      // Predicted decrease at rounding level of the objective: this is a
      // stationary point as far as double precision can tell.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(eval.value.total));
      if (std::abs(slope) * config.step_init <= noise) {
        result.converged = true;
      } else {
        result.stalled = true;
      }
      break;
    }
    result.history.push_back(eval.value.total);
    alpha = std::min(alpha / config.backtrack, 1e3 * config.step_init);

    if (eval.value.total < best_in_window * (1.0 - 1e-14)) {
      best_in_window = eval.value.total;
      window_start = iter;
    } else if (iter - window_start >= config.stall_window) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  if (since_projection != 0) {
    x = project_arclength(x);
    eval = evaluate(x, p, spec, false);
  }
  result.curve = x;
  result.iterations = iter;
  result.K_p = kp_energy(x, p);
  result.penalty_value = eval.value.penalty;
  result.objective = eval.value.total;
  result.geodesic = result.K_p * L < kGeodesicThreshold;
  result.lambda_p = kNaN;
  if (!result.geodesic) {
    try {
      result.lambda_p = estimate_lambda(result, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GeodesicDegenerate) throw;
    }
  }
  return result;
}

double estimate_lambda(const PSolveResult& result, double p) {
  const DiscreteCurve& curve = result.curve;
  const double kp = kp_energy(curve, p);
  if (kp <= 1e-12) throw Error(ErrorCode::GeodesicDegenerate, "curve is a geodesic; lambda undefined");
  const VectorFieldAlongCurve phi = phi_normalized(curve, p, kp);
  const CurvatureProfile profile = curvature_profile(curve);
  const VerifyOptions options;
  const auto mask = residual_mask(curve, singular_locations(curve, kinf_energy(profile)), options);
  return fit_lambda(curve, phi, mask);
}

}  // namespace elastica
