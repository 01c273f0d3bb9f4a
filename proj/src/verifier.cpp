#include "elastica/verifier.hpp"

#include "elastica/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace elastica {

namespace {

VectorFieldAlongCurve scaled_acceleration(const DiscreteCurve& curve, double p, double log_scale) {
  const Manifold& model = curve.model();
  VectorFieldAlongCurve out = curvature_vector(curve);
  for (int i = 0; i < curve.size(); ++i) {
    const VecX a = out.at(i);
    const double kappa = norm<double>(model, curve.node(i), a);
    if (kappa == 0.0) {
      out.values.row(i).setZero();
    } else {
      out.values.row(i) *= std::exp((p - 2.0) * std::log(kappa) + log_scale);
    }
  }
  return out;
}

void check_field(const DiscreteCurve& curve, const VectorFieldAlongCurve& field) {
  if (field.values.rows() != curve.size() || field.values.cols() != curve.dimension()) {
    throw Error(ErrorCode::FieldCurveMismatch, "vector field does not match the curve's nodes");
  }
}

}  // namespace

VectorFieldAlongCurve phi_hat(const DiscreteCurve& curve, double p) {
  if (!(p >= 2.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 2");
  return scaled_acceleration(curve, p, 0.0);
}

VectorFieldAlongCurve phi_normalized(const DiscreteCurve& curve, double p, double K_p) {
  if (!(p >= 2.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 2");
  if (!(K_p > 1e-12)) throw Error(ErrorCode::GeodesicDegenerate, "K_p vanishes; phi is undefined");
  return scaled_acceleration(curve, p, -(p - 1.0) * std::log(K_p));
}

VectorFieldAlongCurve second_covariant_derivative(const VectorFieldAlongCurve& field, const DiscreteCurve& curve) {
  check_field(curve, field);
  const Manifold& model = curve.model();
  const int n = curve.segments();
  const double h = curve.spacing();
  VectorFieldAlongCurve out = covariant_derivative(covariant_derivative(field, curve), curve);
  const VectorFieldAlongCurve tangent = tangent_field(curve);

  // Gamma(T, X) per node
  NodeMatrix connection(curve.size(), curve.dimension());
  for (int i = 0; i <= n; ++i) {
    connection.row(i) =
        christoffel_contract<double>(model, curve.node(i), tangent.at(i), field.at(i)).transpose();
  }
  for (int i = 1; i < n; ++i) {
    const VecX x = curve.node(i);
    const VecX second = (field.at(i + 1) - 2.0 * field.at(i) + field.at(i - 1)) / (h * h);
    const VecX first = (field.at(i + 1) - field.at(i - 1)) / (2.0 * h);
    const VecX conn_rate = (connection.row(i + 1) - connection.row(i - 1)).transpose() / (2.0 * h);
    const VecX derivative = first + connection.row(i).transpose();
    const VecX value = second + conn_rate + christoffel_contract<double>(model, x, tangent.at(i), derivative);
    out.values.row(i) = value.transpose();
  }
  return out;
}

El1Terms el1_terms(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi) {
  check_field(curve, phi);
  const Manifold& model = curve.model();
  El1Terms terms;
  terms.acceleration = curvature_vector(curve);
  terms.second_derivative = second_covariant_derivative(phi, curve);
  const VectorFieldAlongCurve tangent = tangent_field(curve);
  terms.curvature_term = VectorFieldAlongCurve::zeros(curve);
  VectorFieldAlongCurve weighted = VectorFieldAlongCurve::zeros(curve);
  for (int i = 0; i < curve.size(); ++i) {
    const VecX x = curve.node(i);
    const VecX t = tangent.at(i);
    terms.curvature_term.values.row(i) = riemann_unchecked<double>(model, x, phi.at(i), t, t).transpose();
    weighted.values.row(i) = inner<double>(model, x, phi.at(i), terms.acceleration.at(i)) * t.transpose();
  }
  terms.coupling_term = covariant_derivative(weighted, curve);
  terms.coupling_term.values *= 2.0;
  return terms;
}

std::vector<double> curvature_jumps(const CurvatureProfile& profile, double K) {
  std::vector<double> jumps;
  if (!(K > 0.0)) return jumps;
  const double level = 0.5 * K;
  for (int j = 0; j + 1 < profile.size(); ++j) {
    const double a = profile.kappa[j] - level;
    const double b = profile.kappa[j + 1] - level;
    if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) {
      const double t = a / (a - b);
      jumps.push_back(profile.arclength(j) + t * profile.spacing);
    }
  }
  return jumps;
}

std::vector<double> normal_reversals(const DiscreteCurve& curve, double K) {
  std::vector<double> out;
  if (!(K > 0.0)) return out;
  const Manifold& model = curve.model();
  const VectorFieldAlongCurve a = curvature_vector(curve);
  const double level = 0.5 * K;
  for (int i = 1; i + 1 < curve.segments(); ++i) {
    const VecX x = curve.node(i);
    const VecX ai = a.at(i);
    const VecX aj = a.at(i + 1);
    if (norm<double>(model, x, ai) < level || norm<double>(model, curve.node(i + 1), aj) < level) continue;
    if (inner<double>(model, x, ai, aj) < 0.0) out.push_back((i + 0.5) * curve.spacing());
  }
  return out;
}

std::vector<double> singular_locations(const DiscreteCurve& curve, double K) {
  std::vector<double> out = curvature_jumps(curvature_profile(curve), K);
  const std::vector<double> flips = normal_reversals(curve, K);
  out.insert(out.end(), flips.begin(), flips.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> residual_mask(const DiscreteCurve& curve, const std::vector<double>& jumps,
                                const VerifyOptions& options) {
  const int n = curve.segments();
  const double h = curve.spacing();
  const double L = curve.target_length();
  std::vector<bool> mask(curve.size(), false);
  for (int i = 1; i < n; ++i) {
    const double s = i * h;
    if (s < options.boundary_layer * L || s > (1.0 - options.boundary_layer) * L) continue;
    bool near_jump = false;
    for (double jump : jumps) near_jump = near_jump || std::abs(s - jump) <= options.jump_mask * h;
    mask[i] = !near_jump;
  }
  return mask;
}

double fit_lambda(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, const std::vector<bool>& mask) {
  const El1Terms terms = el1_terms(curve, phi);
  const Manifold& model = curve.model();
  const double L = curve.target_length();
  double ab = 0.0;
  double bb = 0.0;
  for (int i = 0; i < curve.size(); ++i) {
    if (!mask[i]) continue;
    const VecX x = curve.node(i);
    const VecX a = terms.second_derivative.at(i) + terms.curvature_term.at(i) + terms.coupling_term.at(i);
    const VecX b = L * terms.acceleration.at(i);
    ab += inner<double>(model, x, a, b);
    bb += inner<double>(model, x, b, b);
  }
  if (bb < 1e-12) throw Error(ErrorCode::GeodesicDegenerate, "no curvature on the fitting nodes; lambda undefined");
  return ab / bb;
}

El1Result el1_residual(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, double lambda, double K,
                       const VerifyOptions& options) {
  check_field(curve, phi);
  const Manifold& model = curve.model();
  const double L = curve.target_length();
  const El1Terms terms = el1_terms(curve, phi);
  El1Result out;
  out.jump_locations = singular_locations(curve, K);
  out.mask = residual_mask(curve, out.jump_locations, options);
  out.residual = VectorFieldAlongCurve::zeros(curve);
  double worst = 0.0;
  double second_max = 0.0;
  for (int i = 0; i < curve.size(); ++i) {
    if (!out.mask[i]) continue;
    const VecX x = curve.node(i);
    const VecX r = terms.second_derivative.at(i) + terms.curvature_term.at(i) - L * lambda * terms.acceleration.at(i) +
                   terms.coupling_term.at(i);
    out.residual.values.row(i) = r.transpose();
    worst = std::max(worst, norm<double>(model, x, r));
    second_max = std::max(second_max, norm<double>(model, x, terms.second_derivative.at(i)));
  }
  const double scale = std::max({std::abs(L * lambda) * K, second_max, 1e-12});
  out.rel_norm = worst / scale;
  return out;
}

double el2_residual(const DiscreteCurve& curve, const VectorFieldAlongCurve& phi, double K) {
  check_field(curve, phi);
  const Manifold& model = curve.model();
  const VectorFieldAlongCurve a = curvature_vector(curve);
  double phi_max = 0.0;
  for (int i = 1; i < curve.segments(); ++i) phi_max = std::max(phi_max, norm<double>(model, curve.node(i), phi.at(i)));
  if (phi_max == 0.0) return 0.0;
  if (!(K > 1e-12)) throw Error(ErrorCode::GeodesicDegenerate, "K vanishes while phi does not");
  double worst = 0.0;
  for (int i = 1; i < curve.segments(); ++i) {
    const VecX x = curve.node(i);
    const VecX f = phi.at(i);
    const VecX r = norm<double>(model, x, f) * a.at(i) - K * f;
    worst = std::max(worst, norm<double>(model, x, r));
  }
  return worst / (K * phi_max);
}

Classification classify_two_value(const CurvatureProfile& profile, double K, double eps_rel, double mask_halfwidth) {
  if (!(K > 0.0)) throw Error(ErrorCode::InvalidArgument, "classification needs K > 0");
  if (!(eps_rel > 0.0 && eps_rel < 0.5)) throw Error(ErrorCode::InvalidArgument, "eps_rel must lie in (0, 0.5)");
  Classification out;
  out.jump_locations = curvature_jumps(profile, K);
  int zero = 0;
  int plateau = 0;
  int other = 0;
  for (int j = 0; j < profile.size(); ++j) {
    const double s = profile.arclength(j);
    bool masked = false;
    for (double jump : out.jump_locations) masked = masked || std::abs(s - jump) <= mask_halfwidth * profile.spacing;
    if (masked) continue;
    const double kappa = profile.kappa[j];
    if (kappa <= eps_rel * K) {
      ++zero;
    } else if (std::abs(kappa - K) <= eps_rel * K) {
      ++plateau;
    } else {
      ++other;
    }
  }
  out.counted = zero + plateau + other;
  if (out.counted == 0) {
    out.fractions = {0.0, 0.0, 1.0};
    return out;
  }
  const double total = out.counted;
  out.fractions.near_zero = zero / total;
  out.fractions.near_K = plateau / total;
  out.fractions.other = 1.0 - out.fractions.near_zero - out.fractions.near_K;
  return out;
}

VerificationReport verify_curve(const DiscreteCurve& curve, double p, std::optional<double> lambda,
                                const VerifyOptions& options) {
  const double kp = kp_energy(curve, p);
  const VectorFieldAlongCurve phi = phi_normalized(curve, p, kp);
  const CurvatureProfile profile = curvature_profile(curve);
  VerificationReport report;
  report.K_used = kinf_energy(profile);
  report.boundary_layer = options.boundary_layer;
  const std::vector<double> jumps = singular_locations(curve, report.K_used);
  report.lambda_used = lambda ? *lambda : fit_lambda(curve, phi, residual_mask(curve, jumps, options));
  const El1Result el1 = el1_residual(curve, phi, report.lambda_used, report.K_used, options);
  report.el1_residual_rel = el1.rel_norm;
  report.el2_residual_rel = el2_residual(curve, phi, report.K_used);
  const Classification cls = classify_two_value(profile, report.K_used, options.eps_rel, options.jump_mask);
  report.fractions = cls.fractions;
  report.jump_locations = cls.jump_locations;
  return report;
}

std::vector<std::pair<double, double>> lambda_sweep(const DiscreteCurve& curve, double p,
                                                    const std::vector<double>& lambdas,
                                                    const VerifyOptions& options) {
  const double kp = kp_energy(curve, p);
  const VectorFieldAlongCurve phi = phi_normalized(curve, p, kp);
  const double K = kinf_energy(curve);
  std::vector<std::pair<double, double>> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) out.emplace_back(lambda, el1_residual(curve, phi, lambda, K, options).rel_norm);
  return out;
}

}  // namespace elastica
