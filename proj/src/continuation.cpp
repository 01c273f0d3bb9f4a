#include "elastica/continuation.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace elastica {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

void check_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty p schedule");
  if (!(schedule.front() >= 2.0)) throw Error(ErrorCode::InvalidArgument, "p schedule must start at p >= 2");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] > schedule[i - 1])) throw Error(ErrorCode::InvalidArgument, "p schedule must increase strictly");
  }
}

// Smooth random bump on the free nodes for seeded multi-starts.
DiscreteCurve perturb(const DiscreteCurve& curve, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int n = curve.segments();
  const double L = curve.target_length();
  NodeMatrix x = curve.nodes();
  for (int k = 0; k < curve.dimension(); ++k) {
    const double amp = 1e-3 * L * normal(rng);
    const int mode = 1 + static_cast<int>(rng() % 3);
    for (int i = 2; i <= n - 2; ++i) {
      const double s = static_cast<double>(i) / n;
      x(i, k) += amp * std::pow(std::sin(kPi * s), 2) * std::sin(mode * kPi * s);
    }
  }
  return project_arclength(curve.with_nodes(std::move(x)));
}

ContinuationReport continue_from(DiscreteCurve current, const BoundaryConditions& bc, const PenaltySpec& spec,
                                 const SolverConfig& config, const std::vector<double>& schedule,
                                 const RecordCallback& on_record, const DiscreteCurve* reference) {
  ContinuationReport report;
  report.sigma = spec.sigma;
  for (double p : schedule) {
    try {
      PSolveResult result = solve_p(current, bc, p, spec, config);
      ContinuationRecord record{p,
                                result.K_p,
                                result.lambda_p,
                                result.penalty_value,
                                result.iterations,
                                result.converged,
                                reference ? max_node_distance(result.curve, *reference) : kNaN};
      report.records.push_back(record);
      if (on_record) on_record(record);
      current = result.curve;
      report.final_result = std::move(result);
    } catch (const Error& e) {
      report.partial = true;
      report.error = e.what();
      break;
    }
  }
  report.monotone_ok = monotone(report.records);
  if (report.final_result) {
    const double last = report.records.back().K_p;
    report.K_inf_final = kinf_energy(report.final_result->curve);
    const auto fit = extrapolate_limit(report.records);
    report.K_extrapolated = fit ? *fit : kNaN;
    report.extrapolation_used = fit.has_value();
    report.K_estimate = std::max(fit ? *fit : report.K_inf_final, last);
    report.geodesic = report.final_result->geodesic;
  }
  if (reference && report.records.size() >= 3) {
    const auto& r = report.records;
    const std::size_t k = r.size();
    report.tracking_ok = r[k - 2].reference_distance <= r[k - 3].reference_distance + 1e-12 &&
                         r[k - 1].reference_distance <= r[k - 2].reference_distance + 1e-12;
  } else if (reference) {
    report.tracking_ok = false;
  }
  return report;
}

}  // namespace

bool monotone(const std::vector<ContinuationRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i - 1].K_p > records[i].K_p + 1e-8) return false;
  }
  return true;
}

std::optional<double> extrapolate_limit(const std::vector<ContinuationRecord>& records) {
  if (records.size() < 3) return std::nullopt;
  Eigen::Matrix<double, 3, 2> design;
  Eigen::Vector3d values;
  for (int i = 0; i < 3; ++i) {
    const auto& r = records[records.size() - 3 + i];
    design(i, 0) = 1.0;
    design(i, 1) = 1.0 / r.p;
    values[i] = r.K_p;
  }
  const double spread = values.maxCoeff() - values.minCoeff();
  if (spread <= 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff())) return values[2];
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(values);
  const double residual = (design * coef - values).norm();
  if (residual > 0.1 * spread || coef[1] > 0.0) return std::nullopt;
  return coef[0];
}

double default_sigma(double K_estimate, double L) { return 10.0 * K_estimate * K_estimate * L; }

double max_node_distance(const DiscreteCurve& curve, const DiscreteCurve& reference) {
  double worst = 0.0;
  if (curve.size() == reference.size()) {
    for (int i = 0; i < curve.size(); ++i) {
      worst = std::max(worst, distance(curve.model(), curve.node(i), reference.node(i)));
    }
    return worst;
  }
  for (int i = 0; i < curve.size(); ++i) worst = std::max(worst, nearest_point(reference, curve.node(i)).distance);
  return worst;
}

ContinuationReport run_schedule_from(const DiscreteCurve& seed, const BoundaryConditions& bc,
                                     const PenaltySpec& spec, const SolverConfig& config,
                                     const std::vector<double>& p_schedule, const RecordCallback& on_record) {
  check_schedule(p_schedule);
  config.validate();
  spec.validate();
  bc.validate(seed.model());
  return continue_from(seed, bc, spec, config, p_schedule, on_record, nullptr);
}

ContinuationReport run_schedule(const BoundaryConditions& bc, const Manifold& model, int N, const PenaltySpec& spec,
                                const SolverConfig& config, const std::vector<double>& p_schedule,
                                const RecordCallback& on_record) {
  check_schedule(p_schedule);
  config.validate();
  spec.validate();
  DiscreteCurve seed = initial_curve(bc, model, N);
  if (config.seed != 0) seed = perturb(seed, config.seed);
  return continue_from(seed, bc, spec, config, p_schedule, on_record, spec.reference ? &*spec.reference : nullptr);
}

ContinuationReport track_reference(const BoundaryConditions& bc, const Manifold& model,
                                   const DiscreteCurve& reference, double sigma, const SolverConfig& config,
                                   const std::vector<double>& p_schedule, const RecordCallback& on_record) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::MissingReference, "tracking needs sigma > 0 with a reference");
  if (!(reference.model() == model)) throw Error(ErrorCode::InvalidArgument, "reference lives on another model");
  PenaltySpec spec;
  spec.sigma = sigma;
  spec.reference = reference;
  spec.window_halfwidth = default_window_halfwidth(kinf_energy(reference), bc.L);
  check_schedule(p_schedule);
  config.validate();
  DiscreteCurve seed = initial_curve(bc, model, reference.segments());
  if (config.seed != 0) seed = perturb(seed, config.seed);
  return continue_from(seed, bc, spec, config, p_schedule, on_record, &reference);
}

}  // namespace elastica
