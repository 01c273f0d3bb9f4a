#pragma once

// p-continuation with warm starts and the limit estimate K = lim K_p.

#include "elastica/optimizer.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace elastica {

struct ContinuationRecord {
  double p = 0.0;
  double K_p = 0.0;
  double lambda_p = 0.0;
  double penalty = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Max node distance to the tracked reference; NaN without one.
  double reference_distance = 0.0;
};

struct ContinuationReport {
  std::vector<ContinuationRecord> records;
  double K_estimate = 0.0;
  double K_extrapolated = 0.0;  // NaN when the tail fit was rejected
  double K_inf_final = 0.0;
  bool extrapolation_used = false;
  bool monotone_ok = true;
  bool partial = false;
  bool geodesic = false;
  std::string error;
  std::optional<PSolveResult> final_result;
  /// Set by track_reference only.
  std::optional<bool> tracking_ok;
  double sigma = 0.0;
};

using RecordCallback = std::function<void(const ContinuationRecord&)>;

inline const std::vector<double> kDefaultSchedule{2, 4, 8, 16, 32, 64};

/// K_i <= K_{i+1} + 1e-8 for consecutive records.
bool monotone(const std::vector<ContinuationRecord>& records);

/// Fit K_p = K (1 - a/p) to the last three records. Empty when fewer than
/// three records exist or the relative residual exceeds 10% of the spread.
std::optional<double> extrapolate_limit(const std::vector<ContinuationRecord>& records);

ContinuationReport run_schedule(const BoundaryConditions& bc, const Manifold& model, int N, const PenaltySpec& spec,
                                const SolverConfig& config, const std::vector<double>& p_schedule = kDefaultSchedule,
                                const RecordCallback& on_record = {});

/// Same, warm-starting the first p from the given curve.
ContinuationReport run_schedule_from(const DiscreteCurve& seed, const BoundaryConditions& bc,
                                     const PenaltySpec& spec, const SolverConfig& config,
                                     const std::vector<double>& p_schedule, const RecordCallback& on_record = {});

/// 10 K^2 L; heuristic, no effective constant is known.
double default_sigma(double K_estimate, double L);

/// Penalized continuation towards the reference; records the max node
/// distance per p and whether it is non-increasing over the last three.
ContinuationReport track_reference(const BoundaryConditions& bc, const Manifold& model,
                                   const DiscreteCurve& reference, double sigma, const SolverConfig& config,
                                   const std::vector<double>& p_schedule = kDefaultSchedule,
                                   const RecordCallback& on_record = {});

/// Largest distance between corresponding nodes (equal N), otherwise the
/// largest distance from a node to the reference polyline.
double max_node_distance(const DiscreteCurve& curve, const DiscreteCurve& reference);

}  // namespace elastica
