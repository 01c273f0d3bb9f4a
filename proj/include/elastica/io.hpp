#pragma once

// Scenario files, curve and record CSV, and report JSON.

#include "elastica/continuation.hpp"
#include "elastica/verifier.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace elastica {

struct Thresholds {
  double el1 = 5e-2;
  double el2 = 1e-2;
};

struct Scenario {
  std::string name;
  Manifold model{ModelKind::Euclidean, 2};
  BoundaryConditions bc;
  int N = 400;
  std::vector<double> p_schedule = kDefaultSchedule;
  /// Empty means the heuristic default (only meaningful with a reference).
  std::optional<double> sigma = 0.0;
  std::optional<std::filesystem::path> reference_path;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  SolverConfig solver;
  Thresholds thresholds;
};

/// Parses and validates; reference_path is resolved against the file's
/// directory. Throws ParseError or the boundary validation error.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});

void write_curve_csv(const std::filesystem::path& path, const DiscreteCurve& curve);
std::string curve_csv(const DiscreteCurve& curve);

/// The dimension comes from the x_k columns and must match `model` when
/// given; L is the s value of the last row. Throws ParseError naming the
/// missing column.
DiscreteCurve read_curve_csv(const std::filesystem::path& path, const std::string& model_id = "euclidean");
DiscreteCurve parse_curve_csv(const std::string& text, const std::string& model_id = "euclidean");

void write_records_csv(const std::filesystem::path& path, const std::vector<ContinuationRecord>& records);

std::string verification_json(const VerificationReport& report);
std::string oracle_json(const ArcChainSolution& chain);
/// Continuation report with the verification fields merged at top level.
std::string report_json(const Scenario& scenario, const ContinuationReport& report,
                        const std::optional<VerificationReport>& verification);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace elastica
