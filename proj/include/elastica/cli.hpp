#pragma once

// Command-line pipelines. Exit codes: 0 success, 2 partial or failed check,
// 1 error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace elastica {

struct VerifyArgs {
  std::filesystem::path curve_path;
  double p = 64.0;
  std::optional<double> lambda;
  std::string model_id = "euclidean";
  std::optional<std::filesystem::path> scenario_path;
};

int cmd_solve(const std::filesystem::path& scenario_path, const std::optional<std::filesystem::path>& out_root,
              std::ostream& log, std::ostream& err);

/// Runs the scenarios on up to `jobs` threads; returns the worst exit code.
int cmd_solve_all(const std::vector<std::filesystem::path>& scenarios,
                  const std::optional<std::filesystem::path>& out_root, int jobs, std::ostream& log,
                  std::ostream& err);

int cmd_verify(const VerifyArgs& args, const std::optional<std::filesystem::path>& out_dir, std::ostream& log,
               std::ostream& err);

int cmd_oracle(const std::filesystem::path& scenario_path, const std::optional<std::filesystem::path>& out_root,
               std::ostream& log, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace elastica
