#include "elastica/cli.hpp"

#include "elastica/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace elastica {

namespace {

std::filesystem::path output_dir(const Scenario& scenario, const std::optional<std::filesystem::path>& out_root) {
  return out_root ? *out_root / scenario.name : scenario.output_dir;
}

std::string progress_line(const std::string& name, const ContinuationRecord& r) {
  std::ostringstream line;
  line << std::setprecision(10) << '[' << name << "] p=" << r.p << " K_p=" << r.K_p << " lambda_p=" << r.lambda_p
       << " penalty=" << r.penalty << " iters=" << r.iterations << " converged=" << (r.converged ? "yes" : "no");
  return line.str();
}

}  // namespace

int cmd_solve(const std::filesystem::path& scenario_path, const std::optional<std::filesystem::path>& out_root,
              std::ostream& log, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(scenario_path);
    const auto dir = output_dir(scenario, out_root);
    const RecordCallback on_record = [&](const ContinuationRecord& r) { log << progress_line(scenario.name, r) << '\n'; };

    ContinuationReport report;
    if (scenario.reference_path && (!scenario.sigma || *scenario.sigma > 0.0)) {
      const DiscreteCurve reference = read_curve_csv(*scenario.reference_path, scenario.model.id());
      if (reference.dimension() != scenario.model.dimension()) {
        throw Error(ErrorCode::InvalidArgument, "reference dimension does not match the scenario");
      }
      const double sigma = scenario.sigma ? *scenario.sigma : default_sigma(kinf_energy(reference), scenario.bc.L);
      report = track_reference(scenario.bc, scenario.model, reference, sigma, scenario.solver, scenario.p_schedule,
                               on_record);
    } else {
      report = run_schedule(scenario.bc, scenario.model, scenario.N, PenaltySpec{}, scenario.solver,
                            scenario.p_schedule, on_record);
    }
    if (!report.final_result) throw Error(ErrorCode::InvalidArgument, "no p solved: " + report.error);

    std::optional<VerificationReport> verification;
    if (!report.geodesic) {
      try {
        verification = verify_curve(report.final_result->curve, report.records.back().p);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::GeodesicDegenerate) throw;
      }
    }
    write_records_csv(dir / "records.csv", report.records);
    write_curve_csv(dir / "curve_final.csv", report.final_result->curve);
    write_text(dir / "report.json", report_json(scenario, report, verification));
    log << '[' << scenario.name << "] K_estimate=" << std::setprecision(10) << report.K_estimate
        << " monotone_ok=" << (report.monotone_ok ? "yes" : "no") << " -> " << dir.string() << '\n';
    if (report.partial) {
      err << scenario.name << ": schedule stopped early: " << report.error << '\n';
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << scenario_path.string() << ": " << e.what() << '\n';
    return 1;
  }
}

int cmd_solve_all(const std::vector<std::filesystem::path>& scenarios,
                  const std::optional<std::filesystem::path>& out_root, int jobs, std::ostream& log,
                  std::ostream& err) {
  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  std::vector<int> codes(scenarios.size(), 0);
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      std::ostringstream local_log;
      std::ostringstream local_err;
      codes[i] = cmd_solve(scenarios[i], out_root, local_log, local_err);
      std::lock_guard<std::mutex> lock(io_mutex);
      log << local_log.str();
      err << local_err.str();
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, scenarios.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) codes[i] = cmd_solve(scenarios[i], out_root, log, err);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int worst = 0;
  for (int code : codes) {
    if (code == 1 || (code == 2 && worst == 0)) worst = code;
  }
  return worst;
}

int cmd_verify(const VerifyArgs& args, const std::optional<std::filesystem::path>& out_dir, std::ostream& log,
               std::ostream& err) {
  try {
    Thresholds thresholds;
    std::string model_id = args.model_id;
    if (args.scenario_path) {
      const Scenario scenario = load_scenario(*args.scenario_path);
      thresholds = scenario.thresholds;
      model_id = scenario.model.id();
    }
    const DiscreteCurve curve = read_curve_csv(args.curve_path, model_id);
    const VerificationReport report = verify_curve(curve, args.p, args.lambda);
    const auto dir = out_dir ? *out_dir : args.curve_path.parent_path();
    write_text(dir / "verify.json", verification_json(report));
    const bool ok = report.el1_residual_rel <= thresholds.el1 && report.el2_residual_rel <= thresholds.el2;
    log << std::setprecision(6) << "el1_residual_rel=" << report.el1_residual_rel
        << " el2_residual_rel=" << report.el2_residual_rel << " K_used=" << report.K_used
        << " lambda_used=" << report.lambda_used << (ok ? " PASS" : " FAIL") << '\n';
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    err << args.curve_path.string() << ": " << e.what() << '\n';
    return 1;
  }
}

int cmd_oracle(const std::filesystem::path& scenario_path, const std::optional<std::filesystem::path>& out_root,
               std::ostream& log, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(scenario_path);
    if (scenario.model.kind() != ModelKind::Euclidean || scenario.model.dimension() != 2) {
      throw Error(ErrorCode::InvalidArgument, "oracle requires euclidean n=2");
    }
    const ArcChainSolution chain = arc_chain_oracle(scenario.bc);
    const auto dir = output_dir(scenario, out_root);
    write_text(dir / "oracle.json", oracle_json(chain));
    write_curve_csv(dir / "oracle_curve.csv", sample_arc_chain(chain, scenario.bc, scenario.N));
    log << '[' << scenario.name << "] word=" << chain.word << " K_max=" << std::setprecision(15) << chain.K_max
        << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << scenario_path.string() << ": " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Minimal-maximal-curvature curves by L^p continuation"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  std::string out;
  app.add_option("--jobs", jobs, "Scenarios solved concurrently")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output root directory");

  std::vector<std::string> solve_files;
  auto* solve = app.add_subcommand("solve", "Run the p-schedule for scenario files");
  solve->add_option("scenarios", solve_files, "Scenario JSON files")->required()->check(CLI::ExistingFile);

  VerifyArgs verify_args;
  std::string verify_curve_path;
  std::string verify_scenario;
  auto* verify = app.add_subcommand("verify", "Check the limiting equations on a curve CSV");
  verify->add_option("curve", verify_curve_path, "Curve CSV")->required()->check(CLI::ExistingFile);
  verify->add_option("--p", verify_args.p, "Exponent for phi")->required();
  verify->add_option("--lambda", verify_args.lambda, "Length multiplier (default: least-squares fit)");
  verify->add_option("--model", verify_args.model_id, "euclidean, sphere or hyperbolic");
  verify->add_option("--scenario", verify_scenario, "Scenario supplying model and thresholds")
      ->check(CLI::ExistingFile);

  std::string oracle_file;
  auto* oracle = app.add_subcommand("oracle", "Planar arc-chain ground truth");
  oracle->add_option("scenario", oracle_file, "Scenario JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::optional<std::filesystem::path> out_root =
      out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out);

  if (*solve) {
    return cmd_solve_all({solve_files.begin(), solve_files.end()}, out_root, jobs, std::cout, std::cerr);
  }
  if (*verify) {
    verify_args.curve_path = verify_curve_path;
    if (!verify_scenario.empty()) verify_args.scenario_path = verify_scenario;
    return cmd_verify(verify_args, out_root, std::cout, std::cerr);
  }
  return cmd_oracle(oracle_file, out_root, std::cout, std::cerr);
}

}  // namespace elastica
