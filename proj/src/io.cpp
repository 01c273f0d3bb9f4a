#include "elastica/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace elastica {

namespace {

using nlohmann::json;

VecX vector_field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("bc.") + key + " missing");
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.empty()) throw Error(ErrorCode::ParseError, std::string("bc.") + key + " must be an array");
  VecX v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fractions_json(const TwoValueFractions& f) {
  return {{"near_zero", f.near_zero}, {"near_K", f.near_K}, {"other", f.other}};
}

json verification_object(const VerificationReport& r) {
  return {{"el1_residual_rel", number(r.el1_residual_rel)},
          {"el2_residual_rel", number(r.el2_residual_rel)},
          {"lambda_used", number(r.lambda_used)},
          {"K_used", number(r.K_used)},
          {"fractions", fractions_json(r.fractions)},
          {"boundary_layer", r.boundary_layer},
          {"jump_locations", r.jump_locations}};
}

std::string dump(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("schema", 0) != 1) throw Error(ErrorCode::ParseError, "scenario schema must be 1");
    Scenario s;
    s.name = j.at("name").get<std::string>();
    const int dim = j.value("dimension", 2);
    s.model = Manifold::from_id(j.at("model").get<std::string>(), dim);
    const json& bc = j.at("bc");
    s.bc.x1 = vector_field(bc, "x1");
    s.bc.x2 = vector_field(bc, "x2");
    s.bc.v1 = vector_field(bc, "v1");
    s.bc.v2 = vector_field(bc, "v2");
    s.bc.L = bc.at("L").get<double>();
    s.N = j.value("N", 400);
    if (s.N < DiscreteCurve::kMinSegments) throw Error(ErrorCode::CurveTooCoarse, "N below the minimum segment count");
    if (j.contains("p_schedule")) s.p_schedule = j.at("p_schedule").get<std::vector<double>>();
    if (j.contains("sigma")) {
      const json& sigma = j.at("sigma");
      if (sigma.is_string()) {
        if (sigma.get<std::string>() != "auto") throw Error(ErrorCode::ParseError, "sigma must be a number or \"auto\"");
        s.sigma.reset();
      } else {
        s.sigma = sigma.get<double>();
      }
    }
    if (j.contains("reference_path") && !j.at("reference_path").is_null()) {
      std::filesystem::path ref = j.at("reference_path").get<std::string>();
      s.reference_path = ref.is_absolute() ? ref : base_dir / ref;
    }
    s.seed = j.value("seed", std::uint64_t{0});
    s.output_dir = j.value("output_dir", std::string("out/") + s.name);
    if (j.contains("solver")) {
      const json& c = j.at("solver");
      s.solver.max_iters = c.value("max_iters", s.solver.max_iters);
      s.solver.grad_tol = c.value("grad_tol", s.solver.grad_tol);
      s.solver.step_init = c.value("step_init", s.solver.step_init);
      s.solver.armijo_c = c.value("armijo_c", s.solver.armijo_c);
      s.solver.backtrack = c.value("backtrack", s.solver.backtrack);
      s.solver.reparam_every = c.value("reparam_every", s.solver.reparam_every);
      s.solver.stall_window = c.value("stall_window", s.solver.stall_window);
    }
    s.solver.seed = s.seed;
    if (j.contains("thresholds")) {
      s.thresholds.el1 = j.at("thresholds").value("el1", s.thresholds.el1);
      s.thresholds.el2 = j.at("thresholds").value("el2", s.thresholds.el2);
    }
    s.solver.validate();
    s.bc.validate(s.model);
    if (s.sigma && *s.sigma > 0.0 && !s.reference_path) {
      throw Error(ErrorCode::MissingReference, "sigma > 0 requires reference_path");
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scenario field error: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open scenario " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.parent_path());
}

std::string curve_csv(const DiscreteCurve& curve) {
  const CurvatureProfile profile = curvature_profile(curve);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "index,s";
  for (int k = 0; k < curve.dimension(); ++k) out << ",x_" << k;
  out << ",kappa\n";
  for (int i = 0; i <= curve.segments(); ++i) {
    out << i << ',' << i * curve.spacing();
    for (int k = 0; k < curve.dimension(); ++k) out << ',' << curve.nodes()(i, k);
    out << ',';
    if (i > 0 && i < curve.segments()) out << profile.kappa[i - 1];
    out << '\n';
  }
  return out.str();
}

void write_curve_csv(const std::filesystem::path& path, const DiscreteCurve& curve) {
  write_text(path, curve_csv(curve));
}

DiscreteCurve parse_curve_csv(const std::string& text, const std::string& model_id) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "curve CSV is empty");
  std::vector<std::string> header;
  {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      header.push_back(cell);
    }
  }
  std::map<std::string, int> column;
  for (std::size_t c = 0; c < header.size(); ++c) column[header[c]] = static_cast<int>(c);
  for (const char* required : {"index", "s", "x_0", "kappa"}) {
    if (!column.count(required)) throw Error(ErrorCode::ParseError, std::string("curve CSV missing column ") + required);
  }
  int dim = 0;
  while (column.count("x_" + std::to_string(dim))) ++dim;

  std::vector<std::vector<double>> rows;
  std::vector<double> s_values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() < header.size() - 1) {
      throw Error(ErrorCode::ParseError, "curve CSV line " + std::to_string(line_no) + " has too few cells");
    }
    auto parse = [&](int c, const std::string& name) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells.at(static_cast<std::size_t>(c)), &used);
        return v;
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "curve CSV line " + std::to_string(line_no) + ": bad value in column " + name);
      }
    };
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) x[static_cast<std::size_t>(k)] = parse(column["x_" + std::to_string(k)], "x_" + std::to_string(k));
    s_values.push_back(parse(column["s"], "s"));
    rows.push_back(std::move(x));
  }
  if (rows.size() < 2) throw Error(ErrorCode::ParseError, "curve CSV has fewer than two rows");
  NodeMatrix nodes(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < dim; ++k) nodes(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  }
  return {Manifold::from_id(model_id, dim), std::move(nodes), s_values.back()};
}

DiscreteCurve read_curve_csv(const std::filesystem::path& path, const std::string& model_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open curve " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_curve_csv(buffer.str(), model_id);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<ContinuationRecord>& records) {
  std::ostringstream out;
  out << "p,K_p,lambda_p,penalty,iters,converged\n";
  for (const auto& r : records) {
    out << format_double(r.p) << ',' << format_double(r.K_p) << ',' << format_double(r.lambda_p) << ','
        << format_double(r.penalty) << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
  }
  write_text(path, out.str());
}

std::string verification_json(const VerificationReport& report) { return dump(verification_object(report)); }

std::string oracle_json(const ArcChainSolution& chain) {
  json pieces = json::array();
  for (const auto& piece : chain.pieces) {
    pieces.push_back({{"type", piece.type == PieceType::Arc ? "arc" : "segment"},
                      {"signed_curvature", piece.signed_curvature},
                      {"length", piece.length}});
  }
  return dump({{"pieces", pieces}, {"K_max", chain.K_max}, {"word", chain.word}});
}

std::string report_json(const Scenario& scenario, const ContinuationReport& report,
                        const std::optional<VerificationReport>& verification) {
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {{"p", r.p},
                {"K_p", number(r.K_p)},
                {"lambda_p", number(r.lambda_p)},
                {"penalty_value", number(r.penalty)},
                {"iterations", r.iterations},
                {"converged", r.converged}};
    if (std::isfinite(r.reference_distance)) rec["reference_distance"] = r.reference_distance;
    records.push_back(rec);
  }
  json j = {{"scenario", scenario.name},
            {"model", scenario.model.id()},
            {"dimension", scenario.model.dimension()},
            {"N", scenario.N},
            {"records", records},
            {"K_estimate", number(report.K_estimate)},
            {"K_extrapolated", number(report.K_extrapolated)},
            {"K_inf_final", number(report.K_inf_final)},
            {"extrapolation_used", report.extrapolation_used},
            {"monotone_ok", report.monotone_ok},
            {"partial", report.partial},
            {"geodesic", report.geodesic},
            {"sigma", report.sigma},
            {"sigma_heuristic", !scenario.sigma.has_value()},
            {"verified", verification.has_value()}};
  if (!report.error.empty()) j["error"] = report.error;
  if (report.tracking_ok) j["tracking_ok"] = *report.tracking_ok;
  if (verification) j.update(verification_object(*verification));
  return dump(j);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

}  // namespace elastica
