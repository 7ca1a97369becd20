#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "exmerit/certify.hpp"
#include "exmerit/problems.hpp"
#include "exmerit/solver.hpp"

namespace exmerit {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Problem-parameter files: {"name": str, "params": {...}, "alpha": real,
// "kappa": real}. The alpha/kappa keys are shorthands merged into params.
// ---------------------------------------------------------------------------

inline AnyProblem load_problem_json(const Json& doc) {
  if (!doc.contains("name") || !doc["name"].is_string()) {
    throw std::invalid_argument("problem file: missing string field 'name'");
  }
  Params params;
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) {
      throw std::invalid_argument("problem file: 'params' must be an object");
    }
    for (const auto& [key, value] : doc["params"].items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("problem file: parameter '" + key +
                                    "' must be a number");
      }
      params[key] = value.get<double>();
    }
  }
  if (doc.contains("alpha")) params["alpha"] = doc["alpha"].get<double>();
  if (doc.contains("kappa")) params["kappa"] = doc["kappa"].get<double>();
  return registry_get(doc["name"].get<std::string>(), params);
}

inline AnyProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("problem file: cannot open '" + path + "'");
  }
  Json doc;
  in >> doc;
  return load_problem_json(doc);
}

// ---------------------------------------------------------------------------
// Report serialization. Non-finite doubles (vacuous sentinels) are omitted on
// emit and restored as +infinity on parse, keeping the emitted text valid
// JSON and the round trip exact.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_finite(Json& j, const char* key, double v) {
  if (std::isfinite(v)) j[key] = v;
}

inline double get_or_infinity(const Json& j, const char* key) {
  return j.contains(key) ? j[key].get<double>()
                         : std::numeric_limits<double>::infinity();
}

inline Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const Json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const Json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c =
      r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                    .get<double>();
    }
  }
  return m;
}

}  // namespace detail

inline Json to_json(const CertificationReport& report) {
  Json j;
  j["problem"] = report.problem;

  j["eta"] = report.kkt.eta;
  j["stationarity"] = report.kkt.stationarity;
  j["complementarity"] = report.kkt.complementarity;
  j["feas_G"] = report.kkt.feas_sdp;
  j["feas_h"] = report.kkt.feas_eq;
  j["lambda_min_eig"] = report.kkt.lambda_min_eig;
  j["lambda_psd"] = report.kkt.lambda_psd;
  j["kkt_tol"] = report.kkt.tol;

  j["nondegenerate"] = report.nondegeneracy.nondegenerate;
  j["constraint_rank"] = report.nondegeneracy.constraint_rank;
  j["vectors_required"] = report.nondegeneracy.vectors_required;
  j["count_exceeds_dim"] = report.nondegeneracy.count_exceeds_dim;
  detail::put_finite(j, "sigma_min", report.nondegeneracy.sigma_min);
  j["singular_values"] =
      detail::vector_to_json(report.nondegeneracy.singular_values);
  j["rank_tol"] = report.nondegeneracy.rank_tol;

  j["sosc_verdict"] = sosc_verdict_name(report.sosc.verdict);
  j["sosc_method"] = report.sosc.method;
  detail::put_finite(j, "sosc_min_curvature", report.sosc.min_curvature);
  j["sosc_directions_tested"] = report.sosc.directions_tested;
  j["sosc_equality_null_dim"] = report.sosc.equality_null_dim;
  j["sosc_theta"] = detail::matrix_to_json(report.sosc.theta);
  j["sosc_tol"] = report.sosc.tol;

  j["notes"] = report.notes;
  return j;
}

inline CertificationReport certification_from_json(const Json& j) {
  CertificationReport report;
  report.problem = j["problem"].get<std::string>();

  report.kkt.eta = j["eta"].get<double>();
  report.kkt.stationarity = j["stationarity"].get<double>();
  report.kkt.complementarity = j["complementarity"].get<double>();
  report.kkt.feas_sdp = j["feas_G"].get<double>();
  report.kkt.feas_eq = j["feas_h"].get<double>();
  report.kkt.lambda_min_eig = j["lambda_min_eig"].get<double>();
  report.kkt.lambda_psd = j["lambda_psd"].get<bool>();
  report.kkt.tol = j["kkt_tol"].get<double>();

  report.nondegeneracy.nondegenerate = j["nondegenerate"].get<bool>();
  report.nondegeneracy.constraint_rank = j["constraint_rank"].get<Eigen::Index>();
  report.nondegeneracy.vectors_required =
      j["vectors_required"].get<Eigen::Index>();
  report.nondegeneracy.count_exceeds_dim = j["count_exceeds_dim"].get<bool>();
  report.nondegeneracy.sigma_min = detail::get_or_infinity(j, "sigma_min");
  report.nondegeneracy.singular_values =
      detail::vector_from_json(j["singular_values"]);
  report.nondegeneracy.rank_tol = j["rank_tol"].get<double>();

  const std::string verdict = j["sosc_verdict"].get<std::string>();
  if (verdict == "pass") {
    report.sosc.verdict = SoscVerdict::pass;
  } else if (verdict == "pass-vacuous") {
    report.sosc.verdict = SoscVerdict::pass_vacuous;
  } else {
    report.sosc.verdict = SoscVerdict::fail;
  }
  report.sosc.method = j["sosc_method"].get<std::string>();
  report.sosc.min_curvature = detail::get_or_infinity(j, "sosc_min_curvature");
  report.sosc.directions_tested = j["sosc_directions_tested"].get<int>();
  report.sosc.equality_null_dim =
      j["sosc_equality_null_dim"].get<Eigen::Index>();
  report.sosc.theta = detail::matrix_from_json(j["sosc_theta"]);
  report.sosc.tol = j["sosc_tol"].get<double>();

  report.notes = j["notes"].get<std::vector<std::string>>();
  return report;
}

inline Json to_json(const NlsdpProblem& problem, const StageRecord& stage) {
  Json j;
  j["c"] = stage.c;
  j["value"] = stage.value;
  j["start_value"] = stage.start_value;
  j["eta"] = stage.eta;
  j["feas_G"] = stage.feas_sdp;
  j["feas_h"] = stage.feas_eq;
  j["value_gap"] = stage.value_gap;
  j["grad_norm"] = stage.grad_norm;
  j["iterations"] = stage.iterations;
  j["termination"] = termination_name(stage.termination);
  j["x"] = detail::vector_to_json(stage.minimizer.x);
  if (problem.has_sdp_block()) {
    j["lambda"] = detail::matrix_to_json(stage.minimizer.lambda->mat());
  }
  if (problem.has_equalities()) {
    j["mu"] = detail::vector_to_json(stage.minimizer.mu);
  }
  return j;
}

inline Json to_json(const NlsdpProblem& problem, const SolveTrace& trace) {
  Json j;
  j["problem"] = problem.name;
  j["certified"] = trace.certified;
  j["certified_stage"] = trace.certified_stage;
  Json stages = Json::array();
  for (const StageRecord& stage : trace.stages) {
    stages.push_back(to_json(problem, stage));
  }
  j["stages"] = std::move(stages);
  return j;
}

inline Json to_json(const SingularPenaltyProblem& problem,
                    const PenaltySolveTrace& trace) {
  Json j;
  j["problem"] = problem.name;
  j["certified"] = trace.certified;
  j["certified_stage"] = trace.certified_stage;
  Json stages = Json::array();
  for (const PenaltyStageRecord& stage : trace.stages) {
    Json s;
    s["c"] = stage.c;
    s["value"] = stage.value;
    s["p"] = stage.p;
    s["feas_g"] = stage.feasibility;
    s["value_gap"] = stage.value_gap;
    s["iterations"] = stage.iterations;
    s["termination"] = termination_name(stage.termination);
    s["reached_face"] = stage.reached_face;
    s["x"] = detail::vector_to_json(stage.x);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  return j;
}

inline Json to_json(const ExactnessReport& report,
                    const NlsdpProblem& problem) {
  Json j;
  j["trace"] = to_json(problem, report.trace);
  j["max_minimizer_norm"] = report.max_minimizer_norm;
  j["norm_bound"] = report.norm_bound;
  j["minimizers_bounded"] = report.minimizers_bounded;
  j["final_eta"] = report.final_eta;
  j["final_feas_G"] = report.final_feas_sdp;
  j["final_feas_h"] = report.final_feas_eq;
  j["cluster_feasible"] = report.cluster_feasible;
  j["probe_c"] = report.probe_c;
  Json probes = Json::array();
  for (const LocalProbeResult& probe : report.local_probes) {
    Json p;
    p["center"] = detail::vector_to_json(probe.center);
    p["is_local_min"] = probe.is_local_min;
    p["worst_violation"] = probe.worst_violation;
    p["samples"] = probe.samples;
    probes.push_back(std::move(p));
  }
  j["local_probes"] = std::move(probes);
  j["local_exactness"] = report.local_exactness;
  j["all_pass"] = report.all_pass();
  return j;
}

inline Json to_json(const SublevelReport& report) {
  Json j;
  j["verdict"] = probe_verdict_name(report.verdict);
  j["samples"] = report.samples;
  j["counterexample_count"] = report.counterexample_count;
  Json list = Json::array();
  for (const Eigen::VectorXd& v : report.counterexamples) {
    list.push_back(detail::vector_to_json(v));
  }
  j["counterexamples"] = std::move(list);
  j["c0"] = report.c0;
  return j;
}

// ---------------------------------------------------------------------------
// CSV: '.' decimal separator, no locale dependence, 17 significant digits.
// ---------------------------------------------------------------------------

inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace exmerit
