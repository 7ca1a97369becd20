// Command-line driver: continuation solves, certification sweeps and oracle
// cross-checks on registry or JSON-defined problems. Reports are JSON on
// stdout; sweeps emit plot-ready CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "exmerit/exmerit.hpp"

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitNotCertified = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
  std::string problem_name;
  std::string problem_file;
  std::string c_list;
  double alpha = 1.0;
  double kappa = 2.0;
  bool alpha_set = false;
  bool kappa_set = false;
  double c0 = 1.0;
  double c_growth = 10.0;
  double c_max = std::numeric_limits<double>::infinity();
  double grad_tol = 1e-8;
  unsigned seed = 0;
  bool penalty_mode = false;
  bool with_oracle = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("problem", opt.problem_name, "registry problem name");
  cmd->add_option("--problem-file", opt.problem_file,
                  "JSON problem file {name, params, alpha, kappa}");
  cmd->add_option("--alpha", opt.alpha, "domain radius parameter (> 0)");
  cmd->add_option("--kappa", opt.kappa, "smoothing exponent (> 1)");
  cmd->add_option("--c0", opt.c0, "initial penalty parameter");
  cmd->add_option("--c-growth", opt.c_growth, "penalty growth factor (> 1)");
  cmd->add_option("--c-max", opt.c_max, "cap on the penalty parameter");
  cmd->add_option("--grad-tol", opt.grad_tol, "inner gradient tolerance");
  cmd->add_option("--seed", opt.seed, "seed for sampling diagnostics");
  cmd->add_flag("--penalty", opt.penalty_mode,
                "singular-penalty mode (problem must be penalty-form)");
  cmd->add_flag("--oracle", opt.with_oracle,
                "append a grid-oracle cross-check to the report");
}

exmerit::AnyProblem resolve_problem(const CLI::App* cmd, CliOptions& opt) {
  opt.alpha_set = cmd->count("--alpha") > 0;
  opt.kappa_set = cmd->count("--kappa") > 0;
  if (!opt.problem_file.empty()) {
    return exmerit::load_problem_file(opt.problem_file);
  }
  if (opt.problem_name.empty()) {
    throw std::invalid_argument(
        "a problem name or --problem-file is required");
  }
  exmerit::Params params;
  if (opt.alpha_set) params["alpha"] = opt.alpha;
  if (opt.kappa_set) params["kappa"] = opt.kappa;
  return exmerit::registry_get(opt.problem_name, params);
}

exmerit::SolverConfig make_config(const CliOptions& opt) {
  exmerit::SolverConfig config;
  config.grad_tol = opt.grad_tol;
  config.c_schedule.initial = opt.c0;
  config.c_schedule.growth = opt.c_growth;
  config.c_schedule.max_c = opt.c_max;
  return config;
}

exmerit::Json config_to_json(const CliOptions& opt) {
  exmerit::Json j;
  j["c0"] = opt.c0;
  j["c_growth"] = opt.c_growth;
  if (std::isfinite(opt.c_max)) j["c_max"] = opt.c_max;
  j["grad_tol"] = opt.grad_tol;
  j["seed"] = opt.seed;
  return j;
}

int grid_resolution_for(Eigen::Index dims) {
  switch (dims) {
    case 1: return 1001;
    case 2: return 201;
    case 3: return 41;
    default: return 21;
  }
}

exmerit::Json oracle_cross_check(const exmerit::NlsdpProblem& problem,
                                 const exmerit::SolveTrace& trace) {
  exmerit::Json j;
  const Eigen::Index dims = exmerit::extended_dim(problem);
  if (dims > 4) {
    j["skipped"] = "extended dimension exceeds the 4-axis oracle budget";
    return j;
  }
  if (trace.stages.empty()) {
    j["skipped"] = "no stages to cross-check";
    return j;
  }
  const exmerit::StageRecord& last = trace.stages.back();
  const Eigen::VectorXd center =
      exmerit::flatten_point(problem, last.minimizer);
  const auto evaluate = [&problem, &last](const Eigen::VectorXd& v) {
    return exmerit::eval_auglag(problem,
                                exmerit::unflatten_point(problem, v), last.c)
        .value;
  };
  const exmerit::GridResult grid = exmerit::grid_min(
      evaluate, exmerit::Box::around(center, 1.0), grid_resolution_for(dims));
  j["c"] = last.c;
  j["argmin"] = exmerit::detail::vector_to_json(grid.argmin);
  if (grid.value.is_finite()) j["value"] = grid.value.value();
  j["solver_value"] = last.value;
  j["solver_not_worse"] =
      !grid.value.is_finite() || last.value <= grid.value.value() + 1e-9;
  j["distance_to_solver_point"] = (grid.argmin - center).norm();
  return j;
}

exmerit::Json oracle_cross_check(const exmerit::SingularPenaltyProblem& problem,
                                 const exmerit::PenaltySolveTrace& trace) {
  exmerit::Json j;
  const Eigen::Index dims = problem.dim + 1;
  if (dims > 4) {
    j["skipped"] = "dimension exceeds the 4-axis oracle budget";
    return j;
  }
  if (trace.stages.empty()) {
    j["skipped"] = "no stages to cross-check";
    return j;
  }
  const exmerit::PenaltyStageRecord& last = trace.stages.back();
  Eigen::VectorXd center(dims);
  center.head(problem.dim) = last.x;
  center(problem.dim) = last.p;
  exmerit::Box box = exmerit::Box::around(center, 1.0);
  box.lo(problem.dim) = std::max(box.lo(problem.dim), 0.0);
  box.lo(problem.dim) = 0.0;  // the singular face carries exact minimizers
  const auto evaluate = [&problem, &last](const Eigen::VectorXd& v) {
    return exmerit::eval_penalty(problem, v.head(problem.dim),
                                 v(problem.dim), last.c)
        .value;
  };
  const exmerit::GridResult grid =
      exmerit::grid_min(evaluate, box, grid_resolution_for(dims));
  j["c"] = last.c;
  j["argmin"] = exmerit::detail::vector_to_json(grid.argmin);
  if (grid.value.is_finite()) j["value"] = grid.value.value();
  j["solver_value"] = last.value;
  j["solver_not_worse"] =
      !grid.value.is_finite() || last.value <= grid.value.value() + 1e-9;
  return j;
}

exmerit::Json kkt_to_json(const exmerit::KktReport& r) {
  exmerit::Json j;
  j["eta"] = r.eta;
  j["stationarity"] = r.stationarity;
  j["complementarity"] = r.complementarity;
  j["feas_G"] = r.feas_sdp;
  j["feas_h"] = r.feas_eq;
  j["lambda_min_eig"] = r.lambda_min_eig;
  j["lambda_psd"] = r.lambda_psd;
  j["kkt_tol"] = r.tol;
  return j;
}

void require_penalty_form(const exmerit::AnyProblem& any, bool penalty_mode) {
  if (penalty_mode &&
      !std::holds_alternative<exmerit::SingularPenaltyProblem>(any)) {
    throw std::invalid_argument("--penalty requires a penalty-form problem");
  }
}

int cmd_solve(const CLI::App* cmd, CliOptions& opt) {
  exmerit::AnyProblem any = resolve_problem(cmd, opt);
  require_penalty_form(any, opt.penalty_mode);
  const exmerit::SolverConfig config = make_config(opt);

  if (opt.penalty_mode ||
      std::holds_alternative<exmerit::SingularPenaltyProblem>(any)) {
    const auto& problem = std::get<exmerit::SingularPenaltyProblem>(any);
    const exmerit::PenaltySolveTrace trace =
        exmerit::penalty_continuation_solve(
            problem, Eigen::VectorXd::Zero(problem.dim), 0.5, config);
    exmerit::Json report = exmerit::to_json(problem, trace);
    report["config"] = config_to_json(opt);
    if (opt.with_oracle) report["oracle"] = oracle_cross_check(problem, trace);
    std::cout << report.dump(2) << "\n";
    return trace.certified ? kExitCertified : kExitNotCertified;
  }

  const auto& problem = std::get<exmerit::NlsdpProblem>(any);
  const exmerit::SolveTrace trace = exmerit::continuation_solve(
      problem, exmerit::zero_point(problem), config);
  exmerit::Json report = exmerit::to_json(problem, trace);
  report["config"] = config_to_json(opt);
  if (!trace.stages.empty()) {
    report["kkt"] =
        kkt_to_json(exmerit::kkt_check(problem, trace.stages.back().minimizer));
  }
  if (opt.with_oracle) report["oracle"] = oracle_cross_check(problem, trace);
  std::cout << report.dump(2) << "\n";
  return trace.certified ? kExitCertified : kExitNotCertified;
}

int cmd_certify(const CLI::App* cmd, CliOptions& opt) {
  exmerit::AnyProblem any = resolve_problem(cmd, opt);
  if (!std::holds_alternative<exmerit::NlsdpProblem>(any)) {
    throw std::invalid_argument("certify supports nonlinear SDP problems only");
  }
  const auto& problem = std::get<exmerit::NlsdpProblem>(any);
  const exmerit::SolverConfig config = make_config(opt);

  exmerit::ProbeConfig probe;
  probe.seed = opt.seed;
  const exmerit::ExactnessReport sweep =
      exmerit::exactness_sweep(problem, exmerit::zero_point(problem), config,
                               probe);

  // Certify the sharpest point available: the certified stage minimizer, a
  // registered solution, or the last stage minimizer.
  std::optional<exmerit::ExtendedPoint> point;
  if (sweep.trace.certified) {
    point = sweep.trace.stages[static_cast<std::size_t>(
                                   sweep.trace.certified_stage)]
                .minimizer;
  } else if (!problem.known_solutions.empty()) {
    point = problem.known_solutions.front();
  } else if (!sweep.trace.stages.empty()) {
    point = sweep.trace.stages.back().minimizer;
  }
  if (!point) {
    throw std::invalid_argument(
        "certify: empty continuation schedule and no known solutions");
  }

  const exmerit::CertificationReport certification =
      exmerit::certify_point(problem, *point, 1e-6);

  exmerit::Json report;
  report["certification"] = exmerit::to_json(certification);
  report["exactness"] = exmerit::to_json(sweep, problem);
  bool sublevel_ok = true;
  if (problem.f_star.has_value()) {
    const double radius =
        2.0 + exmerit::flatten_point(problem, *point).norm();
    const exmerit::SublevelReport sublevel = exmerit::sublevel_probe(
        problem, sweep.probe_c,
        exmerit::Box::cube(exmerit::extended_dim(problem), radius), 10000,
        opt.seed);
    report["sublevel"] = exmerit::to_json(sublevel);
    sublevel_ok =
        sublevel.verdict != exmerit::ProbeVerdict::counterexample_found;
  } else {
    report["sublevel"] = {{"skipped", "f_star unknown"}};
  }

  const bool pass = exmerit::kkt_passes(certification.kkt, 1e-6) &&
                    certification.nondegeneracy.nondegenerate &&
                    certification.sosc.verdict != exmerit::SoscVerdict::fail &&
                    sweep.all_pass() && sublevel_ok;
  report["pass"] = pass;
  report["config"] = config_to_json(opt);
  std::cout << report.dump(2) << "\n";
  return pass ? kExitCertified : kExitNotCertified;
}

std::vector<double> parse_c_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size() || !(v > 0.0)) {
      throw std::invalid_argument("sweep: bad c value '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw std::invalid_argument("sweep: --c list must not be empty");
  }
  return values;
}

int cmd_sweep(const CLI::App* cmd, CliOptions& opt) {
  const std::vector<double> c_values = parse_c_list(opt.c_list);
  exmerit::AnyProblem any = resolve_problem(cmd, opt);
  require_penalty_form(any, opt.penalty_mode);
  exmerit::SolverConfig config = make_config(opt);

  if (opt.penalty_mode ||
      std::holds_alternative<exmerit::SingularPenaltyProblem>(any)) {
    const auto& problem = std::get<exmerit::SingularPenaltyProblem>(any);
    std::string header = "c,value,p,feas_g,iters";
    for (int i = 0; i < problem.dim; ++i) {
      header += ",x" + std::to_string(i);
    }
    std::cout << header << "\n";
    Eigen::VectorXd warm_x = Eigen::VectorXd::Zero(problem.dim);
    double warm_p = 0.5;
    for (const double c : c_values) {
      const exmerit::PenaltyMinimizeResult result =
          exmerit::minimize_penalty(problem, c, warm_x, warm_p, config);
      std::cout << exmerit::csv_double(c) << ","
                << exmerit::csv_double(result.value) << ","
                << exmerit::csv_double(result.p) << ","
                << exmerit::csv_double(problem.constraint(result.x).norm())
                << "," << result.iterations;
      for (int i = 0; i < problem.dim; ++i) {
        std::cout << "," << exmerit::csv_double(result.x(i));
      }
      std::cout << "\n";
      warm_x = result.x;
      warm_p = std::max(result.p, 0.05);
    }
    return kExitCertified;
  }

  const auto& problem = std::get<exmerit::NlsdpProblem>(any);
  std::string header = "c,value,eta,stationarity,feas_G,feas_h,iters";
  for (int i = 0; i < problem.dim; ++i) {
    header += ",x" + std::to_string(i);
  }
  std::cout << header << "\n";
  exmerit::ExtendedPoint warm = exmerit::zero_point(problem);
  for (const double c : c_values) {
    const exmerit::ExtendedMinimizeResult result =
        exmerit::minimize_extended(problem, c, warm, config);
    const auto [feas_sdp, feas_eq] =
        exmerit::feasibility_residuals(problem, result.point.x);
    std::cout << exmerit::csv_double(c) << ","
              << exmerit::csv_double(result.value) << ","
              << exmerit::csv_double(exmerit::eta_residual(problem, result.point))
              << ","
              << exmerit::csv_double(
                     exmerit::grad_x_lagrangian(problem, result.point).norm())
              << "," << exmerit::csv_double(feas_sdp) << ","
              << exmerit::csv_double(feas_eq) << "," << result.iterations;
    for (int i = 0; i < problem.dim; ++i) {
      std::cout << "," << exmerit::csv_double(result.point.x(i));
    }
    std::cout << "\n";
    warm = result.point;
  }
  return kExitCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extended-exactness merit functions for nonlinear SDP"};
  app.require_subcommand(1);

  CliOptions solve_opt;
  CLI::App* solve = app.add_subcommand(
      "solve", "penalty continuation + KKT check, JSON report on stdout");
  add_common_flags(solve, solve_opt);

  CliOptions certify_opt;
  CLI::App* certify = app.add_subcommand(
      "certify",
      "nondegeneracy, SOSC, exactness sweep and sublevel probe, JSON report");
  add_common_flags(certify, certify_opt);

  CliOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "merit value and residuals versus c, CSV on stdout");
  add_common_flags(sweep, sweep_opt);
  sweep->add_option("--c", sweep_opt.c_list,
                    "comma-separated penalty parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve, solve_opt);
    if (certify->parsed()) return cmd_certify(certify, certify_opt);
    if (sweep->parsed()) return cmd_sweep(sweep, sweep_opt);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
