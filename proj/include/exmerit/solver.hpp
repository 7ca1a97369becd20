#pragma once

#include <Eigen/Core>

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exmerit/auglag.hpp"
#include "exmerit/ext_real.hpp"
#include "exmerit/penalty.hpp"
#include "exmerit/problems.hpp"
#include "exmerit/symmat.hpp"

namespace exmerit {

struct LineSearchConfig {
  double sufficient_decrease = 1e-4;  // Armijo margin
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct CScheduleConfig {
  double initial = 1.0;
  double growth = 10.0;
  int max_stages = 8;
  double max_c = std::numeric_limits<double>::infinity();
};

struct SolverConfig {
  double grad_tol = 1e-8;
  int max_iters = 5000;
  LineSearchConfig line_search;
  int memory = 10;  // quasi-Newton history length
  CScheduleConfig c_schedule;
  double eta_tol = 1e-8;
  double feas_tol = 1e-8;

  void check() const {
    if (!(grad_tol > 0.0) || !(eta_tol > 0.0) || !(feas_tol > 0.0)) {
      throw std::invalid_argument("SolverConfig: tolerances must be > 0");
    }
    if (!(c_schedule.growth > 1.0)) {
      throw std::invalid_argument("SolverConfig: c growth factor must be > 1");
    }
    if (max_iters < 1 || memory < 1 || c_schedule.max_stages < 1) {
      throw std::invalid_argument("SolverConfig: counts must be >= 1");
    }
  }
};

enum class Termination { converged, iteration_limit, stalled };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::iteration_limit: return "iteration-limit";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

namespace detail {

struct SmoothEval {
  ExtReal value;
  Eigen::VectorXd gradient;  // valid only when requested and value finite
};

using SmoothObjective =
    std::function<SmoothEval(const Eigen::VectorXd&, bool want_gradient)>;

struct InnerResult {
  Eigen::VectorXd point;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::converged;
  bool stopped_by_predicate = false;
};

/// Limited-memory quasi-Newton descent with Armijo backtracking.
///
/// +infinity values are legal line-search outcomes and simply trigger
/// backtracking, which realizes the open-domain constraint without any
/// explicit projection. An optional `project` maps every trial point back
/// into a closed constraint set; an optional `stop_at` predicate ends the
/// descent right after an accepted step (used for the singular face p = 0).
inline InnerResult minimize_smooth(
    const SmoothObjective& objective, const Eigen::VectorXd& start,
    const SolverConfig& config,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project =
        nullptr,
    const std::function<bool(const Eigen::VectorXd&)>& stop_at = nullptr) {
  config.check();

  Eigen::VectorXd x = project ? project(start) : start;
  SmoothEval current = objective(x, true);
  if (!current.value.is_finite()) {
    throw std::runtime_error("minimize_smooth: start has infinite value");
  }

  struct Correction {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
  };
  std::deque<Correction> history;

  const auto lbfgs_direction = [&history](const Eigen::VectorXd& grad) {
    Eigen::VectorXd q = -grad;
    if (history.empty()) return q;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      alpha[i] = history[i].rho * history[i].s.dot(q);
      q -= alpha[i] * history[i].y;
    }
    const Correction& last = history.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * history[i].y.dot(q);
      q += (alpha[i] - beta) * history[i].s;
    }
    return q;
  };

  InnerResult result;
  int iter = 0;
  while (true) {
    result.grad_norm = current.gradient.norm();
    if (result.grad_norm <= config.grad_tol) {
      result.termination = Termination::converged;
      break;
    }
    if (iter >= config.max_iters) {
      result.termination = Termination::iteration_limit;
      break;
    }

    Eigen::VectorXd direction = lbfgs_direction(current.gradient);
    bool fallback = false;
    if (current.gradient.dot(direction) >=
        -1e-12 * result.grad_norm * direction.norm()) {
      direction = -current.gradient;
      fallback = true;
    }

    // Armijo backtracking; the sufficient-decrease test uses the actual
    // displacement so that projected trial points are handled uniformly.
    std::optional<Eigen::VectorXd> accepted;
    ExtReal accepted_value;
    for (int attempt = 0; attempt <= 1 && !accepted; ++attempt) {
      double step = 1.0;
      for (int bt = 0; bt < config.line_search.max_backtracks; ++bt) {
        Eigen::VectorXd trial = x + step * direction;
        if (project) trial = project(trial);
        const Eigen::VectorXd displacement = trial - x;
        const double slope = current.gradient.dot(displacement);
        if (slope < 0.0) {
          const SmoothEval trial_eval = objective(trial, false);
          if (trial_eval.value.is_finite() &&
              trial_eval.value.value() <=
                  current.value.value() +
                      config.line_search.sufficient_decrease * slope) {
            accepted = std::move(trial);
            accepted_value = trial_eval.value;
            break;
          }
        }
        step *= config.line_search.backtrack;
      }
      if (!accepted && !fallback) {
        direction = -current.gradient;
        fallback = true;
        history.clear();
      } else {
        break;
      }
    }
    if (!accepted) {
      result.termination = Termination::stalled;
      break;
    }

    ++iter;
    const Eigen::VectorXd previous = std::move(x);
    x = *accepted;
    if (stop_at && stop_at(x)) {
      current.value = accepted_value;
      current.gradient.setZero();
      result.stopped_by_predicate = true;
      result.termination = Termination::converged;
      break;
    }

    const SmoothEval next = objective(x, true);
    const Eigen::VectorXd s = x - previous;
    const Eigen::VectorXd y = next.gradient - current.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      history.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(history.size()) > config.memory) {
        history.pop_front();
      }
    }
    current = next;
  }

  result.point = std::move(x);
  result.value = current.value.value_or(
      std::numeric_limits<double>::quiet_NaN());
  result.grad_norm = result.stopped_by_predicate
                         ? 0.0
                         : current.gradient.norm();
  result.iterations = iter;
  return result;
}

/// Pulls the primal part of a start point into the effective domain
/// {a > 0, b > 0} by descending the smooth infeasibility surrogate
/// trace([G]_+^2)^kappa + ||h||^2. Returns the adjusted primal vector.
inline Eigen::VectorXd recover_into_domain(const NlsdpProblem& problem,
                                           Eigen::VectorXd x) {
  const double target = 0.1 * problem.alpha;
  const auto margins_ok = [&problem, target](const Eigen::VectorXd& y) {
    ExtendedPoint probe;
    probe.x = y;
    if (problem.has_sdp_block()) probe.lambda = SymMatrix::zero(problem.sdp_dim);
    probe.mu = Eigen::VectorXd::Zero(problem.eq_dim);
    const Scalings s = scalings(problem, probe);
    return s.a >= target && s.b >= target;
  };
  if (margins_ok(x)) return x;

  const auto surrogate = [&problem](const Eigen::VectorXd& y) {
    double value = 0.0;
    if (problem.has_sdp_block()) {
      const SymMatrix gplus = project_psd(problem.constraint(y));
      const double theta = frobenius_inner(gplus, gplus);
      value += theta > 0.0 ? std::pow(theta, problem.kappa) : 0.0;
    }
    if (problem.has_equalities()) value += problem.equality(y).squaredNorm();
    return value;
  };
  const auto surrogate_grad = [&problem](const Eigen::VectorXd& y) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(y.size());
    if (problem.has_sdp_block()) {
      const SymMatrix gplus = project_psd(problem.constraint(y));
      const double theta = frobenius_inner(gplus, gplus);
      if (theta > 0.0) {
        const double outer = problem.kappa * std::pow(theta, problem.kappa - 1.0);
        const std::vector<SymMatrix> parts = problem.constraint_jac(y);
        for (int i = 0; i < problem.dim; ++i) {
          g(i) += outer * 2.0 *
                  frobenius_inner(gplus, parts[static_cast<std::size_t>(i)]);
        }
      }
    }
    if (problem.has_equalities()) {
      g += 2.0 * problem.equality_jac(y).transpose() * problem.equality(y);
    }
    return g;
  };

  for (int iter = 0; iter < 200; ++iter) {
    const double value = surrogate(x);
    const Eigen::VectorXd grad = surrogate_grad(x);
    if (grad.norm() < 1e-14) break;
    double step = 1.0 / std::max(1.0, grad.norm());
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd trial = x - step * grad;
      if (surrogate(trial) < value) {
        x = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (margins_ok(x)) return x;
  }
  if (!margins_ok(x)) {
    throw std::runtime_error("minimize_extended: start outside Omega_alpha");
  }
  return x;
}

}  // namespace detail

struct ExtendedMinimizeResult {
  ExtendedPoint point;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::converged;
  /// Merit value at the point the descent actually started from (after any
  /// domain-recovery adjustment of the primal part).
  double start_value = 0.0;
};

/// Minimizes the augmented Lagrangian over the extended space
/// (x, lambda, mu) at fixed penalty parameter c. The multiplier matrix is
/// optimized through its l(l+1)/2 free coordinates; no cone constraint is
/// imposed on it.
inline ExtendedMinimizeResult minimize_extended(const NlsdpProblem& problem,
                                                double c,
                                                const ExtendedPoint& start,
                                                const SolverConfig& config) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("minimize_extended: c must be > 0");
  }
  check_problem(problem);
  check_point(problem, start);

  ExtendedPoint adjusted = start;
  if (!eval_auglag(problem, adjusted, c).value.is_finite()) {
    adjusted.x = detail::recover_into_domain(problem, adjusted.x);
  }

  const detail::SmoothObjective objective =
      [&problem, c](const Eigen::VectorXd& v, bool want_gradient) {
        const AugLagEval eval =
            eval_auglag(problem, unflatten_point(problem, v), c, want_gradient);
        detail::SmoothEval out;
        out.value = eval.value;
        if (want_gradient && eval.gradient) {
          out.gradient = flatten_gradient(problem, *eval.gradient);
        }
        return out;
      };

  const Eigen::VectorXd flat_start = flatten_point(problem, adjusted);
  const double start_value = objective(flat_start, false).value.value_or(
      std::numeric_limits<double>::infinity());
  const detail::InnerResult inner =
      detail::minimize_smooth(objective, flat_start, config);

  ExtendedMinimizeResult result;
  result.point = unflatten_point(problem, inner.point);
  result.value = inner.value;
  result.grad_norm = inner.grad_norm;
  result.iterations = inner.iterations;
  result.termination = inner.termination;
  result.start_value = start_value;
  return result;
}

struct PenaltyMinimizeResult {
  Eigen::VectorXd x;
  double p = 0.0;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::converged;
  bool reached_face = false;  // descent ended on the singular face p = 0
};

/// Minimizes the singular penalty function over (x, p) with p kept in
/// [0, infinity) by projection. Requires an interior start p > 0; when a
/// projected step lands on the face p = 0 with the better value, the descent
/// terminates there.
inline PenaltyMinimizeResult minimize_penalty(
    const SingularPenaltyProblem& problem, double c,
    const Eigen::VectorXd& start_x, double start_p,
    const SolverConfig& config) {
  if (!(start_p > 0.0)) {
    throw std::invalid_argument("minimize_penalty: interior start required");
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("minimize_penalty: c must be > 0");
  }
  if (!problem.objective_grad || !problem.phi.deriv || !problem.omega.deriv) {
    throw std::invalid_argument(
        "minimize_penalty: gradients of f, phi and omega are required");
  }
  const int d = problem.dim;

  const detail::SmoothObjective objective =
      [&problem, c, d](const Eigen::VectorXd& v, bool want_gradient) {
        const Eigen::VectorXd x = v.head(d);
        const double p = v(d);
        const PenaltyEval eval = eval_penalty(problem, x, p, c, want_gradient);
        detail::SmoothEval out;
        out.value = eval.value;
        if (want_gradient) {
          out.gradient.resize(d + 1);
          if (eval.grad_x && eval.grad_p) {
            out.gradient.head(d) = *eval.grad_x;
            out.gradient(d) = *eval.grad_p;
          } else {
            out.gradient.setZero();
          }
        }
        return out;
      };
  const auto project = [d](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    out(d) = std::max(out(d), 0.0);
    return out;
  };
  const auto on_face = [d](const Eigen::VectorXd& v) { return v(d) == 0.0; };

  Eigen::VectorXd start(d + 1);
  start.head(d) = start_x;
  start(d) = start_p;
  const detail::InnerResult inner =
      detail::minimize_smooth(objective, start, config, project, on_face);

  PenaltyMinimizeResult result;
  result.x = inner.point.head(d);
  result.p = inner.point(d);
  result.value = inner.value;
  result.grad_norm = inner.grad_norm;
  result.iterations = inner.iterations;
  result.termination = inner.termination;
  result.reached_face = inner.stopped_by_predicate;
  return result;
}

struct StageRecord {
  double c = 0.0;
  ExtendedPoint minimizer;
  double value = 0.0;       // merit value at the stage minimizer
  double start_value = 0.0; // merit value at the stage's warm start
  double eta = 0.0;
  double feas_sdp = 0.0;    // ||[G(x)]_+||_F
  double feas_eq = 0.0;     // ||h(x)||
  double value_gap = 0.0;   // |merit value - f(x)|
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::converged;
};

struct SolveTrace {
  std::vector<StageRecord> stages;
  bool certified = false;
  int certified_stage = -1;
};

/// Feasibility residuals (||[G(x)]_+||_F, ||h(x)||) of a primal point.
inline std::pair<double, double> feasibility_residuals(
    const NlsdpProblem& problem, const Eigen::VectorXd& x) {
  double sdp = 0.0;
  double eq = 0.0;
  if (problem.has_sdp_block()) {
    sdp = project_psd(problem.constraint(x)).frobenius_norm();
  }
  if (problem.has_equalities()) eq = problem.equality(x).norm();
  return {sdp, eq};
}

struct PenaltyStageRecord {
  double c = 0.0;
  Eigen::VectorXd x;
  double p = 0.0;
  double value = 0.0;
  double feasibility = 0.0;  // ||g(x)||
  double value_gap = 0.0;    // |value - f(x)| (0 on the face, by definition)
  int iterations = 0;
  Termination termination = Termination::converged;
  bool reached_face = false;
};

struct PenaltySolveTrace {
  std::vector<PenaltyStageRecord> stages;
  bool certified = false;
  int certified_stage = -1;
};

/// Continuation loop for the singular penalty: minimizes F(., ., c) along the
/// c schedule. Exactness signature: the auxiliary variable collapses onto the
/// face (p <= eta_tol, the eta of this merit function), the constraint
/// residual vanishes and the merit value agrees with the objective.
inline PenaltySolveTrace penalty_continuation_solve(
    const SingularPenaltyProblem& problem, const Eigen::VectorXd& start_x,
    double start_p, const SolverConfig& config) {
  config.check();
  PenaltySolveTrace trace;
  Eigen::VectorXd warm_x = start_x;
  double warm_p = start_p;
  double c = config.c_schedule.initial;
  for (int stage = 0;
       stage < config.c_schedule.max_stages && c <= config.c_schedule.max_c;
       ++stage) {
    const PenaltyMinimizeResult result =
        minimize_penalty(problem, c, warm_x, warm_p, config);

    PenaltyStageRecord record;
    record.c = c;
    record.x = result.x;
    record.p = result.p;
    record.value = result.value;
    record.feasibility = problem.constraint(result.x).norm();
    const ExtReal f = problem.objective(result.x);
    record.value_gap =
        f.is_finite() ? std::abs(result.value - f.value())
                      : std::numeric_limits<double>::infinity();
    record.iterations = result.iterations;
    record.termination = result.termination;
    record.reached_face = result.reached_face;

    const bool certified = record.p <= config.eta_tol &&
                           record.feasibility <= config.feas_tol &&
                           record.value_gap <= config.eta_tol;
    warm_x = result.x;
    warm_p = std::max(result.p, 0.1 * start_p);  // keep the start interior
    trace.stages.push_back(std::move(record));
    if (certified) {
      trace.certified = true;
      trace.certified_stage = stage;
      break;
    }
    c *= config.c_schedule.growth;
  }
  return trace;
}

/// Penalty continuation: minimizes the augmented Lagrangian along an
/// increasing c schedule, warm-starting each stage from the previous
/// minimizer. Stops as soon as the exactness signature holds at the stage
/// minimizer: eta <= eta_tol, feasibility <= feas_tol and the merit value
/// agrees with f(x) to eta_tol (a KKT pair whose merit value is the
/// objective value).
inline SolveTrace continuation_solve(const NlsdpProblem& problem,
                                     const ExtendedPoint& start,
                                     const SolverConfig& config) {
  config.check();
  SolveTrace trace;
  ExtendedPoint warm = start;
  double c = config.c_schedule.initial;
  for (int stage = 0;
       stage < config.c_schedule.max_stages && c <= config.c_schedule.max_c;
       ++stage) {
    const ExtendedMinimizeResult result =
        minimize_extended(problem, c, warm, config);

    StageRecord record;
    record.c = c;
    record.minimizer = result.point;
    record.value = result.value;
    record.start_value = result.start_value;
    record.eta = eta_residual(problem, result.point);
    const auto [feas_sdp, feas_eq] =
        feasibility_residuals(problem, result.point.x);
    record.feas_sdp = feas_sdp;
    record.feas_eq = feas_eq;
    record.value_gap =
        std::abs(result.value - problem.objective(result.point.x));
    record.grad_norm = result.grad_norm;
    record.iterations = result.iterations;
    record.termination = result.termination;

    const bool certified = record.eta <= config.eta_tol &&
                           record.feas_sdp <= config.feas_tol &&
                           record.feas_eq <= config.feas_tol &&
                           record.value_gap <= config.eta_tol;
    warm = result.point;
    trace.stages.push_back(std::move(record));
    if (certified) {
      trace.certified = true;
      trace.certified_stage = stage;
      break;
    }
    c *= config.c_schedule.growth;
  }
  return trace;
}

}  // namespace exmerit
