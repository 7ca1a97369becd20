#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "exmerit/ext_real.hpp"
#include "exmerit/problems.hpp"

namespace exmerit {

/// Feasibility cutoff for the singular face p = 0 (||g(x)|| <= kPenaltyFeasTol
/// counts as feasible there; exact zero tests are meaningless in floating
/// point).
inline constexpr double kPenaltyFeasTol = 1e-10;

struct PenaltyComponents {
  double objective = 0.0;
  double phi_term = 0.0;    // (c/p) phi(||g(x) - p w||^2)
  double omega_term = 0.0;  // c omega(p)
};

struct PenaltyEval {
  ExtReal value;
  /// Gradient in (x, p); absent on the p = 0 face, at +infinity, or when the
  /// shape functions carry no derivatives.
  std::optional<Eigen::VectorXd> grad_x;
  std::optional<double> grad_p;
  PenaltyComponents components;
};

/// Singular penalty function
///
///   F(x, p, c) = f(x) + (c/p) phi(||g(x) - p w||^2) + c omega(p)   for p > 0,
///   F(x, 0, c) = f(x) on the feasible set, +infinity off it.
///
/// The auxiliary variable p collapses onto the singular face p = 0 at exact
/// minimizers.
inline PenaltyEval eval_penalty(const SingularPenaltyProblem& problem,
                                const Eigen::VectorXd& x, double p, double c,
                                bool want_gradient = false) {
  if (p < 0.0) throw std::invalid_argument("eval_penalty: p must be >= 0");
  if (!(c > 0.0)) throw std::invalid_argument("eval_penalty: c must be > 0");
  if (x.size() != problem.dim) {
    throw std::invalid_argument("eval_penalty: primal dimension mismatch");
  }

  PenaltyEval out;
  const ExtReal f = problem.objective(x);

  if (p == 0.0) {
    const double residual = problem.constraint(x).norm();
    out.value = residual <= kPenaltyFeasTol ? f : ExtReal::infinity();
    if (out.value.is_finite()) out.components.objective = f.value();
    return out;
  }

  if (!f.is_finite()) {
    out.value = ExtReal::infinity();
    return out;
  }

  const Eigen::VectorXd shifted = problem.constraint(x) - p * problem.shift;
  const double dist_sq = shifted.squaredNorm();
  out.components.objective = f.value();
  out.components.phi_term = c / p * problem.phi.value(dist_sq);
  out.components.omega_term = c * problem.omega.value(p);
  const double total = out.components.objective + out.components.phi_term +
                       out.components.omega_term;
  if (!std::isfinite(total)) {
    out.value = ExtReal::infinity();
    return out;
  }
  out.value = total;

  if (want_gradient && problem.objective_grad && problem.phi.deriv &&
      problem.omega.deriv) {
    const double phi_d = problem.phi.deriv(dist_sq);
    const Eigen::MatrixXd jac = problem.constraint_jac(x);
    out.grad_x = problem.objective_grad(x) +
                 (2.0 * c / p * phi_d) * (jac.transpose() * shifted);
    out.grad_p = -c / (p * p) * problem.phi.value(dist_sq) -
                 2.0 * c / p * phi_d * shifted.dot(problem.shift) +
                 c * problem.omega.deriv(p);
  }
  return out;
}

/// Screen for the linear-minorant growth conditions: estimates the largest
/// slopes phi0, omega0 with phi(t) >= phi0 t and omega(t) >= omega0 t on
/// (0, t0], by taking grid minima of phi(t)/t over a log-spaced sample.
/// A sufficient-condition screen for local extended exactness, not a proof.
struct GrowthEstimate {
  double slope = 0.0;    // grid minimum of shape(t)/t
  double argmin_t = 0.0;
  bool has_linear_minorant = false;
};

struct GrowthReport {
  GrowthEstimate phi;
  GrowthEstimate omega;
  double t0 = 0.0;
  int samples = 0;
  double slope_threshold = 0.0;
};

inline GrowthReport check_growth_conditions(
    const SingularPenaltyProblem& problem, double t0, int samples) {
  if (!(t0 > 0.0)) {
    throw std::invalid_argument("check_growth_conditions: t0 must be > 0");
  }
  if (samples < 2) {
    throw std::invalid_argument("check_growth_conditions: samples must be >= 2");
  }
  GrowthReport report;
  report.t0 = t0;
  report.samples = samples;
  report.slope_threshold = 1e-6;

  const auto estimate = [&](const ScalarFunc& shape) {
    GrowthEstimate est;
    est.slope = std::numeric_limits<double>::infinity();
    // Log-spaced grid over [t0 * 1e-8, t0] to expose vanishing slopes near 0.
    for (int i = 0; i < samples; ++i) {
      const double frac = static_cast<double>(i) / (samples - 1);
      const double t = t0 * std::pow(1e-8, 1.0 - frac);
      const double ratio = shape.value(t) / t;
      if (ratio < est.slope) {
        est.slope = ratio;
        est.argmin_t = t;
      }
    }
    est.has_linear_minorant = est.slope > report.slope_threshold;
    return est;
  };
  report.phi = estimate(problem.phi);
  report.omega = estimate(problem.omega);
  return report;
}

enum class LimitVerdict { converges, diverges, inconclusive };

struct LimitReport {
  std::vector<double> p_values;
  std::vector<ExtReal> values;  // F(x, p_k, c) along the sequence
  ExtReal face_value;           // F(x, 0, c)
  LimitVerdict verdict = LimitVerdict::inconclusive;
};

/// Reports the behaviour of F(x, p_k, c) along a positive sequence p_k
/// decreasing to 0, against the face value F(x, 0, c). A report, not a
/// theorem: the verdict states what the sample shows.
inline LimitReport limit_consistency(const SingularPenaltyProblem& problem,
                                     const Eigen::VectorXd& x, double c,
                                     const std::vector<double>& p_sequence) {
  for (std::size_t i = 0; i < p_sequence.size(); ++i) {
    if (!(p_sequence[i] > 0.0)) {
      throw std::invalid_argument("limit_consistency: p values must be > 0");
    }
    if (i > 0 && !(p_sequence[i] < p_sequence[i - 1])) {
      throw std::invalid_argument("limit_consistency: sequence must decrease");
    }
  }
  LimitReport report;
  report.p_values = p_sequence;
  for (const double p : p_sequence) {
    report.values.push_back(eval_penalty(problem, x, p, c).value);
  }
  report.face_value = eval_penalty(problem, x, 0.0, c).value;
  if (report.values.empty()) return report;

  const ExtReal first = report.values.front();
  const ExtReal last = report.values.back();
  if (report.face_value.is_finite()) {
    if (first.is_finite() && last.is_finite()) {
      const double e_first = std::abs(first.value() - report.face_value.value());
      const double e_last = std::abs(last.value() - report.face_value.value());
      if (e_last <= 1e-8 * (1.0 + std::abs(report.face_value.value())) ||
          e_last <= 0.1 * e_first) {
        report.verdict = LimitVerdict::converges;
      }
    }
  } else {
    if (!last.is_finite() ||
        (first.is_finite() &&
         last.value() >= 10.0 * std::max(1.0, std::abs(first.value())))) {
      report.verdict = LimitVerdict::diverges;
    }
  }
  return report;
}

}  // namespace exmerit
