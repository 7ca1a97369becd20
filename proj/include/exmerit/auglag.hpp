#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exmerit/ext_real.hpp"
#include "exmerit/problems.hpp"
#include "exmerit/symmat.hpp"

namespace exmerit {

/// Standard Lagrangian L(x, lambda, mu) = f(x) + trace(lambda G(x)) + <mu, h(x)>.
inline double lagrangian(const NlsdpProblem& problem, const ExtendedPoint& pt) {
  check_point(problem, pt);
  double value = problem.objective(pt.x);
  if (problem.has_sdp_block()) {
    value += frobenius_inner(*pt.lambda, problem.constraint(pt.x));
  }
  if (problem.has_equalities()) {
    value += pt.mu.dot(problem.equality(pt.x));
  }
  return value;
}

/// Gradient of the standard Lagrangian in the primal variables.
inline Eigen::VectorXd grad_x_lagrangian(const NlsdpProblem& problem,
                                         const ExtendedPoint& pt) {
  check_point(problem, pt);
  Eigen::VectorXd g = problem.objective_grad(pt.x);
  if (problem.has_sdp_block()) {
    const std::vector<SymMatrix> parts = problem.constraint_jac(pt.x);
    for (int i = 0; i < problem.dim; ++i) {
      g(i) += frobenius_inner(*pt.lambda, parts[static_cast<std::size_t>(i)]);
    }
  }
  if (problem.has_equalities()) {
    g += problem.equality_jac(pt.x).transpose() * pt.mu;
  }
  return g;
}

/// Hessian of the Lagrangian in x. Uses the analytic second derivatives when
/// the problem provides them, otherwise central differences of
/// grad_x_lagrangian with step 1e-5.
inline Eigen::MatrixXd lagrangian_hessian_x(const NlsdpProblem& problem,
                                            const ExtendedPoint& pt) {
  check_point(problem, pt);
  const bool analytic =
      static_cast<bool>(problem.objective_hess) &&
      (!problem.has_sdp_block() ||
       static_cast<bool>(problem.constraint_hess_contracted)) &&
      (!problem.has_equalities() ||
       static_cast<bool>(problem.equality_hess_contracted));
  if (analytic) {
    Eigen::MatrixXd hess = problem.objective_hess(pt.x);
    if (problem.has_sdp_block()) {
      hess += problem.constraint_hess_contracted(pt.x, *pt.lambda);
    }
    if (problem.has_equalities()) {
      hess += problem.equality_hess_contracted(pt.x, pt.mu);
    }
    return hess;
  }
  const auto grad = [&problem, &pt](const Eigen::VectorXd& y) {
    ExtendedPoint shifted = pt;
    shifted.x = y;
    return grad_x_lagrangian(problem, shifted);
  };
  const Eigen::MatrixXd hess = fd::jacobian(grad, pt.x, 1e-5);
  return 0.5 * (hess + hess.transpose());
}

/// Multiplier-selection residual
///
///   eta(x, lambda, mu) = ||grad_x L||^2 + trace(lambda^2 G(x)^2).
///
/// Nonnegative everywhere; zero exactly at KKT triples of nondegenerate
/// points (both stationarity and complementarity terms vanish).
inline double eta_residual(const NlsdpProblem& problem,
                           const ExtendedPoint& pt) {
  double value = grad_x_lagrangian(problem, pt).squaredNorm();
  if (problem.has_sdp_block()) {
    const Eigen::MatrixXd prod =
        pt.lambda->mat() * problem.constraint(pt.x).mat();
    value += prod.squaredNorm();  // trace(lambda^2 G^2)
  }
  return value;
}

/// Scaling ingredients of the augmented Lagrangian:
///   a(x) = alpha - trace([G(x)]_+^2)^kappa,  b(x) = alpha - ||h(x)||^2,
///   p = a / (1 + trace(lambda^2)),           q = b / (1 + ||mu||^2).
/// The point lies in the effective domain iff a > 0 and b > 0.
struct Scalings {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double q = 0.0;
  bool in_domain = false;
};

inline Scalings scalings(const NlsdpProblem& problem, const ExtendedPoint& pt) {
  check_point(problem, pt);
  Scalings s;
  double theta = 0.0;
  if (problem.has_sdp_block()) {
    const SymMatrix gplus = project_psd(problem.constraint(pt.x));
    theta = frobenius_inner(gplus, gplus);
  }
  s.a = problem.alpha - (theta > 0.0 ? std::pow(theta, problem.kappa) : 0.0);
  double hsq = 0.0;
  if (problem.has_equalities()) hsq = problem.equality(pt.x).squaredNorm();
  s.b = problem.alpha - hsq;

  const double lam_sq =
      problem.has_sdp_block() ? frobenius_inner(*pt.lambda, *pt.lambda) : 0.0;
  s.p = s.a / (1.0 + lam_sq);
  s.q = s.b / (1.0 + pt.mu.squaredNorm());
  s.in_domain = s.a > 0.0 && s.b > 0.0;
  return s;
}

/// Value components of the augmented Lagrangian (diagnostics; they sum to the
/// value whenever it is finite).
struct AugLagComponents {
  double objective = 0.0;
  double sdp_penalty = 0.0;
  double eq_inner = 0.0;
  double eq_quadratic = 0.0;
  double eta = 0.0;
};

struct AugLagEval {
  ExtReal value;
  /// Gradient in (x, lambda, mu); lambda block is the matrix gradient.
  /// Absent when the value is +infinity or when not requested.
  std::optional<ExtendedPoint> gradient;
  AugLagComponents components;
  Scalings scalings;
};

/// Evaluates the continuously differentiable exact augmented Lagrangian
///
///   f(x) + (1 / 2cp) (trace([cG(x) + p lambda]_+^2) - p^2 trace(lambda^2))
///        + <mu, h(x)> + (c / 2q) ||h(x)||^2 + eta(x, lambda, mu)
///
/// on the domain {a > 0, b > 0}, +infinity outside. The gradient is
/// assembled by the chain rule using d/dA trace([A]_+^2) = 2 [A]_+ and is
/// validated against finite differences in the test suite.
inline AugLagEval eval_auglag(const NlsdpProblem& problem,
                              const ExtendedPoint& pt, double c,
                              bool want_gradient = false) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("eval_auglag: c must be > 0");
  }
  check_problem(problem);
  check_point(problem, pt);

  const int d = problem.dim;
  const bool has_sdp = problem.has_sdp_block();
  const bool has_eq = problem.has_equalities();

  AugLagEval out;
  out.scalings = scalings(problem, pt);

  const double f = problem.objective(pt.x);
  if (!std::isfinite(f)) {
    throw std::runtime_error("eval_auglag: non-finite objective value");
  }
  out.components.objective = f;
  out.components.eta = eta_residual(problem, pt);
  if (!std::isfinite(out.components.eta)) {
    throw std::runtime_error("eval_auglag: non-finite eta term");
  }

  if (!out.scalings.in_domain) {
    out.value = ExtReal::infinity();
    return out;
  }

  const double p = out.scalings.p;
  const double q = out.scalings.q;
  const double lam_sq =
      has_sdp ? frobenius_inner(*pt.lambda, *pt.lambda) : 0.0;

  // Matrix penalty block.
  std::optional<SymMatrix> G;
  std::optional<SymMatrix> shifted_plus;  // [cG + p lambda]_+
  if (has_sdp) {
    G = problem.constraint(pt.x);
    if (!G->all_finite()) {
      throw std::runtime_error("eval_auglag: non-finite constraint value");
    }
    const SymMatrix shifted =
        SymMatrix::from_symmetric(c * G->mat() + p * pt.lambda->mat());
    shifted_plus = project_psd(shifted);
    const double s_tr = frobenius_inner(*shifted_plus, *shifted_plus);
    out.components.sdp_penalty = (s_tr - p * p * lam_sq) / (2.0 * c * p);
  }

  // Equality block.
  Eigen::VectorXd h;
  if (has_eq) {
    h = problem.equality(pt.x);
    if (!h.allFinite()) {
      throw std::runtime_error("eval_auglag: non-finite equality value");
    }
    out.components.eq_inner = pt.mu.dot(h);
    out.components.eq_quadratic = c / (2.0 * q) * h.squaredNorm();
  }

  const double total = f + out.components.sdp_penalty +
                       out.components.eq_inner + out.components.eq_quadratic +
                       out.components.eta;
  if (!std::isfinite(total)) {
    throw std::runtime_error("eval_auglag: non-finite merit value");
  }
  out.value = total;
  if (!want_gradient) return out;

  // ------------------------------------------------------------------
  // Gradient assembly.
  // ------------------------------------------------------------------
  ExtendedPoint grad;
  grad.x = problem.objective_grad(pt.x);
  grad.mu = Eigen::VectorXd::Zero(problem.eq_dim);

  const Eigen::VectorXd gL = grad_x_lagrangian(problem, pt);
  const Eigen::MatrixXd hessL = lagrangian_hessian_x(problem, pt);

  std::vector<SymMatrix> dG;
  Eigen::MatrixXd jac_h;
  if (has_sdp) dG = problem.constraint_jac(pt.x);
  if (has_eq) jac_h = problem.equality_jac(pt.x);

  // eta block: d eta/dx = 2 H_L gL + 2 [trace(lambda^2 G G_i)]_i.
  Eigen::VectorXd grad_eta_x = 2.0 * hessL * gL;
  if (has_sdp) {
    const Eigen::MatrixXd lam2G =
        pt.lambda->mat() * pt.lambda->mat() * G->mat();
    for (int i = 0; i < d; ++i) {
      grad_eta_x(i) +=
          2.0 * lam2G.cwiseProduct(dG[static_cast<std::size_t>(i)].mat()).sum();
    }
  }
  grad.x += grad_eta_x;

  if (has_sdp) {
    const Eigen::MatrixXd& lam = pt.lambda->mat();
    const SymMatrix& gplus = *shifted_plus;

    // a(x) gradient, with the explicit zero branch at [G]_+ = 0.
    const SymMatrix gpos = project_psd(*G);
    const double theta = frobenius_inner(gpos, gpos);
    Eigen::VectorXd grad_a = Eigen::VectorXd::Zero(d);
    if (theta > 0.0) {
      const double outer =
          -problem.kappa * std::pow(theta, problem.kappa - 1.0);
      for (int i = 0; i < d; ++i) {
        grad_a(i) = outer * 2.0 *
                    frobenius_inner(gpos, dG[static_cast<std::size_t>(i)]);
      }
    }
    const Eigen::VectorXd grad_p_x = grad_a / (1.0 + lam_sq);
    // d p/d lambda = -2p lambda / (1 + tr(lambda^2)).
    const Eigen::MatrixXd grad_p_lam = -2.0 * p / (1.0 + lam_sq) * lam;

    const double t1 = out.components.sdp_penalty;
    const double inner_pl = frobenius_inner(gplus, *pt.lambda);

    // x block of the matrix penalty term.
    for (int i = 0; i < d; ++i) {
      const double ds =
          2.0 * c *
              frobenius_inner(gplus, dG[static_cast<std::size_t>(i)]) +
          2.0 * grad_p_x(i) * inner_pl;
      const double dn = ds - 2.0 * p * lam_sq * grad_p_x(i);
      grad.x(i) += dn / (2.0 * c * p) - t1 * grad_p_x(i) / p;
    }

    // lambda block: penalty term plus eta term.
    const Eigen::MatrixXd grad_s_lam =
        2.0 * p * gplus.mat() + 2.0 * inner_pl * grad_p_lam;
    const Eigen::MatrixXd grad_n_lam = grad_s_lam -
                                       2.0 * p * lam_sq * grad_p_lam -
                                       2.0 * p * p * lam;
    Eigen::MatrixXd grad_lam =
        grad_n_lam / (2.0 * c * p) - t1 / p * grad_p_lam;

    for (int i = 0; i < d; ++i) {
      grad_lam += 2.0 * gL(i) * dG[static_cast<std::size_t>(i)].mat();
    }
    const Eigen::MatrixXd gsq = G->mat() * G->mat();
    grad_lam += lam * gsq + gsq * lam;
    grad.lambda = SymMatrix::from_symmetric(grad_lam);
  }

  if (has_eq) {
    grad.x += jac_h.transpose() * pt.mu;  // <mu, h> term

    const double m_sq = pt.mu.squaredNorm();
    const Eigen::VectorXd grad_b = -2.0 * jac_h.transpose() * h;
    const Eigen::VectorXd grad_q_x = grad_b / (1.0 + m_sq);
    grad.x += (c / q) * jac_h.transpose() * h -
              c * h.squaredNorm() / (2.0 * q * q) * grad_q_x;

    grad.mu += h;
    grad.mu += c * h.squaredNorm() / out.scalings.b * pt.mu;
    grad.mu += 2.0 * jac_h * gL;
  }

  if (!grad.x.allFinite() || !grad.mu.allFinite() ||
      (grad.lambda && !grad.lambda->all_finite())) {
    throw std::runtime_error("eval_auglag: non-finite gradient");
  }
  out.gradient = std::move(grad);
  return out;
}

/// Gradient of eval_auglag in the flattened extended coordinates
/// (off-diagonal multiplier coordinates carry both symmetric positions).
inline Eigen::VectorXd flatten_gradient(const NlsdpProblem& problem,
                                        const ExtendedPoint& grad) {
  Eigen::VectorXd v(extended_dim(problem));
  v.head(problem.dim) = grad.x;
  if (problem.has_sdp_block()) {
    v.segment(problem.dim, sym_coord_count(problem.sdp_dim)) =
        sym_grad_to_coords(*grad.lambda);
  }
  if (problem.has_equalities()) v.tail(problem.eq_dim) = grad.mu;
  return v;
}

}  // namespace exmerit
