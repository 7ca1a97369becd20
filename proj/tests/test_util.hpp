#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>

#include "exmerit/auglag.hpp"
#include "exmerit/problems.hpp"

namespace exmerit::test {

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline SymMatrix random_sym_matrix(Eigen::Index n, std::mt19937& rng,
                                   double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dist(rng);
  return SymMatrix::from_symmetric(m);
}

/// Rejection-samples an extended point whose primal part keeps the scaling
/// margins a(x) >= margin * alpha and b(x) >= margin * alpha.
inline ExtendedPoint random_interior_point(const NlsdpProblem& problem,
                                           std::mt19937& rng,
                                           double margin = 0.1,
                                           double box = 2.0) {
  for (int attempt = 0; attempt < 20000; ++attempt) {
    ExtendedPoint pt;
    pt.x = random_vector(problem.dim, rng, -box, box);
    if (problem.has_sdp_block()) {
      pt.lambda = random_sym_matrix(problem.sdp_dim, rng);
    }
    pt.mu = random_vector(problem.eq_dim, rng);
    const Scalings s = scalings(problem, pt);
    if (s.a >= margin * problem.alpha && s.b >= margin * problem.alpha) {
      return pt;
    }
  }
  throw std::runtime_error(problem.name +
                           ": could not sample an interior point");
}

/// Any extended point in a box, domain membership not required.
inline ExtendedPoint random_any_point(const NlsdpProblem& problem,
                                      std::mt19937& rng, double box = 2.0) {
  ExtendedPoint pt;
  pt.x = random_vector(problem.dim, rng, -box, box);
  if (problem.has_sdp_block()) {
    pt.lambda = random_sym_matrix(problem.sdp_dim, rng, box);
  }
  pt.mu = random_vector(problem.eq_dim, rng, -box, box);
  return pt;
}

inline ExtReal eval_flat(const NlsdpProblem& problem, const Eigen::VectorXd& v,
                         double c) {
  return eval_auglag(problem, unflatten_point(problem, v), c).value;
}

/// Central finite differences of the flattened merit value. Returns nullopt
/// if any probe leaves the effective domain.
inline std::optional<Eigen::VectorXd> fd_flat_gradient(
    const NlsdpProblem& problem, const Eigen::VectorXd& v, double c,
    double step = 1e-6) {
  Eigen::VectorXd g(v.size());
  Eigen::VectorXd vp = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(v(i)));
    vp(i) = v(i) + h;
    const ExtReal fp = eval_flat(problem, vp, c);
    vp(i) = v(i) - h;
    const ExtReal fm = eval_flat(problem, vp, c);
    vp(i) = v(i);
    if (!fp.is_finite() || !fm.is_finite()) return std::nullopt;
    g(i) = (fp.value() - fm.value()) / (2.0 * h);
  }
  return g;
}

inline std::vector<std::string> nlsdp_registry_names() {
  return {"scalar-lmi", "eq-quadratic", "diag2-degenerate", "box-qp-sdp",
          "nearest-corr-2"};
}

/// Unconstrained shape case (sdp_dim = 0, eq_dim = 0): min ||x||^2 on R^2.
inline NlsdpProblem make_unconstrained_quadratic() {
  NlsdpProblem problem;
  problem.name = "unconstrained-quadratic";
  problem.dim = 2;
  problem.objective = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  problem.objective_grad = [](const Eigen::VectorXd& x) {
    return (2.0 * x).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return (2.0 * Eigen::MatrixXd::Identity(2, 2)).eval();
  };
  problem.f_star = 0.0;
  ExtendedPoint sol;
  sol.x = Eigen::VectorXd::Zero(2);
  sol.mu = Eigen::VectorXd(0);
  problem.known_solutions.push_back(std::move(sol));
  return problem;
}

}  // namespace exmerit::test
