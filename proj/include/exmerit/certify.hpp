#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exmerit/auglag.hpp"
#include "exmerit/oracle.hpp"
#include "exmerit/problems.hpp"
#include "exmerit/solver.hpp"
#include "exmerit/symmat.hpp"

namespace exmerit {

/// KKT residuals of an extended point.
struct KktReport {
  double eta = 0.0;
  double stationarity = 0.0;     // ||grad_x L||
  double complementarity = 0.0;  // ||lambda G(x)||_F
  double feas_sdp = 0.0;         // ||[G(x)]_+||_F
  double feas_eq = 0.0;          // ||h(x)||
  double lambda_min_eig = 0.0;   // smallest eigenvalue of lambda (0 if none)
  bool lambda_psd = true;        // min eigenvalue >= -tol
  double tol = 0.0;              // threshold used for the PSD verdict
};

inline KktReport kkt_check(const NlsdpProblem& problem, const ExtendedPoint& pt,
                           double tol = 1e-8) {
  check_problem(problem);
  check_point(problem, pt);
  KktReport report;
  report.tol = tol;
  report.eta = eta_residual(problem, pt);
  report.stationarity = grad_x_lagrangian(problem, pt).norm();
  if (problem.has_sdp_block()) {
    const SymMatrix constraint = problem.constraint(pt.x);
    report.complementarity =
        (pt.lambda->mat() * constraint.mat()).norm();
    report.feas_sdp = project_psd(constraint).frobenius_norm();
    report.lambda_min_eig = eig_sym(*pt.lambda).eigenvalues(0);
    report.lambda_psd = report.lambda_min_eig >= -tol;
  }
  if (problem.has_equalities()) {
    report.feas_eq = problem.equality(pt.x).norm();
  }
  return report;
}

inline bool kkt_passes(const KktReport& r, double tol) {
  return r.eta <= tol && r.feas_sdp <= tol && r.feas_eq <= tol && r.lambda_psd;
}

/// Outcome of the linear-independence (nondegeneracy) rank test.
struct NondegeneracyReport {
  bool nondegenerate = false;
  Eigen::Index constraint_rank = 0;   // r = rank G(x*)
  Eigen::Index vectors_required = 0;  // (l-r)(l-r+1)/2 + s
  bool count_exceeds_dim = false;
  double sigma_min = std::numeric_limits<double>::infinity();
  Eigen::VectorXd singular_values;  // of the stacked test matrix
  double rank_tol = 0.0;
};

namespace detail {

/// Core of the nondegeneracy test with an externally supplied null basis,
/// so that invariance under re-orthonormalization can be exercised directly.
inline NondegeneracyReport nondegeneracy_with_basis(
    const NlsdpProblem& problem, const Eigen::VectorXd& x_star,
    const Eigen::MatrixXd& null_space_basis, Eigen::Index constraint_rank,
    double rank_tol) {
  NondegeneracyReport report;
  report.rank_tol = rank_tol;
  report.constraint_rank = constraint_rank;

  const Eigen::Index null_dim = null_space_basis.cols();
  const Eigen::Index count =
      null_dim * (null_dim + 1) / 2 + problem.eq_dim;
  report.vectors_required = count;

  if (count == 0) {
    // Empty collection: vacuously independent.
    report.nondegenerate = true;
    return report;
  }
  if (count > problem.dim) {
    report.count_exceeds_dim = true;
    report.nondegenerate = false;
    report.sigma_min = 0.0;
    return report;
  }

  Eigen::MatrixXd stacked(count, problem.dim);
  Eigen::Index row = 0;
  if (null_dim > 0) {
    const std::vector<SymMatrix> parts = problem.constraint_jac(x_star);
    for (Eigen::Index i = 0; i < null_dim; ++i) {
      for (Eigen::Index j = i; j < null_dim; ++j) {
        for (int k = 0; k < problem.dim; ++k) {
          stacked(row, k) = null_space_basis.col(i).dot(
              parts[static_cast<std::size_t>(k)].mat() *
              null_space_basis.col(j));
        }
        ++row;
      }
    }
  }
  if (problem.has_equalities()) {
    stacked.bottomRows(problem.eq_dim) = problem.equality_jac(x_star);
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  report.singular_values = svd.singularValues();
  report.sigma_min = report.singular_values(report.singular_values.size() - 1);
  report.nondegenerate = report.sigma_min > rank_tol;
  return report;
}

}  // namespace detail

/// Tests whether x_star is a nondegenerate point: the vectors
/// v_ij = (e_i^T dG/dx_1 e_j, ..., e_i^T dG/dx_d e_j), 1 <= i <= j <= l - r,
/// taken over a null basis e_1..e_{l-r} of G(x_star), stacked with the
/// equality gradients, must be linearly independent. Decided by the smallest
/// singular value of the stacked matrix; an immediate FAIL when the
/// collection has more vectors than the primal dimension.
inline NondegeneracyReport nondegeneracy_test(const NlsdpProblem& problem,
                                              const Eigen::VectorXd& x_star,
                                              double rank_tol = kDefaultRankTol) {
  check_problem(problem);
  if (!x_star.allFinite()) {
    throw std::invalid_argument("nondegeneracy_test: non-finite point");
  }
  Eigen::MatrixXd basis(0, 0);
  Eigen::Index rank = 0;
  if (problem.has_sdp_block()) {
    const NullBasis nb = null_basis(problem.constraint(x_star), rank_tol);
    basis = nb.basis;
    rank = nb.rank;
  }
  return detail::nondegeneracy_with_basis(problem, x_star, basis, rank,
                                          rank_tol);
}

enum class SoscVerdict { pass, pass_vacuous, fail };

inline const char* sosc_verdict_name(SoscVerdict v) {
  switch (v) {
    case SoscVerdict::pass: return "pass";
    case SoscVerdict::pass_vacuous: return "pass-vacuous";
    case SoscVerdict::fail: return "fail";
  }
  return "unknown";
}

struct SoscReport {
  SoscVerdict verdict = SoscVerdict::pass_vacuous;
  std::string method = "sampled";  // direction sampling, not copositivity
  double min_curvature = std::numeric_limits<double>::infinity();
  int directions_tested = 0;
  Eigen::Index equality_null_dim = 0;
  Eigen::MatrixXd theta;  // the second-order matrix, for the record
  double tol = 0.0;
};

/// Second-order sufficient condition check at a KKT triple: the matrix
///
///   Theta = hess_x L - 2 [trace(lambda (dG/dx_i) G^+ (dG/dx_j))]_ij
///
/// must satisfy <v, Theta v> >= tol ||v||^2 on the critical cone
///   { v | sum_i v_i E0^T (dG/dx_i) E0 <= 0,  grad h v = 0,  <grad f, v> = 0 }.
/// Directions are drawn from the null space of the linear equalities
/// (deterministic sweep plus seeded random samples) and filtered by the
/// matrix-inequality membership test; the verdict is a sampled check, not a
/// copositivity proof. PASS-vacuous when no nonzero direction survives.
inline SoscReport sosc_check(const NlsdpProblem& problem,
                             const ExtendedPoint& xi_star, double tol = 1e-8,
                             int num_directions = 64, unsigned seed = 0,
                             double rank_tol = kDefaultRankTol) {
  const KktReport kkt = kkt_check(problem, xi_star, tol);
  if (!kkt_passes(kkt, tol)) {
    throw std::invalid_argument(
        "sosc_check: point fails the KKT residual check (eta = " +
        std::to_string(kkt.eta) + ")");
  }
  SoscReport report;
  report.tol = tol;

  const int d = problem.dim;
  Eigen::MatrixXd theta = lagrangian_hessian_x(problem, xi_star);
  std::vector<SymMatrix> parts;
  Eigen::MatrixXd null_space_basis(0, 0);
  if (problem.has_sdp_block()) {
    const SymMatrix constraint = problem.constraint(xi_star.x);
    const SymMatrix pinv = pseudoinverse(constraint, rank_tol);
    parts = problem.constraint_jac(xi_star.x);
    for (int i = 0; i < d; ++i) {
      const Eigen::MatrixXd gi_pinv =
          parts[static_cast<std::size_t>(i)].mat() * pinv.mat();
      for (int j = 0; j < d; ++j) {
        theta(i, j) -=
            2.0 * (xi_star.lambda->mat() *
                   (gi_pinv * parts[static_cast<std::size_t>(j)].mat()))
                      .trace();
      }
    }
    null_space_basis = null_basis(constraint, rank_tol).basis;
  }
  theta = 0.5 * (theta + theta.transpose());
  report.theta = theta;

  // Null space of the cone's linear equalities: grad h rows and grad f.
  Eigen::MatrixXd equalities(problem.eq_dim + 1, d);
  if (problem.has_equalities()) {
    equalities.topRows(problem.eq_dim) = problem.equality_jac(xi_star.x);
  }
  equalities.bottomRows(1) = problem.objective_grad(xi_star.x).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(equalities, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = 1e-12 * std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
  Eigen::Index eq_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++eq_rank;
  }
  const Eigen::Index null_dim = d - eq_rank;
  report.equality_null_dim = null_dim;
  if (null_dim == 0) {
    report.verdict = SoscVerdict::pass_vacuous;
    return report;
  }
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(null_dim);

  // Membership in the matrix-inequality part of the cone.
  const auto in_cone = [&](const Eigen::VectorXd& v) {
    if (null_space_basis.cols() == 0) return true;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(null_space_basis.cols(),
                                              null_space_basis.cols());
    for (int i = 0; i < d; ++i) {
      m += v(i) * (null_space_basis.transpose() *
                   parts[static_cast<std::size_t>(i)].mat() *
                   null_space_basis);
    }
    const EigDecomp e = eig_sym(SymMatrix::from_symmetric(m));
    return e.eigenvalues(e.eigenvalues.size() - 1) <= tol;
  };

  std::vector<Eigen::VectorXd> directions;
  for (Eigen::Index i = 0; i < null_dim; ++i) {
    directions.push_back(kernel.col(i));
    directions.push_back(-kernel.col(i));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < num_directions; ++i) {
    Eigen::VectorXd z(null_dim);
    for (Eigen::Index k = 0; k < null_dim; ++k) z(k) = normal(rng);
    const Eigen::VectorXd v = kernel * z;
    if (v.norm() > 1e-12) directions.push_back(v.normalized());
  }

  bool any_tested = false;
  bool all_positive = true;
  for (const Eigen::VectorXd& v : directions) {
    if (!in_cone(v)) continue;
    any_tested = true;
    const double curvature = v.dot(theta * v) / v.squaredNorm();
    report.min_curvature = std::min(report.min_curvature, curvature);
    ++report.directions_tested;
    if (curvature < tol) all_positive = false;
  }
  if (!any_tested) {
    report.verdict = SoscVerdict::pass_vacuous;
  } else {
    report.verdict = all_positive ? SoscVerdict::pass : SoscVerdict::fail;
  }
  return report;
}

/// Aggregate certification record for an extended point; thresholds used for
/// every verdict are part of the record.
struct CertificationReport {
  std::string problem;
  KktReport kkt;
  NondegeneracyReport nondegeneracy;
  SoscReport sosc;
  std::vector<std::string> notes;
};

inline CertificationReport certify_point(const NlsdpProblem& problem,
                                         const ExtendedPoint& xi,
                                         double tol = 1e-8,
                                         double rank_tol = kDefaultRankTol) {
  CertificationReport report;
  report.problem = problem.name;
  report.kkt = kkt_check(problem, xi, tol);
  report.nondegeneracy = nondegeneracy_test(problem, xi.x, rank_tol);
  if (kkt_passes(report.kkt, tol)) {
    report.sosc = sosc_check(problem, xi, tol, 64, 0, rank_tol);
  } else {
    report.notes.push_back("sosc skipped: KKT residuals above tolerance");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Empirical hypothesis checks behind global extended exactness.
// ---------------------------------------------------------------------------

struct ProbeConfig {
  std::vector<double> radii = {1e-1, 1e-2, 1e-3};
  int samples_per_radius = 50;
  unsigned seed = 0;
  double norm_bound = 1e3;  // box for the boundedness verdict
};

struct LocalProbeResult {
  Eigen::VectorXd center;  // flattened KKT pair
  bool is_local_min = true;
  double worst_violation = 0.0;
  int samples = 0;
};

/// Empirical report on the hypotheses behind global extended exactness:
/// bounded minimizer sequences, feasibility with vanishing eta at the last
/// stage, and local minimality of the merit around registered KKT pairs.
struct ExactnessReport {
  SolveTrace trace;
  double max_minimizer_norm = 0.0;
  double norm_bound = 0.0;
  bool minimizers_bounded = false;
  double final_eta = 0.0;
  double final_feas_sdp = 0.0;
  double final_feas_eq = 0.0;
  bool cluster_feasible = false;  // penalty-type evidence
  double probe_c = 0.0;
  std::vector<LocalProbeResult> local_probes;
  bool local_exactness = true;

  bool all_pass() const {
    return minimizers_bounded && cluster_feasible && local_exactness;
  }
};

inline ExactnessReport exactness_sweep(const NlsdpProblem& problem,
                                       const ExtendedPoint& start,
                                       const SolverConfig& config,
                                       const ProbeConfig& probe = {}) {
  ExactnessReport report;
  report.trace = continuation_solve(problem, start, config);
  report.norm_bound = probe.norm_bound;

  for (const StageRecord& stage : report.trace.stages) {
    report.max_minimizer_norm =
        std::max(report.max_minimizer_norm,
                 flatten_point(problem, stage.minimizer).norm());
  }
  report.minimizers_bounded =
      !report.trace.stages.empty() &&
      report.max_minimizer_norm <= probe.norm_bound;

  if (!report.trace.stages.empty()) {
    const StageRecord& last = report.trace.stages.back();
    report.final_eta = last.eta;
    report.final_feas_sdp = last.feas_sdp;
    report.final_feas_eq = last.feas_eq;
    report.cluster_feasible = last.eta <= config.eta_tol &&
                              last.feas_sdp <= config.feas_tol &&
                              last.feas_eq <= config.feas_tol;
    report.probe_c = last.c;
  } else {
    report.probe_c = config.c_schedule.initial;
  }

  // Local-exactness probe around every registered KKT pair at the largest
  // stage c: merit values in shrinking neighbourhoods must not undercut the
  // value at the pair itself.
  std::mt19937_64 rng(probe.seed);
  std::normal_distribution<double> normal;
  for (const ExtendedPoint& sol : problem.known_solutions) {
    LocalProbeResult result;
    const Eigen::VectorXd center = flatten_point(problem, sol);
    result.center = center;
    const ExtReal base = eval_auglag(problem, sol, report.probe_c).value;
    if (!base.is_finite()) {
      result.is_local_min = false;
      report.local_exactness = false;
      report.local_probes.push_back(std::move(result));
      continue;
    }
    const double slack = 1e-9 * (1.0 + std::abs(base.value()));
    for (const double radius : probe.radii) {
      for (int s = 0; s < probe.samples_per_radius; ++s) {
        Eigen::VectorXd dir(center.size());
        for (Eigen::Index k = 0; k < center.size(); ++k) dir(k) = normal(rng);
        if (dir.norm() < 1e-12) continue;
        const Eigen::VectorXd sample = center + radius * dir.normalized();
        const ExtReal value =
            eval_auglag(problem, unflatten_point(problem, sample),
                        report.probe_c)
                .value;
        ++result.samples;
        if (value.is_finite() && value.value() < base.value() - slack) {
          result.is_local_min = false;
          result.worst_violation = std::max(
              result.worst_violation, base.value() - value.value());
        }
      }
    }
    if (!result.is_local_min) report.local_exactness = false;
    report.local_probes.push_back(std::move(result));
  }
  return report;
}

enum class ProbeVerdict { no_counterexample, counterexample_found, inconclusive };

inline const char* probe_verdict_name(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::no_counterexample: return "no-counterexample-found";
    case ProbeVerdict::counterexample_found: return "counterexample-found";
    case ProbeVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct SublevelReport {
  ProbeVerdict verdict = ProbeVerdict::inconclusive;
  int samples = 0;
  int counterexample_count = 0;
  std::vector<Eigen::VectorXd> counterexamples;  // first few, flattened
  double c0 = 0.0;
};

/// Screens the sublevel-boundedness hypothesis: samples the enlarged box
/// (double halfwidth) uniformly and reports any sample outside the reference
/// box whose merit value undercuts f_star. A screen, not a proof.
inline SublevelReport sublevel_probe(const NlsdpProblem& problem, double c0,
                                     const Box& box, int samples,
                                     unsigned seed = 0) {
  if (!problem.f_star.has_value()) {
    throw std::invalid_argument("sublevel_probe: f_star must be known");
  }
  if (box.dims() != extended_dim(problem)) {
    throw std::invalid_argument(
        "sublevel_probe: box must cover the flattened extended space");
  }
  SublevelReport report;
  report.c0 = c0;
  report.samples = samples;
  if (samples <= 0) {
    report.verdict = ProbeVerdict::inconclusive;
    return report;
  }

  const Eigen::VectorXd center = 0.5 * (box.lo + box.hi);
  const Eigen::VectorXd halfwidth = 0.5 * (box.hi - box.lo);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd v(box.dims());
    for (Eigen::Index k = 0; k < box.dims(); ++k) {
      v(k) = center(k) + 2.0 * halfwidth(k) * unit(rng);
    }
    const bool inside_reference =
        (v.array() >= box.lo.array()).all() &&
        (v.array() <= box.hi.array()).all();
    if (inside_reference) continue;
    const ExtReal value =
        eval_auglag(problem, unflatten_point(problem, v), c0).value;
    if (value.is_finite() && value.value() < *problem.f_star) {
      ++report.counterexample_count;
      if (report.counterexamples.size() < 10) {
        report.counterexamples.push_back(v);
      }
    }
  }
  report.verdict = report.counterexample_count == 0
                       ? ProbeVerdict::no_counterexample
                       : ProbeVerdict::counterexample_found;
  return report;
}

}  // namespace exmerit
