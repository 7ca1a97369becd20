#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "exmerit/ext_real.hpp"
#include "exmerit/symmat.hpp"

namespace exmerit {

/// Primal-dual point of the extended space: primal vector, matrix multiplier
/// for the semidefinite block (absent when the problem has none) and the
/// equality multiplier (empty when the problem has no equalities).
struct ExtendedPoint {
  Eigen::VectorXd x;
  std::optional<SymMatrix> lambda;
  Eigen::VectorXd mu;
};

/// Nonlinear semidefinite program
///
///   min f(x)  subject to  G(x) <= 0 (semidefinite order),  h(x) = 0,
///
/// together with the merit-function parameters alpha > 0 and kappa > 1.
/// Second derivatives are optional; evaluators that need them fall back to
/// finite differences of the gradients (step 1e-5).
struct NlsdpProblem {
  std::string name;
  int dim = 0;      // primal dimension
  int sdp_dim = 0;  // order of the matrix constraint block, 0 = none
  int eq_dim = 0;   // number of equality constraints, 0 = none
  double alpha = 1.0;
  double kappa = 2.0;

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> objective_grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> objective_hess;

  // Matrix constraint G and its partial derivatives per primal coordinate.
  std::function<SymMatrix(const Eigen::VectorXd&)> constraint;
  std::function<std::vector<SymMatrix>(const Eigen::VectorXd&)>
      constraint_jac;
  // (x, lambda) -> [trace(lambda * d^2 G / dx_i dx_j)]_ij, optional.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const SymMatrix&)>
      constraint_hess_contracted;

  // Equality constraints h and Jacobian (rows = constraints).
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> equality;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> equality_jac;
  // (x, mu) -> sum_k mu_k * hess h_k, optional.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      equality_hess_contracted;

  std::optional<double> f_star;
  std::vector<ExtendedPoint> known_solutions;

  bool has_sdp_block() const { return sdp_dim > 0; }
  bool has_equalities() const { return eq_dim > 0; }
};

/// Scalar function with an optional derivative, used for the penalty shapes.
struct ScalarFunc {
  std::function<double(double)> value;
  std::function<double(double)> deriv;  // may be empty
};

inline ScalarFunc identity_func() {
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

/// Problem in the single-valued penalty form: min f(x) subject to g(x) = 0,
/// with shift vector w and nondecreasing shape functions phi, omega that
/// vanish exactly at zero.
struct SingularPenaltyProblem {
  std::string name;
  int dim = 0;             // primal dimension
  int constraint_dim = 0;  // size of g(x)

  std::function<ExtReal(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> objective_grad;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> constraint;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> constraint_jac;

  Eigen::VectorXd shift;  // w
  ScalarFunc phi = identity_func();
  ScalarFunc omega = identity_func();

  std::optional<double> f_star;
  std::vector<Eigen::VectorXd> known_solutions;
};

/// Spot-checks the shape functions on a grid: phi and omega must vanish at 0
/// and be strictly positive at sampled t > 0.
inline void validate_penalty_shapes(const SingularPenaltyProblem& problem,
                                    double t_max = 1.0, int samples = 32) {
  const auto check = [&](const ScalarFunc& shape, const char* label) {
    if (shape.value(0.0) != 0.0) {
      throw std::invalid_argument(problem.name + ": " + label +
                                  "(0) must be 0");
    }
    for (int i = 1; i <= samples; ++i) {
      const double t = t_max * i / samples;
      if (!(shape.value(t) > 0.0)) {
        throw std::invalid_argument(problem.name + ": " + label + "(" +
                                    std::to_string(t) + ") must be > 0");
      }
    }
  };
  check(problem.phi, "phi");
  check(problem.omega, "omega");
}

/// Throws unless the problem's structural invariants hold.
inline void check_problem(const NlsdpProblem& problem) {
  if (problem.dim < 1) {
    throw std::invalid_argument(problem.name + ": dim must be >= 1");
  }
  if (problem.sdp_dim < 0 || problem.eq_dim < 0) {
    throw std::invalid_argument(problem.name + ": negative block dimension");
  }
  if (!(problem.alpha > 0.0)) {
    throw std::invalid_argument(problem.name + ": alpha must be > 0");
  }
  if (!(problem.kappa > 1.0)) {
    throw std::invalid_argument(problem.name + ": kappa must be > 1");
  }
  if (!problem.objective || !problem.objective_grad) {
    throw std::invalid_argument(problem.name + ": objective callbacks missing");
  }
  if (problem.has_sdp_block() &&
      (!problem.constraint || !problem.constraint_jac)) {
    throw std::invalid_argument(problem.name + ": constraint callbacks missing");
  }
  if (problem.has_equalities() &&
      (!problem.equality || !problem.equality_jac)) {
    throw std::invalid_argument(problem.name + ": equality callbacks missing");
  }
}

inline void check_point(const NlsdpProblem& problem, const ExtendedPoint& pt) {
  if (pt.x.size() != problem.dim) {
    throw std::invalid_argument(problem.name + ": primal dimension mismatch");
  }
  if (problem.has_sdp_block()) {
    if (!pt.lambda || pt.lambda->dim() != problem.sdp_dim) {
      throw std::invalid_argument(problem.name +
                                  ": multiplier dimension mismatch");
    }
  } else if (pt.lambda) {
    throw std::invalid_argument(problem.name +
                                ": multiplier given but sdp_dim == 0");
  }
  if (pt.mu.size() != problem.eq_dim) {
    throw std::invalid_argument(problem.name +
                                ": equality multiplier dimension mismatch");
  }
}

// ---------------------------------------------------------------------------
// Flattened coordinates of the extended space.
//
// Layout: [x (dim) | upper triangle of lambda, row-major (l(l+1)/2) | mu (s)].
// Off-diagonal entries of lambda appear once; a gradient with respect to a
// flattened off-diagonal coordinate is therefore twice the matrix-gradient
// entry.
// ---------------------------------------------------------------------------

inline Eigen::Index sym_coord_count(Eigen::Index l) { return l * (l + 1) / 2; }

inline Eigen::VectorXd sym_to_coords(const SymMatrix& a) {
  Eigen::VectorXd v(sym_coord_count(a.dim()));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    for (Eigen::Index j = i; j < a.dim(); ++j) v(k++) = a(i, j);
  return v;
}

inline SymMatrix coords_to_sym(const Eigen::VectorXd& v, Eigen::Index l) {
  if (v.size() != sym_coord_count(l)) {
    throw std::invalid_argument("coords_to_sym: coordinate count mismatch");
  }
  Eigen::MatrixXd m(l, l);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i; j < l; ++j) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  }
  return SymMatrix::from_symmetric(m);
}

/// Matrix gradient -> gradient in the flattened coordinates (off-diagonal
/// entries doubled, since each one carries both symmetric positions).
inline Eigen::VectorXd sym_grad_to_coords(const SymMatrix& g) {
  Eigen::VectorXd v(sym_coord_count(g.dim()));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < g.dim(); ++i)
    for (Eigen::Index j = i; j < g.dim(); ++j)
      v(k++) = (i == j) ? g(i, j) : 2.0 * g(i, j);
  return v;
}

inline Eigen::Index extended_dim(const NlsdpProblem& problem) {
  return problem.dim + sym_coord_count(problem.sdp_dim) + problem.eq_dim;
}

inline Eigen::VectorXd flatten_point(const NlsdpProblem& problem,
                                     const ExtendedPoint& pt) {
  check_point(problem, pt);
  Eigen::VectorXd v(extended_dim(problem));
  v.head(problem.dim) = pt.x;
  if (problem.has_sdp_block()) {
    v.segment(problem.dim, sym_coord_count(problem.sdp_dim)) =
        sym_to_coords(*pt.lambda);
  }
  if (problem.has_equalities()) v.tail(problem.eq_dim) = pt.mu;
  return v;
}

inline ExtendedPoint unflatten_point(const NlsdpProblem& problem,
                                     const Eigen::VectorXd& v) {
  if (v.size() != extended_dim(problem)) {
    throw std::invalid_argument("unflatten_point: coordinate count mismatch");
  }
  ExtendedPoint pt;
  pt.x = v.head(problem.dim);
  if (problem.has_sdp_block()) {
    pt.lambda = coords_to_sym(
        v.segment(problem.dim, sym_coord_count(problem.sdp_dim)),
        problem.sdp_dim);
  }
  pt.mu = v.tail(problem.eq_dim);
  return pt;
}

/// Zero starting point of the extended space.
inline ExtendedPoint zero_point(const NlsdpProblem& problem) {
  ExtendedPoint pt;
  pt.x = Eigen::VectorXd::Zero(problem.dim);
  if (problem.has_sdp_block()) pt.lambda = SymMatrix::zero(problem.sdp_dim);
  pt.mu = Eigen::VectorXd::Zero(problem.eq_dim);
  return pt;
}

// ---------------------------------------------------------------------------
// Central finite differences (shared fallback machinery).
// ---------------------------------------------------------------------------

namespace fd {

inline Eigen::VectorXd gradient(
    const std::function<double(const Eigen::VectorXd&)>& func,
    const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = func(xp);
    xp(i) = x(i) - h;
    const double fm = func(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Jacobian with rows = outputs, columns = inputs.
inline Eigen::MatrixXd jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& func,
    const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd xp = x;
  Eigen::MatrixXd j;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const Eigen::VectorXd fp = func(xp);
    xp(i) = x(i) - h;
    const Eigen::VectorXd fm = func(xp);
    xp(i) = x(i);
    if (j.size() == 0) j.resize(fp.size(), x.size());
    j.col(i) = (fp - fm) / (2.0 * h);
  }
  return j;
}

}  // namespace fd

// ---------------------------------------------------------------------------
// Derivative validation.
// ---------------------------------------------------------------------------

struct DerivativeCheck {
  double max_rel_error = 0.0;
  std::string worst_entry;
};

struct DerivativeReport {
  DerivativeCheck objective;
  DerivativeCheck constraint;
  DerivativeCheck equality;

  double max_rel_error() const {
    return std::max({objective.max_rel_error, constraint.max_rel_error,
                     equality.max_rel_error});
  }
};

/// Compares the analytic first derivatives of f, G and h against central
/// finite differences at x. Reports the worst entry per callback.
inline DerivativeReport validate_derivatives(const NlsdpProblem& problem,
                                             const Eigen::VectorXd& x,
                                             double step) {
  check_problem(problem);
  if (!x.allFinite()) {
    throw std::invalid_argument("validate_derivatives: non-finite point");
  }
  if (!(step > 0.0)) {
    throw std::invalid_argument("validate_derivatives: step must be > 0");
  }

  const auto rel = [](double analytic, double approx) {
    return std::abs(analytic - approx) / std::max(1.0, std::abs(approx));
  };
  DerivativeReport report;

  {
    const Eigen::VectorXd analytic = problem.objective_grad(x);
    const Eigen::VectorXd approx = fd::gradient(problem.objective, x, step);
    if (!analytic.allFinite() || !approx.allFinite()) {
      throw std::runtime_error(
          "validate_derivatives: non-finite evaluation from objective");
    }
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      const double e = rel(analytic(i), approx(i));
      if (e >= report.objective.max_rel_error) {
        report.objective.max_rel_error = e;
        report.objective.worst_entry = "grad[" + std::to_string(i) + "]";
      }
    }
  }

  if (problem.has_sdp_block()) {
    const std::vector<SymMatrix> analytic = problem.constraint_jac(x);
    for (int i = 0; i < problem.dim; ++i) {
      for (int r = 0; r < problem.sdp_dim; ++r) {
        for (int c = r; c < problem.sdp_dim; ++c) {
          const auto entry = [&problem, r, c](const Eigen::VectorXd& y) {
            return problem.constraint(y)(r, c);
          };
          const double approx = fd::gradient(entry, x, step)(i);
          if (!std::isfinite(approx) || !std::isfinite(analytic[i](r, c))) {
            throw std::runtime_error(
                "validate_derivatives: non-finite evaluation from constraint");
          }
          const double e = rel(analytic[i](r, c), approx);
          if (e >= report.constraint.max_rel_error) {
            report.constraint.max_rel_error = e;
            std::ostringstream oss;
            oss << "dG/dx" << i << "(" << r << "," << c << ")";
            report.constraint.worst_entry = oss.str();
          }
        }
      }
    }
  }

  if (problem.has_equalities()) {
    const Eigen::MatrixXd analytic = problem.equality_jac(x);
    const Eigen::MatrixXd approx = fd::jacobian(problem.equality, x, step);
    if (!analytic.allFinite() || !approx.allFinite()) {
      throw std::runtime_error(
          "validate_derivatives: non-finite evaluation from equality");
    }
    for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
      for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
        const double e = rel(analytic(r, c), approx(r, c));
        if (e >= report.equality.max_rel_error) {
          report.equality.max_rel_error = e;
          std::ostringstream oss;
          oss << "dh" << r << "/dx" << c;
          report.equality.worst_entry = oss.str();
        }
      }
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Registry of built-in desk-scale instances.
// ---------------------------------------------------------------------------

using Params = std::map<std::string, double>;
using AnyProblem = std::variant<NlsdpProblem, SingularPenaltyProblem>;

enum class ProblemKind { nlsdp, penalty };

struct ProblemRegistryEntry {
  std::string name;
  ProblemKind kind;
  std::function<AnyProblem(const Params&)> builder;
  std::string documentation;
};

namespace detail {

inline double param_or(const Params& params, const std::string& key,
                       double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

inline void reject_unknown_params(const std::string& name,
                                  const Params& params,
                                  const std::vector<std::string>& known) {
  for (const auto& [key, value] : params) {
    (void)value;
    bool ok = false;
    for (const auto& k : known) {
      if (k == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      std::string msg = name + ": unknown parameter '" + key + "'; valid:";
      for (const auto& k : known) msg += " " + k;
      throw std::invalid_argument(msg);
    }
  }
}

inline void apply_merit_params(NlsdpProblem& problem, const Params& params) {
  problem.alpha = param_or(params, "alpha", 1.0);
  problem.kappa = param_or(params, "kappa", 2.0);
}

inline NlsdpProblem build_scalar_lmi(const Params& params);
inline NlsdpProblem build_eq_quadratic(const Params& params);
inline NlsdpProblem build_diag2_degenerate(const Params& params);
inline NlsdpProblem build_box_qp_sdp(const Params& params);
inline NlsdpProblem build_nearest_corr_2(const Params& params);
inline SingularPenaltyProblem build_eq_linear(const Params& params);

inline const std::vector<ProblemRegistryEntry>& registry() {
  static const std::vector<ProblemRegistryEntry> entries = {
      {"scalar-lmi", ProblemKind::nlsdp,
       [](const Params& p) { return AnyProblem(build_scalar_lmi(p)); },
       "min x subject to -x <= 0 (1x1 matrix constraint); solution x*=0, "
       "multiplier 1"},
      {"eq-quadratic", ProblemKind::nlsdp,
       [](const Params& p) { return AnyProblem(build_eq_quadratic(p)); },
       "min x^2 subject to x - 1 = 0; solution x*=1, multiplier -2"},
      {"diag2-degenerate", ProblemKind::nlsdp,
       [](const Params& p) { return AnyProblem(build_diag2_degenerate(p)); },
       "min x1+x2 subject to -diag(x) <= 0; optimum (0,0) is degenerate"},
      {"box-qp-sdp", ProblemKind::nlsdp,
       [](const Params& p) { return AnyProblem(build_box_qp_sdp(p)); },
       "min ||x - x0||^2 subject to -diag(x) <= 0 with d = l = 3; solution "
       "projects x0 onto the nonnegative orthant (params x0_1, x0_2, x0_3)"},
      {"nearest-corr-2", ProblemKind::nlsdp,
       [](const Params& p) { return AnyProblem(build_nearest_corr_2(p)); },
       "nearest correlation-like 2x2 instance: min ||X - C||_F^2 over "
       "symmetric X >= 0 with unit diagonal (param c12)"},
      {"eq-linear", ProblemKind::penalty,
       [](const Params& p) { return AnyProblem(build_eq_linear(p)); },
       "penalty form: min x subject to x = 0 with phi = omega = id, w = 1"},
  };
  return entries;
}

}  // namespace detail

inline std::vector<std::string> registry_names() {
  std::vector<std::string> names;
  for (const auto& e : detail::registry()) names.push_back(e.name);
  return names;
}

inline const ProblemRegistryEntry& registry_entry(const std::string& name) {
  for (const auto& e : detail::registry()) {
    if (e.name == name) return e;
  }
  std::string msg = "unknown problem '" + name + "'; available:";
  for (const auto& e : detail::registry()) msg += " " + e.name;
  throw std::invalid_argument(msg);
}

inline AnyProblem registry_get(const std::string& name,
                               const Params& params = {}) {
  return registry_entry(name).builder(params);
}

inline NlsdpProblem registry_get_nlsdp(const std::string& name,
                                       const Params& params = {}) {
  AnyProblem any = registry_get(name, params);
  if (auto* p = std::get_if<NlsdpProblem>(&any)) return std::move(*p);
  throw std::invalid_argument(name + " is a penalty-form problem");
}

inline SingularPenaltyProblem registry_get_penalty(const std::string& name,
                                                   const Params& params = {}) {
  AnyProblem any = registry_get(name, params);
  if (auto* p = std::get_if<SingularPenaltyProblem>(&any)) {
    return std::move(*p);
  }
  throw std::invalid_argument(name + " is a nonlinear SDP problem");
}

// ---------------------------------------------------------------------------
// Built-in instances.
// ---------------------------------------------------------------------------

namespace detail {

inline NlsdpProblem build_scalar_lmi(const Params& params) {
  reject_unknown_params("scalar-lmi", params, {"alpha", "kappa"});
  NlsdpProblem problem;
  problem.name = "scalar-lmi";
  problem.dim = 1;
  problem.sdp_dim = 1;
  problem.eq_dim = 0;
  apply_merit_params(problem, params);

  problem.objective = [](const Eigen::VectorXd& x) { return x(0); };
  problem.objective_grad = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(1).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.constraint = [](const Eigen::VectorXd& x) {
    return SymMatrix::diagonal(Eigen::VectorXd::Constant(1, -x(0)));
  };
  problem.constraint_jac = [](const Eigen::VectorXd&) {
    return std::vector<SymMatrix>{
        SymMatrix::diagonal(Eigen::VectorXd::Constant(1, -1.0))};
  };
  problem.constraint_hess_contracted = [](const Eigen::VectorXd&,
                                          const SymMatrix&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };

  problem.f_star = 0.0;
  ExtendedPoint sol;
  sol.x = Eigen::VectorXd::Zero(1);
  sol.lambda = SymMatrix::identity(1);
  sol.mu = Eigen::VectorXd(0);
  problem.known_solutions.push_back(std::move(sol));
  check_problem(problem);
  return problem;
}

inline NlsdpProblem build_eq_quadratic(const Params& params) {
  reject_unknown_params("eq-quadratic", params, {"alpha", "kappa"});
  NlsdpProblem problem;
  problem.name = "eq-quadratic";
  problem.dim = 1;
  problem.sdp_dim = 0;
  problem.eq_dim = 1;
  apply_merit_params(problem, params);

  problem.objective = [](const Eigen::VectorXd& x) { return x(0) * x(0); };
  problem.objective_grad = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, 2.0 * x(0)).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, 2.0).eval();
  };
  problem.equality = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, x(0) - 1.0).eval();
  };
  problem.equality_jac = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Ones(1, 1).eval();
  };
  problem.equality_hess_contracted = [](const Eigen::VectorXd&,
                                        const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };

  problem.f_star = 1.0;
  ExtendedPoint sol;
  sol.x = Eigen::VectorXd::Ones(1);
  sol.mu = Eigen::VectorXd::Constant(1, -2.0);
  problem.known_solutions.push_back(std::move(sol));
  check_problem(problem);
  return problem;
}

inline NlsdpProblem build_diag2_degenerate(const Params& params) {
  reject_unknown_params("diag2-degenerate", params, {"alpha", "kappa"});
  NlsdpProblem problem;
  problem.name = "diag2-degenerate";
  problem.dim = 2;
  problem.sdp_dim = 2;
  problem.eq_dim = 0;
  apply_merit_params(problem, params);

  problem.objective = [](const Eigen::VectorXd& x) { return x.sum(); };
  problem.objective_grad = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(2).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(2, 2).eval();
  };
  problem.constraint = [](const Eigen::VectorXd& x) {
    return SymMatrix::diagonal(-x);
  };
  problem.constraint_jac = [](const Eigen::VectorXd&) {
    std::vector<SymMatrix> parts;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(2);
      d(i) = -1.0;
      parts.push_back(SymMatrix::diagonal(d));
    }
    return parts;
  };
  problem.constraint_hess_contracted = [](const Eigen::VectorXd&,
                                          const SymMatrix&) {
    return Eigen::MatrixXd::Zero(2, 2).eval();
  };

  problem.f_star = 0.0;
  ExtendedPoint sol;
  sol.x = Eigen::VectorXd::Zero(2);
  sol.lambda = SymMatrix::identity(2);
  sol.mu = Eigen::VectorXd(0);
  problem.known_solutions.push_back(std::move(sol));
  check_problem(problem);
  return problem;
}

inline NlsdpProblem build_box_qp_sdp(const Params& params) {
  reject_unknown_params("box-qp-sdp", params,
                        {"alpha", "kappa", "x0_1", "x0_2", "x0_3"});
  NlsdpProblem problem;
  problem.name = "box-qp-sdp";
  problem.dim = 3;
  problem.sdp_dim = 3;
  problem.eq_dim = 0;
  apply_merit_params(problem, params);

  Eigen::Vector3d x0(param_or(params, "x0_1", 1.0),
                     param_or(params, "x0_2", -1.0),
                     param_or(params, "x0_3", 0.5));

  problem.objective = [x0](const Eigen::VectorXd& x) {
    return (x - x0).squaredNorm();
  };
  problem.objective_grad = [x0](const Eigen::VectorXd& x) {
    return (2.0 * (x - x0)).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return (2.0 * Eigen::MatrixXd::Identity(3, 3)).eval();
  };
  problem.constraint = [](const Eigen::VectorXd& x) {
    return SymMatrix::diagonal(-x);
  };
  problem.constraint_jac = [](const Eigen::VectorXd&) {
    std::vector<SymMatrix> parts;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(3);
      d(i) = -1.0;
      parts.push_back(SymMatrix::diagonal(d));
    }
    return parts;
  };
  problem.constraint_hess_contracted = [](const Eigen::VectorXd&,
                                          const SymMatrix&) {
    return Eigen::MatrixXd::Zero(3, 3).eval();
  };

  // Solution: projection of x0 onto the nonnegative orthant.
  const Eigen::Vector3d x_star = x0.cwiseMax(0.0);
  problem.f_star = (x_star - x0).squaredNorm();
  ExtendedPoint sol;
  sol.x = x_star;
  sol.lambda = SymMatrix::diagonal((-2.0 * x0).cwiseMax(0.0));
  sol.mu = Eigen::VectorXd(0);
  problem.known_solutions.push_back(std::move(sol));
  check_problem(problem);
  return problem;
}

inline NlsdpProblem build_nearest_corr_2(const Params& params) {
  reject_unknown_params("nearest-corr-2", params, {"alpha", "kappa", "c12"});
  NlsdpProblem problem;
  problem.name = "nearest-corr-2";
  problem.dim = 3;  // x = (X11, X12, X22)
  problem.sdp_dim = 2;
  problem.eq_dim = 2;
  apply_merit_params(problem, params);

  const double c12 = param_or(params, "c12", 1.5);

  problem.objective = [c12](const Eigen::VectorXd& x) {
    const double d11 = x(0) - 1.0;
    const double d12 = x(1) - c12;
    const double d22 = x(2) - 1.0;
    return d11 * d11 + 2.0 * d12 * d12 + d22 * d22;
  };
  problem.objective_grad = [c12](const Eigen::VectorXd& x) {
    return Eigen::Vector3d(2.0 * (x(0) - 1.0), 4.0 * (x(1) - c12),
                           2.0 * (x(2) - 1.0))
        .eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return Eigen::Vector3d(2.0, 4.0, 2.0).asDiagonal().toDenseMatrix();
  };
  problem.constraint = [](const Eigen::VectorXd& x) {
    Eigen::Matrix2d m;
    m << -x(0), -x(1), -x(1), -x(2);
    return SymMatrix(m);
  };
  problem.constraint_jac = [](const Eigen::VectorXd&) {
    Eigen::Matrix2d g1 = Eigen::Matrix2d::Zero();
    g1(0, 0) = -1.0;
    Eigen::Matrix2d g2 = Eigen::Matrix2d::Zero();
    g2(0, 1) = -1.0;
    g2(1, 0) = -1.0;
    Eigen::Matrix2d g3 = Eigen::Matrix2d::Zero();
    g3(1, 1) = -1.0;
    return std::vector<SymMatrix>{SymMatrix(g1), SymMatrix(g2), SymMatrix(g3)};
  };
  problem.constraint_hess_contracted = [](const Eigen::VectorXd&,
                                          const SymMatrix&) {
    return Eigen::MatrixXd::Zero(3, 3).eval();
  };
  problem.equality = [](const Eigen::VectorXd& x) {
    return Eigen::Vector2d(x(0) - 1.0, x(2) - 1.0).eval();
  };
  problem.equality_jac = [](const Eigen::VectorXd&) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 3);
    j(0, 0) = 1.0;
    j(1, 2) = 1.0;
    return j;
  };
  problem.equality_hess_contracted = [](const Eigen::VectorXd&,
                                        const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(3, 3).eval();
  };

  // Closed-form solution: clamp the off-diagonal target into [-1, 1].
  const double y = std::clamp(c12, -1.0, 1.0);
  problem.f_star = 2.0 * (y - c12) * (y - c12);
  ExtendedPoint sol;
  sol.x = Eigen::Vector3d(1.0, y, 1.0);
  const double t = 2.0 * std::abs(y - c12);  // active multiplier magnitude
  Eigen::Matrix2d lam;
  if (c12 > 1.0) {
    lam << t, -t, -t, t;
  } else if (c12 < -1.0) {
    lam << t, t, t, t;
  } else {
    lam.setZero();
  }
  sol.lambda = SymMatrix(lam);
  sol.mu = Eigen::Vector2d(t, t);
  problem.known_solutions.push_back(std::move(sol));
  check_problem(problem);
  return problem;
}

inline SingularPenaltyProblem build_eq_linear(const Params& params) {
  reject_unknown_params("eq-linear", params, {"w"});
  SingularPenaltyProblem problem;
  problem.name = "eq-linear";
  problem.dim = 1;
  problem.constraint_dim = 1;
  problem.objective = [](const Eigen::VectorXd& x) { return ExtReal(x(0)); };
  problem.objective_grad = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(1).eval();
  };
  problem.constraint = [](const Eigen::VectorXd& x) { return x; };
  problem.constraint_jac = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Ones(1, 1).eval();
  };
  problem.shift = Eigen::VectorXd::Constant(1, param_or(params, "w", 1.0));
  problem.phi = identity_func();
  problem.omega = identity_func();
  problem.f_star = 0.0;
  problem.known_solutions.push_back(Eigen::VectorXd::Zero(1));
  validate_penalty_shapes(problem);
  return problem;
}

}  // namespace detail

}  // namespace exmerit
