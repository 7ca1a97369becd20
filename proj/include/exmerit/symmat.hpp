#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace exmerit {

/// Relative eigenvalue cutoff used by pseudoinverse() and null_basis().
inline constexpr double kDefaultRankTol = 1e-9;

/// Dense real symmetric matrix with Frobenius inner product.
///
/// Symmetry is an invariant: the checked constructor symmetrizes its input
/// via (A + A^T)/2 and rejects matrices whose asymmetry exceeds
/// 1e-8 * ||A||_F. All downstream formulas may assume exact symmetry.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("SymMatrix: input must be square");
    }
    if (a.rows() < 1) {
      throw std::invalid_argument("SymMatrix: dimension must be >= 1");
    }
    const double asym = (a - a.transpose()).norm();
    if (asym > 1e-8 * std::max(a.norm(), 1e-300)) {
      throw std::invalid_argument(
          "SymMatrix: input asymmetry " + std::to_string(asym) +
          " exceeds 1e-8 * ||A||_F");
    }
    m_ = 0.5 * (a + a.transpose());
  }

  static SymMatrix zero(Eigen::Index dim) {
    return SymMatrix(Eigen::MatrixXd::Zero(dim, dim), Trusted{});
  }

  static SymMatrix identity(Eigen::Index dim) {
    return SymMatrix(Eigen::MatrixXd::Identity(dim, dim), Trusted{});
  }

  static SymMatrix diagonal(const Eigen::VectorXd& d) {
    return SymMatrix(Eigen::MatrixXd(d.asDiagonal()), Trusted{});
  }

  /// Wraps a matrix that is symmetric by construction, skipping the
  /// asymmetry check (the off-triangle is still mirrored from the mean).
  static SymMatrix from_symmetric(const Eigen::MatrixXd& a) {
    return SymMatrix(0.5 * (a + a.transpose()), Trusted{});
  }

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }
  bool all_finite() const { return m_.allFinite(); }

  SymMatrix operator+(const SymMatrix& o) const {
    return SymMatrix(m_ + o.m_, Trusted{});
  }
  SymMatrix operator-(const SymMatrix& o) const {
    return SymMatrix(m_ - o.m_, Trusted{});
  }
  SymMatrix operator*(double s) const { return SymMatrix(s * m_, Trusted{}); }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd a, Trusted) : m_(std::move(a)) {}

  Eigen::MatrixXd m_;
};

/// trace(AB) for symmetric A, B.
inline double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("frobenius_inner: dimension mismatch");
  }
  return a.mat().cwiseProduct(b.mat()).sum();
}

/// Spectral decomposition A = Q diag(e) Q^T with e sorted nondecreasing and
/// Q orthogonal (columns paired with eigenvalues).
struct EigDecomp {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps rotate every upper-triangle pair until the off-diagonal Frobenius
/// mass falls below 1e-12 * ||A||_F; at most 100 sweeps. Accurate for the
/// small dense matrices this library targets (dim up to a few tens).
inline EigDecomp eig_sym(const SymMatrix& a) {
  if (!a.all_finite()) {
    throw std::invalid_argument("eig_sym: non-finite entries");
  }
  const Eigen::Index n = a.dim();
  Eigen::MatrixXd m = a.mat();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);

  constexpr int kMaxSweeps = 100;
  const double threshold = 1e-12 * std::max(a.frobenius_norm(), 1e-300);

  auto off_norm = [&m, n]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    }
    return std::sqrt(s);
  };

  double off = off_norm();
  int sweep = 0;
  while (off > threshold && sweep < kMaxSweeps) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index qi = p + 1; qi < n; ++qi) {
        const double apq = m(p, qi);
        if (apq == 0.0) continue;
        const double theta = (m(qi, qi) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = m(p, p);
        const double aqq = m(qi, qi);
        m(p, p) = app - t * apq;
        m(qi, qi) = aqq + t * apq;
        m(p, qi) = 0.0;
        m(qi, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == qi) continue;
          const double akp = m(k, p);
          const double akq = m(k, qi);
          m(k, p) = c * akp - s * akq;
          m(p, k) = m(k, p);
          m(k, qi) = s * akp + c * akq;
          m(qi, k) = m(k, qi);
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkq = q(k, qi);
          q(k, p) = c * qkp - s * qkq;
          q(k, qi) = s * qkp + c * qkq;
        }
      }
    }
    off = off_norm();
    ++sweep;
  }
  if (off > threshold) {
    throw std::runtime_error(
        "eig_sym: Jacobi sweeps did not converge, off-diagonal residual " +
        std::to_string(off));
  }

  EigDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&m](Eigen::Index i, Eigen::Index j) { return m(i, i) < m(j, j); });
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = m(order[static_cast<std::size_t>(k)],
                           order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = q.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues are
/// clamped to zero.
inline SymMatrix project_psd(const SymMatrix& a) {
  const EigDecomp e = eig_sym(a);
  const Eigen::VectorXd clamped = e.eigenvalues.cwiseMax(0.0);
  return SymMatrix::from_symmetric(e.eigenvectors * clamped.asDiagonal() *
                                   e.eigenvectors.transpose());
}

/// Moreau complement of project_psd: A = [A]_+ + [A]_-, parts orthogonal.
inline SymMatrix project_nsd(const SymMatrix& a) {
  return a - project_psd(a);
}

/// Moore-Penrose pseudoinverse. Eigenvalues with |e_i| <= rank_tol * max|e|
/// are treated as zero.
inline SymMatrix pseudoinverse(const SymMatrix& a,
                               double rank_tol = kDefaultRankTol) {
  if (rank_tol <= 0.0) {
    throw std::invalid_argument("pseudoinverse: rank_tol must be > 0");
  }
  const EigDecomp e = eig_sym(a);
  const double cutoff = rank_tol * e.eigenvalues.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double ev = e.eigenvalues(i);
    inv(i) = std::abs(ev) > cutoff ? 1.0 / ev : 0.0;
  }
  return SymMatrix::from_symmetric(e.eigenvectors * inv.asDiagonal() *
                                   e.eigenvectors.transpose());
}

/// Orthonormal basis of the numerical null space, plus the numerical rank.
struct NullBasis {
  Eigen::MatrixXd basis;  // dim x (dim - rank), orthonormal columns
  Eigen::Index rank = 0;
};

/// Null basis from the eigenvectors whose eigenvalues satisfy
/// |e_i| <= rank_tol * max(max|e|, 1).
inline NullBasis null_basis(const SymMatrix& a,
                            double rank_tol = kDefaultRankTol) {
  if (rank_tol <= 0.0) {
    throw std::invalid_argument("null_basis: rank_tol must be > 0");
  }
  const EigDecomp e = eig_sym(a);
  const double cutoff =
      rank_tol * std::max(e.eigenvalues.cwiseAbs().maxCoeff(), 1.0);
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) {
    if (std::abs(e.eigenvalues(i)) <= cutoff) null_cols.push_back(i);
  }
  NullBasis out;
  out.rank = a.dim() - static_cast<Eigen::Index>(null_cols.size());
  out.basis.resize(a.dim(), static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t k = 0; k < null_cols.size(); ++k) {
    out.basis.col(static_cast<Eigen::Index>(k)) =
        e.eigenvectors.col(null_cols[k]);
  }
  return out;
}

}  // namespace exmerit
