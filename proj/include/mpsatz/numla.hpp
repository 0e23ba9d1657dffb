#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "mpsatz/errors.hpp"
#include "mpsatz/rational.hpp"

namespace mpsatz {

/// Symmetric real matrix; only the lower triangle is stored (row-packed).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int m) : m_(m), packed_(static_cast<std::size_t>(m * (m + 1) / 2), 0.0) {}
  /// Takes the lower triangle of a (assumed symmetric) dense matrix.
  explicit SymMatrix(const Eigen::MatrixXd& a) : SymMatrix(static_cast<int>(a.rows())) {
    if (a.rows() != a.cols()) throw DimensionMismatch("SymMatrix: not square");
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) (*this)(i, j) = a(i, j);
  }

  static SymMatrix identity(int m) {
    SymMatrix s(m);
    for (int i = 0; i < m; ++i) s(i, i) = 1.0;
    return s;
  }

  int dim() const { return m_; }
  double& operator()(int i, int j) { return packed_[idx(i, j)]; }
  double operator()(int i, int j) const { return packed_[idx(i, j)]; }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd a(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = (*this)(i, j);
    return a;
  }

  double frobenius_norm() const { return dense().norm(); }
  bool all_finite() const {
    return std::all_of(packed_.begin(), packed_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i * (i + 1) / 2 + j);
  }
  int m_ = 0;
  std::vector<double> packed_;
};

struct SymEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, vectors.col(k) <-> values(k)
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymEigen sym_eigen(const Eigen::MatrixXd& input) {
  const Eigen::Index m = input.rows();
  if (input.cols() != m) throw DimensionMismatch("sym_eigen: not square");
  if (!input.allFinite()) throw NonFiniteInput("sym_eigen: non-finite entry");
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  const double norm = a.norm();
  if (norm > 0.0) {
    for (int sweep = 0; sweep < 100; ++sweep) {
      double off = 0.0;
      for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
      if (std::sqrt(2.0 * off) <= 1e-15 * norm) break;
      for (Eigen::Index p = 0; p < m; ++p) {
        for (Eigen::Index q = p + 1; q < m; ++q) {
          const double apq = a(p, q);
          if (std::fabs(apq) <= 1e-300) continue;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double tt = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(tt * tt + 1.0);
          const double s = tt * c;
          for (Eigen::Index k = 0; k < m; ++k) {
            const double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (Eigen::Index k = 0; k < m; ++k) {
            const double apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          a(p, q) = a(q, p) = 0.0;
          for (Eigen::Index k = 0; k < m; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  SymEigen out{Eigen::VectorXd(m), Eigen::MatrixXd(m, m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline SymEigen sym_eigen(const SymMatrix& a) {
  if (!a.all_finite()) throw NonFiniteInput("sym_eigen: non-finite entry");
  return sym_eigen(a.dense());
}

inline double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  return sym_eigen(a).values(0);
}

struct PsdFactor {
  Eigen::MatrixXd factor;    // rank x m, A ~= factor^T factor
  double clamped = 0.0;      // magnitude of negative eigenvalues set to zero
  double residual = 0.0;     // ||A - factor^T factor||_F
};

/// A = B^T B with B of numerical rank rows.  Eigenvalues above
/// tol * max(1, lambda_max) are kept; values in [-tol, 0] are clamped.
inline PsdFactor psd_factor(const Eigen::MatrixXd& a, double tol) {
  const Eigen::Index m = a.rows();
  PsdFactor out;
  if (m == 0) {
    out.factor.resize(0, 0);
    return out;
  }
  SymEigen e = sym_eigen(a);
  if (e.values(0) < -tol) throw IndefiniteInput("psd_factor: matrix is not positive semidefinite", e.values(0));
  const double lmax = e.values(m - 1);
  const double keep = tol * std::max(1.0, lmax);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    if (e.values(k) > keep)
      kept.push_back(k);
    else if (e.values(k) < 0)
      out.clamped = std::max(out.clamped, -e.values(k));
  }
  out.factor.resize(static_cast<Eigen::Index>(kept.size()), m);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const Eigen::Index k = kept[r];
    Eigen::VectorXd col = e.vectors.col(k);
    // Deterministic sign: largest-magnitude component positive.
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col(imax) < 0) col = -col;
    out.factor.row(static_cast<Eigen::Index>(r)) = std::sqrt(e.values(k)) * col.transpose();
  }
  out.residual = (a - out.factor.transpose() * out.factor).norm();
  return out;
}

inline PsdFactor psd_factor(const SymMatrix& a, double tol) { return psd_factor(a.dense(), tol); }

/// Solves A x = b with partially pivoted LU; throws SingularSystem when the
/// system is numerically singular or the residual check fails.
inline Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw DimensionMismatch("solve_linear: shape mismatch");
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& u = lu.matrixLU();
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < u.rows(); ++k)
    if (std::fabs(u(k, k)) <= 1e-14 * scale) throw SingularSystem("solve_linear: pivot below threshold");
  Eigen::VectorXd x = lu.solve(b);
  x += lu.solve(b - a * x);  // one refinement step
  const double res = (a * x - b).norm();
  if (!x.allFinite() || res > 1e-9 * (a.norm() * x.norm() + b.norm()))
    throw SingularSystem("solve_linear: residual check failed");
  return x;
}

/// Dense matrix of exact rationals (row-major).
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

  static RatMatrix identity(int t) {
    RatMatrix r(t, t);
    for (int i = 0; i < t; ++i) r(i, i) = 1;
    return r;
  }

  static RatMatrix from_double(const Eigen::MatrixXd& a) {
    RatMatrix r(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r(i, j) = exact_rational(a(i, j));
    return r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd a(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) a(i, j) = (*this)(i, j).get_d();
    return a;
  }
  bool symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }
  bool operator==(const RatMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

/// Exact A = L D L^T (L unit lower triangular, D diagonal) without pivoting.
/// Returns nullopt when A is not positive semidefinite: a negative pivot, or
/// a zero pivot whose remaining column is nonzero.
struct ExactLdl {
  RatMatrix lower;
  std::vector<Rational> diag;
};

inline std::optional<ExactLdl> exact_psd_ldl(const RatMatrix& input) {
  if (!input.symmetric()) return std::nullopt;
  const int m = input.rows();
  RatMatrix a = input;
  ExactLdl out{RatMatrix(m, m), std::vector<Rational>(static_cast<std::size_t>(m))};
  for (int i = 0; i < m; ++i) out.lower(i, i) = 1;
  for (int k = 0; k < m; ++k) {
    const Rational pivot = a(k, k);
    out.diag[static_cast<std::size_t>(k)] = pivot;
    if (sgn(pivot) < 0) return std::nullopt;
    if (sgn(pivot) == 0) {
      for (int i = k + 1; i < m; ++i)
        if (sgn(a(i, k)) != 0) return std::nullopt;
      continue;
    }
    for (int i = k + 1; i < m; ++i) {
      if (sgn(a(i, k)) == 0) continue;
      Rational l = a(i, k) / pivot;
      out.lower(i, k) = l;
      for (int j = k + 1; j <= i; ++j) {
        if (sgn(a(j, k)) == 0) continue;
        a(i, j) -= l * a(j, k);
        a(j, i) = a(i, j);
      }
    }
  }
  return out;
}

inline bool exact_is_psd(const RatMatrix& a) { return exact_psd_ldl(a).has_value(); }

}  // namespace mpsatz
