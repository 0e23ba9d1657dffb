#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mpsatz/errors.hpp"
#include "mpsatz/polynomial.hpp"

namespace mpsatz {

/// Dense rows x cols grid of polynomial entries sharing n variables.
/// Square instances are the t x t matrix polynomials; rectangular ones occur
/// as factors g with f = g^T g.
template <typename T>
class MatrixPoly {
 public:
  using Entry = Polynomial<T>;

  MatrixPoly() = default;
  MatrixPoly(int rows, int cols, int n)
      : rows_(rows), cols_(cols), n_(n), data_(static_cast<std::size_t>(rows * cols), Entry(n)) {
    if (rows < 0 || cols < 0 || n < 0) throw DimensionMismatch("MatrixPoly: negative dimension");
  }

  static MatrixPoly zero(int t, int n) { return MatrixPoly(t, t, n); }
  static MatrixPoly identity(int t, int n) { return scalar(t, Entry(n, T(1))); }
  /// s * I_t.
  static MatrixPoly scalar(int t, const Entry& s) {
    MatrixPoly m(t, t, s.num_vars());
    for (int i = 0; i < t; ++i) m(i, i) = s;
    return m;
  }
  /// Matrix unit E_ij (constant).
  static MatrixPoly unit(int t, int n, int i, int j) {
    MatrixPoly m(t, t, n);
    m(i, j) = Entry(n, T(1));
    return m;
  }
  static MatrixPoly diagonal(const std::vector<Entry>& d) {
    if (d.empty()) throw DimensionMismatch("MatrixPoly::diagonal: empty");
    MatrixPoly m(static_cast<int>(d.size()), static_cast<int>(d.size()), d.front().num_vars());
    for (int i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }
  static MatrixPoly from_scalar(const Entry& s) { return scalar(1, s); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const { return n_; }
  bool is_square() const { return rows_ == cols_; }
  /// Matrix size t of a square matrix polynomial.
  int size() const {
    if (!is_square()) throw DimensionMismatch("MatrixPoly::size: not square");
    return rows_;
  }

  Entry& operator()(int i, int j) { return data_[index(i, j)]; }
  const Entry& operator()(int i, int j) const { return data_[index(i, j)]; }

  int degree() const {
    int d = -1;
    for (const auto& e : data_) d = std::max(d, e.degree());
    return d;
  }
  bool is_zero() const {
    for (const auto& e : data_)
      if (!e.is_zero()) return false;
    return true;
  }
  bool symmetric() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }
  bool is_diagonal() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (i != j && !(*this)(i, j).is_zero()) return false;
    return true;
  }
  /// True when the matrix equals s * I for a scalar polynomial s.
  bool is_scalar_identity() const {
    if (!is_square() || !is_diagonal()) return false;
    for (int i = 1; i < rows_; ++i)
      if ((*this)(i, i) != (*this)(0, 0)) return false;
    return true;
  }
  double max_abs_coefficient() const {
    double r = 0.0;
    for (const auto& e : data_) r = std::max(r, e.max_abs_coefficient());
    return r;
  }

  Entry trace() const {
    Entry s(n_);
    for (int i = 0; i < size(); ++i) s += (*this)(i, i);
    return s;
  }

  MatrixPoly& operator+=(const MatrixPoly& o) {
    same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  MatrixPoly& operator-=(const MatrixPoly& o) {
    same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  MatrixPoly& operator*=(const T& s) {
    for (auto& e : data_) e *= s;
    return *this;
  }
  friend MatrixPoly operator+(MatrixPoly a, const MatrixPoly& b) { return a += b; }
  friend MatrixPoly operator-(MatrixPoly a, const MatrixPoly& b) { return a -= b; }
  friend MatrixPoly operator*(MatrixPoly a, const T& s) { return a *= s; }
  friend MatrixPoly operator*(const T& s, MatrixPoly a) { return a *= s; }
  MatrixPoly operator-() const {
    MatrixPoly r(*this);
    for (auto& e : r.data_) e = -e;
    return r;
  }

  /// Entry-wise multiplication by a scalar polynomial.
  friend MatrixPoly operator*(const Entry& s, const MatrixPoly& a) {
    MatrixPoly r(a.rows_, a.cols_, a.n_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = s * a.data_[k];
    return r;
  }

  friend MatrixPoly operator*(const MatrixPoly& a, const MatrixPoly& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("MatrixPoly::mul: inner dimension mismatch");
    if (a.n_ != b.n_) throw DimensionMismatch("MatrixPoly::mul: variable count mismatch");
    MatrixPoly r(a.rows_, b.cols_, a.n_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Entry& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) {
          const Entry& bkj = b(k, j);
          if (!bkj.is_zero()) r(i, j) += aik * bkj;
        }
      }
    return r;
  }

  bool operator==(const MatrixPoly& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && n_ == o.n_ && data_ == o.data_;
  }
  bool operator!=(const MatrixPoly& o) const { return !(*this == o); }

  /// Conjugate transpose; for real coefficients the plain transpose.
  MatrixPoly adjoint() const {
    MatrixPoly r(cols_, rows_, n_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  template <typename U>
  MatrixPoly<U> cast() const {
    MatrixPoly<U> r(rows_, cols_, n_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).template cast<U>();
    return r;
  }

  MatrixPoly resized_vars(int n) const {
    MatrixPoly r(rows_, cols_, n);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).resized(n);
    return r;
  }

  /// Row-major entry values at x, computed in U arithmetic.
  template <typename U>
  std::vector<U> evaluate_entries(std::span<const U> x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("MatrixPoly::evaluate: point length differs from n");
    std::vector<U> out;
    out.reserve(data_.size());
    for (const auto& e : data_) out.push_back(e.template evaluate<U>(x));
    return out;
  }

  Eigen::MatrixXd evaluate(std::span<const double> x) const {
    auto v = evaluate_entries<double>(x);
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = v[index(i, j)];
    return m;
  }
  Eigen::MatrixXd evaluate(const std::vector<double>& x) const { return evaluate(std::span<const double>(x)); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < rows_; ++i) {
      s += i ? ", [" : "[";
      for (int j = 0; j < cols_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
      s += "]";
    }
    return s + "]";
  }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= rows_ || j >= cols_) throw DimensionMismatch("MatrixPoly: index out of range");
    return static_cast<std::size_t>(i * cols_ + j);
  }
  void same_shape(const MatrixPoly& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || n_ != o.n_) throw DimensionMismatch("MatrixPoly: shape mismatch");
  }

  int rows_ = 0, cols_ = 0, n_ = 0;
  std::vector<Entry> data_;
};

using RatMatrixPoly = MatrixPoly<Rational>;
using RealMatrixPoly = MatrixPoly<double>;

/// Constant matrix polynomial from a real matrix (coefficients exact binary values).
inline RatMatrixPoly constant_matrix(const Eigen::MatrixXd& a, int n) {
  RatMatrixPoly m(static_cast<int>(a.rows()), static_cast<int>(a.cols()), n);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = RatPoly(n, exact_rational(a(i, j)));
  return m;
}

}  // namespace mpsatz
