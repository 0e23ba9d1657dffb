#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mpsatz/errors.hpp"
#include "mpsatz/rational.hpp"

namespace mpsatz {

/// Exponent vector of a monomial in n variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int n) : exps_(static_cast<std::size_t>(n), 0) {}
  explicit Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
  }

  static Monomial variable(int n, int i, int power = 1) {
    Monomial m(n);
    m.exps_.at(static_cast<std::size_t>(i)) = power;
    return m;
  }

  int num_vars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }
  bool is_one() const { return degree() == 0; }

  Monomial operator*(const Monomial& o) const {
    if (o.exps_.size() != exps_.size()) throw DimensionMismatch("Monomial: variable count mismatch");
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += o.exps_[i];
    return r;
  }

  /// True when o divides *this.
  bool divisible_by(const Monomial& o) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (o.exps_[i] > exps_[i]) return false;
    return true;
  }

  Monomial operator/(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] -= o.exps_[i];
    return r;
  }

  /// Drops or appends variables (appended ones get exponent 0).
  Monomial resized(int n) const {
    Monomial r(*this);
    r.exps_.resize(static_cast<std::size_t>(n), 0);
    return r;
  }

  template <typename U>
  U evaluate(std::span<const U> x) const {
    U r(1);
    for (std::size_t i = 0; i < exps_.size(); ++i)
      for (int k = 0; k < exps_[i]; ++k) r *= x[i];
    return r;
  }

  bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
  bool operator!=(const Monomial& o) const { return exps_ != o.exps_; }

  std::string to_string() const {
    if (is_one()) return "1";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] == 0) continue;
      if (!first) os << '*';
      first = false;
      os << 'x' << (i + 1);
      if (exps_[i] > 1) os << '^' << exps_[i];
    }
    return os.str();
  }

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order, ascending: lower total degree first; within a
/// degree x1 > x2 > ... so the enumeration reads 1, x1, x2, x1^2, x1*x2, ...
struct GrLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents() > b.exponents();
  }
};

/// All monomials in n variables of total degree <= d, in graded-lex order.
inline std::vector<Monomial> monomials_up_to(int n, int d) {
  std::vector<Monomial> out;
  if (d < 0) return out;
  if (n == 0) {
    out.emplace_back(0);
    return out;
  }
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  for (int deg = 0; deg <= d; ++deg) {
    // Exponent vectors of total degree deg in descending lex order.
    std::vector<Monomial> level;
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == n - 1) {
        e[static_cast<std::size_t>(i)] = left;
        level.emplace_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[static_cast<std::size_t>(i)] = k;
        self(self, i + 1, left - k);
      }
    };
    rec(rec, 0, deg);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// Sparse multivariate polynomial with coefficients in T (Rational or double).
/// Zero coefficients are never stored.
template <typename T>
class Polynomial {
 public:
  using Terms = std::map<Monomial, T, GrLexLess>;
  using Traits = CoeffTraits<T>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}
  Polynomial(int n, const T& constant) : n_(n) { add_term(Monomial(n), constant); }

  static Polynomial variable(int n, int i) {
    Polynomial p(n);
    p.add_term(Monomial::variable(n, i), T(1));
    return p;
  }
  static Polynomial monomial(const Monomial& m, const T& c) {
    Polynomial p(m.num_vars());
    p.add_term(m, c);
    return p;
  }

  int num_vars() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree() const {
    return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
  }

  T coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }
  T constant_term() const { return coefficient(Monomial(n_)); }

  bool is_constant() const { return degree() <= 0; }

  void add_term(const Monomial& m, const T& c) {
    if (m.num_vars() != n_) throw DimensionMismatch("Polynomial: monomial length differs from n");
    if (Traits::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  double max_abs_coefficient() const {
    double r = 0.0;
    for (const auto& [m, c] : terms_) r = std::max(r, std::fabs(Traits::to_double(c)));
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, T(-c));
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    if (Traits::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const {
    Polynomial r(*this);
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial r(a.n_);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.terms_.size() * b.terms_.size() >= 64 && a.dense_product(b, r)) return r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, T(ca * cb));
    return r;
  }

  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// p^k for k >= 0.
  Polynomial pow(int k) const {
    Polynomial r(n_, T(1));
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  template <typename U>
  U evaluate(std::span<const U> x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("Polynomial::evaluate: point length differs from n");
    U r(0);
    for (const auto& [m, c] : terms_) r += coeff_cast<U, T>(c) * m.template evaluate<U>(x);
    return r;
  }
  template <typename U>
  U evaluate(const std::vector<U>& x) const {
    return evaluate<U>(std::span<const U>(x));
  }

  template <typename U>
  Polynomial<U> cast() const {
    Polynomial<U> r(n_);
    for (const auto& [m, c] : terms_) r.add_term(m, coeff_cast<U, T>(c));
    return r;
  }

  /// Re-embeds into a ring with n variables (extra variables unused, or
  /// trailing variables dropped when they do not occur).
  Polynomial resized(int n) const {
    Polynomial r(n);
    for (const auto& [m, c] : terms_) {
      for (int i = n; i < m.num_vars(); ++i)
        if (m[i] != 0) throw DimensionMismatch("Polynomial::resized: dropped variable occurs");
      r.add_term(m.resized(n), c);
    }
    return r;
  }

  /// Exact quotient a / b, or nullopt when b does not divide a.
  friend std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    if (b.is_zero()) throw std::domain_error("divide_exact: division by zero polynomial");
    Polynomial q(a.n_), r(a);
    const auto& [lb_m, lb_c] = *b.terms_.rbegin();
    while (!r.is_zero()) {
      const auto& [lr_m, lr_c] = *r.terms_.rbegin();
      if (!lr_m.divisible_by(lb_m)) return std::nullopt;
      Monomial qm = lr_m / lb_m;
      T qc = lr_c / lb_c;
      q.add_term(qm, qc);
      Polynomial step = b * Polynomial::monomial(qm, qc);
      r -= step;
    }
    return q;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      std::ostringstream cs;
      cs << c;
      std::string s = cs.str();
      bool neg = !s.empty() && s[0] == '-';
      if (neg) s = s.substr(1);
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      if (m.is_one())
        os << s;
      else if (s == "1")
        os << m.to_string();
      else
        os << s << '*' << m.to_string();
    }
    return os.str();
  }

 private:
  void check(const Polynomial& o) const {
    if (o.n_ != n_) throw DimensionMismatch("Polynomial: variable count mismatch");
  }

  int n_ = 0;
  // Product accumulated on the dense exponent grid of the result; false
  // when that grid would be too large.  Rational coefficients are scaled to
  // integers so the inner loop is a single mpz_addmul.
  bool dense_product(const Polynomial& b, Polynomial& r) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    std::vector<int> maxe(n, 0);
    for (const auto* p : {this, &b})
      for (std::size_t i = 0; i < n; ++i) {
        int m = 0;
        for (const auto& [mono, c] : p->terms_) m = std::max(m, mono.exponents()[i]);
        maxe[i] += m;
      }
    std::vector<std::size_t> stride(n, 1);
    std::size_t size = 1;
    for (std::size_t i = 0; i < n; ++i) {
      stride[i] = size;
      size *= static_cast<std::size_t>(maxe[i] + 1);
      if (size > (std::size_t{1} << 22)) return false;
    }
    auto index = [&](const Monomial& m) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) k += stride[i] * static_cast<std::size_t>(m.exponents()[i]);
      return k;
    };
    std::vector<std::size_t> ia, ib;
    for (const auto& [m, c] : terms_) ia.push_back(index(m));
    for (const auto& [m, c] : b.terms_) ib.push_back(index(m));
    std::vector<char> used(size, 0);
    auto emit = [&](auto&& value_at) {
      std::vector<int> e(n);
      for (std::size_t k = 0; k < size; ++k) {
        if (!used[k]) continue;
        T v = value_at(k);
        if (Traits::is_zero(v)) continue;
        std::size_t rem = k;
        for (std::size_t i = n; i-- > 0;) {
          e[i] = static_cast<int>(rem / stride[i]);
          rem %= stride[i];
        }
        r.terms_.emplace_hint(r.terms_.end(), Monomial(e), std::move(v));
      }
    };
    if constexpr (std::is_same_v<T, Rational>) {
      Integer da = 1, db = 1;
      for (const auto& [m, c] : terms_) mpz_lcm(da.get_mpz_t(), da.get_mpz_t(), c.get_den_mpz_t());
      for (const auto& [m, c] : b.terms_) mpz_lcm(db.get_mpz_t(), db.get_mpz_t(), c.get_den_mpz_t());
      std::vector<Integer> za, zb;
      for (const auto& [m, c] : terms_) za.push_back(Integer(c * da));
      for (const auto& [m, c] : b.terms_) zb.push_back(Integer(c * db));
      std::vector<Integer> acc(size);
      for (std::size_t x = 0; x < za.size(); ++x)
        for (std::size_t y = 0; y < zb.size(); ++y) {
          const std::size_t k = ia[x] + ib[y];
          used[k] = 1;
          mpz_addmul(acc[k].get_mpz_t(), za[x].get_mpz_t(), zb[y].get_mpz_t());
        }
      const Integer den = da * db;
      emit([&](std::size_t k) {
        Rational v(acc[k], den);
        v.canonicalize();
        return v;
      });
    } else {
      std::vector<T> ca, cb;
      for (const auto& [m, c] : terms_) ca.push_back(c);
      for (const auto& [m, c] : b.terms_) cb.push_back(c);
      std::vector<T> acc(size, T(0));
      for (std::size_t x = 0; x < ca.size(); ++x)
        for (std::size_t y = 0; y < cb.size(); ++y) {
          const std::size_t k = ia[x] + ib[y];
          used[k] = 1;
          acc[k] += ca[x] * cb[y];
        }
      emit([&](std::size_t k) { return acc[k]; });
    }
    return true;
  }

  Terms terms_;
};

using RatPoly = Polynomial<Rational>;
using RealPoly = Polynomial<double>;

}  // namespace mpsatz
