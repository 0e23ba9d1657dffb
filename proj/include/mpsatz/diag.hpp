#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mpsatz/numla.hpp"

namespace mpsatz {

/// One elimination path: D = adjoint(C) f C with D diagonal.
struct DiagBranch {
  RatMatrixPoly c;
  RatMatrixPoly d;
  std::string label;  // pivot history, e.g. "p0 r(0,1) p1"
};

class BranchCapExceeded : public Error {
 public:
  BranchCapExceeded(const std::string& what, std::vector<DiagBranch> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<DiagBranch>& partial() const { return partial_; }

 private:
  std::vector<DiagBranch> partial_;
};

namespace detail {

struct DiagState {
  RatMatrixPoly c;
  RatMatrixPoly f;  // current adjoint(c) f c
  int stage = 0;
  std::string label;
};

inline bool trailing_diagonal(const RatMatrixPoly& f, int k) {
  const int t = f.size();
  for (int i = k; i < t; ++i)
    for (int j = i + 1; j < t; ++j)
      if (!f(i, j).is_zero()) return false;
  return true;
}

/// Right-multiplies c by the elementary matrix e and updates f = e^T f e.
inline void congruence(DiagState& s, const RatMatrixPoly& e) {
  s.c = s.c * e;
  s.f = e.adjoint() * s.f * e;
}

/// Congruence by the transposition (i j), applied as a permutation.
inline void swap_congruence(DiagState& s, int i, int j) {
  if (i == j) return;
  const int t = s.f.size();
  for (int r = 0; r < t; ++r) {
    std::swap(s.c(r, i), s.c(r, j));
    std::swap(s.f(r, i), s.f(r, j));
  }
  for (int r = 0; r < t; ++r) std::swap(s.f(i, r), s.f(j, r));
}

/// Pivot at position k (after the swap): col_i <- a col_i - f_ik col_k for
/// every i > k with f_ik != 0.  The trailing block becomes
/// a (a f_ij - f_ik f_jk) where both columns move, a f_ij where one does.
inline void eliminate(DiagState& s) {
  const int t = s.f.size(), k = s.stage;
  const RatPoly a = s.f(k, k);
  std::vector<char> touched(static_cast<std::size_t>(t), 0);
  for (int i = k + 1; i < t; ++i) touched[static_cast<std::size_t>(i)] = !s.f(k, i).is_zero();
  for (int i = k + 1; i < t; ++i)
    for (int j = i; j < t; ++j) {
      const bool ti = touched[static_cast<std::size_t>(i)], tj = touched[static_cast<std::size_t>(j)];
      if (!ti && !tj) continue;
      RatPoly v = a * s.f(i, j);
      if (ti && tj) v = a * (v - s.f(k, i) * s.f(k, j));
      s.f(i, j) = v;
      s.f(j, i) = std::move(v);
    }
  for (int i = k + 1; i < t; ++i) {
    if (!touched[static_cast<std::size_t>(i)]) continue;
    for (int r = 0; r < t; ++r) s.c(r, i) = a * s.c(r, i) - s.f(k, i) * s.c(r, k);
    s.f(k, i) = RatPoly(s.f.num_vars());
    s.f(i, k) = RatPoly(s.f.num_vars());
  }
}

/// Admissible pivots of the trailing block: nonzero diagonal entries,
/// constant-term ones first, then by degree, then by index.
inline std::vector<int> pivot_order(const RatMatrixPoly& f, int k) {
  std::vector<int> idx;
  for (int j = k; j < f.size(); ++j)
    if (!f(j, j).is_zero()) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const bool ca = sgn(f(a, a).constant_term()) != 0, cb = sgn(f(b, b).constant_term()) != 0;
    if (ca != cb) return ca;
    return f(a, a).degree() < f(b, b).degree();
  });
  return idx;
}

/// Normalized diagonal (each entry divided by the absolute value of its
/// leading coefficient) used to deduplicate branches.
inline std::string diag_key(const RatMatrixPoly& d) {
  std::string key;
  for (int i = 0; i < d.size(); ++i) {
    const RatPoly& p = d(i, i);
    if (!p.is_zero()) {
      Rational lc = p.terms().rbegin()->second;
      key += (p * (1 / abs(lc))).to_string();
    } else {
      key += "0";
    }
    key += "|";
  }
  return key;
}

}  // namespace detail

/// Symmetric LDU-style diagonalization branching over every admissible pivot.
/// Throws BranchCapExceeded (carrying the branches found so far) when more
/// than `cap` distinct branches arise.
inline std::vector<DiagBranch> diagonalize_branching(const RatMatrixPoly& f, int cap = 64) {
  if (!f.is_square() || !f.symmetric()) throw DimensionMismatch("diagonalize_branching: f must be square and symmetric");
  const int t = f.size(), n = f.num_vars();
  std::vector<DiagBranch> out;
  std::set<std::string> seen;
  std::vector<detail::DiagState> stack{{RatMatrixPoly::identity(t, n), f, 0, ""}};
  while (!stack.empty()) {
    detail::DiagState s = std::move(stack.back());
    stack.pop_back();
    while (s.stage < t && detail::trailing_diagonal(s.f, s.stage)) s.stage = t;
    if (s.stage >= t) {
      std::string key = detail::diag_key(s.f);
      if (!seen.insert(key).second) continue;
      std::string label = s.label.empty() ? "diag" : s.label.substr(1);
      out.push_back({s.c, s.f, label});
      if (static_cast<int>(out.size()) > cap) {
        out.pop_back();
        throw BranchCapExceeded("diagonalize_branching: more than " + std::to_string(cap) + " branches", std::move(out));
      }
      continue;
    }
    const int k = s.stage;
    std::vector<int> piv = detail::pivot_order(s.f, k);
    if (piv.empty()) {
      // Diagonal of the trailing block vanishes identically: col_i <- col_i + col_j
      // turns f_ii into 2 f_ij.
      int pi = -1, pj = -1;
      for (int i = k; i < t && pi < 0; ++i)
        for (int j = i + 1; j < t; ++j)
          if (!s.f(i, j).is_zero()) {
            pi = i;
            pj = j;
            break;
          }
      RatMatrixPoly e = RatMatrixPoly::identity(t, n);
      e(pj, pi) = RatPoly(n, Rational(1));
      detail::congruence(s, e);
      s.label += " r(" + std::to_string(pi) + "," + std::to_string(pj) + ")";
      stack.push_back(std::move(s));
      continue;
    }
    // Push in reverse so the preferred pivot is explored first.
    for (auto it = piv.rbegin(); it != piv.rend(); ++it) {
      detail::DiagState b = s;
      detail::swap_congruence(b, k, *it);
      detail::eliminate(b);
      b.label += " p" + std::to_string(*it);
      b.stage = k + 1;
      stack.push_back(std::move(b));
    }
  }
  return out;
}

inline bool congruence_holds(const RatMatrixPoly& f, const DiagBranch& b) {
  return b.d.is_diagonal() && (b.c.adjoint() * f * b.c - b.d).is_zero();
}

/// d_j I = sum_k E_jk^T D E_jk, checked exactly.
inline bool diag_entry_identity(const RatMatrixPoly& d, int j) {
  const int t = d.size(), n = d.num_vars();
  RatMatrixPoly sum(t, t, n);
  for (int k = 0; k < t; ++k) {
    RatMatrixPoly e = RatMatrixPoly::unit(t, n, j, k);
    sum += e.adjoint() * d * e;
  }
  return (sum - RatMatrixPoly::scalar(t, d(j, j))).is_zero();
}

struct EquivalenceReport {
  int samples = 0;
  int failures = 0;
  std::vector<double> first_failure;
  bool passed() const { return failures == 0; }
};

namespace detail {

// Powers x_i^k, k = 0..deg, for fast repeated evaluation.
template <typename U>
std::vector<std::vector<U>> power_table(const std::vector<U>& x, int deg) {
  std::vector<std::vector<U>> pw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    pw[i].assign(static_cast<std::size_t>(deg + 1), U(1));
    for (int k = 1; k <= deg; ++k) pw[i][static_cast<std::size_t>(k)] = pw[i][static_cast<std::size_t>(k - 1)] * x[i];
  }
  return pw;
}

template <typename U, typename T>
U eval_with(const Polynomial<T>& p, const std::vector<std::vector<U>>& pw) {
  U s(0);
  for (const auto& [m, c] : p.terms()) {
    U term = coeff_cast<U, T>(c);
    for (std::size_t i = 0; i < pw.size(); ++i) term *= pw[i][static_cast<std::size_t>(m.exponents()[i])];
    s += term;
  }
  return s;
}

}  // namespace detail

/// At random points of [-r, r]^n: f(x) PSD iff every branch has D(x) PSD.
/// f(x) is tested exactly at the (rational) sample point.  A diagonal entry
/// of D takes its sign from double evaluation when |value| exceeds
/// tol * sum |c_a| |x^a|, and from exact evaluation otherwise.
inline EquivalenceReport check_pointwise_equivalence(const RatMatrixPoly& f, const std::vector<DiagBranch>& branches,
                                                     int samples = 1000, std::uint64_t seed = 0, double r = 2.0,
                                                     double tol = 1e-9) {
  const int n = f.num_vars(), t = f.size();
  int deg = std::max(0, f.degree());
  std::vector<RealMatrixPoly> dd, dabs;
  for (const auto& b : branches) {
    deg = std::max(deg, b.d.degree());
    dd.push_back(b.d.cast<double>());
    RealMatrixPoly a = dd.back();
    for (int j = 0; j < t; ++j) {
      RealPoly q(n);
      for (const auto& [m, c] : a(j, j).terms()) q.add_term(m, std::fabs(c));
      a(j, j) = q;
    }
    dabs.push_back(std::move(a));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-r, r);
  EquivalenceReport rep;
  std::vector<double> x(static_cast<std::size_t>(n)), ax(static_cast<std::size_t>(n));
  std::vector<Rational> xq(static_cast<std::size_t>(n));
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = unif(rng);
      ax[i] = std::fabs(x[i]);
      xq[i] = Rational(x[i]);
    }
    const auto pq = detail::power_table(xq, std::max(0, f.degree()));
    RatMatrix fx(t, t);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) fx(i, j) = detail::eval_with(f(i, j), pq);
    const bool f_psd = exact_is_psd(fx);

    const auto pd = detail::power_table(x, deg), pa = detail::power_table(ax, deg);
    std::optional<std::vector<std::vector<Rational>>> pqd;
    bool all_d = true;
    for (std::size_t b = 0; b < dd.size() && all_d; ++b)
      for (int j = 0; j < t; ++j) {
        const double v = detail::eval_with(dd[b](j, j), pd);
        const double mag = detail::eval_with(dabs[b](j, j), pa);
        bool negative;
        if (std::fabs(v) > tol * mag) {
          negative = v < 0;
        } else {
          if (!pqd) pqd = detail::power_table(xq, deg);
          negative = sgn(detail::eval_with(branches[b].d(j, j), *pqd)) < 0;
        }
        if (negative) {
          all_d = false;
          break;
        }
      }
    ++rep.samples;
    if (f_psd != all_d) {
      if (rep.failures == 0) rep.first_failure = x;
      ++rep.failures;
    }
  }
  return rep;
}

}  // namespace mpsatz
