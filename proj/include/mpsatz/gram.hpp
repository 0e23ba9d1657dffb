#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mpsatz/module.hpp"
#include "mpsatz/numla.hpp"
#include "mpsatz/sdp.hpp"

namespace mpsatz {

/// Columns of the stacked symbol [m(x) (x) I_t] for one generator.
/// Scalar generators (and the identity) use a compact block indexed
/// (a, k) -> a*t + k; a general matrix generator needs one copy per row of
/// the multiplier, indexed (k, a, r) -> (k*nm + a)*t + r.
struct LocalizingBasis {
  int generator = 0;
  int t = 1;
  int degree = 0;
  bool compact = true;
  std::vector<Monomial> monomials;

  int num_monomials() const { return static_cast<int>(monomials.size()); }
  int size() const { return compact ? t * num_monomials() : t * t * num_monomials(); }
  int compact_index(int a, int k) const { return a * t + k; }
  int general_index(int k, int a, int r) const { return (k * num_monomials() + a) * t + r; }
};

/// Free multiplier H (symmetric, entries of degree <= degree) for one
/// equality generator q; contributes q * H.
struct EqualityBasis {
  int equality = 0;
  int t = 1;
  int degree = 0;
  int offset = 0;
  std::vector<Monomial> monomials;

  static int num_pairs(int t) { return t * (t + 1) / 2; }
  static int pair_index(int t, int k, int l) { return k * t - k * (k - 1) / 2 + (l - k); }
  int count() const { return num_pairs(t) * static_cast<int>(monomials.size()); }
  int free_index(int k, int l, int g) const {
    return offset + pair_index(t, k, l) * static_cast<int>(monomials.size()) + g;
  }
};

struct ConstraintKey {
  Monomial alpha;
  int k = 0;
  int l = 0;
};

struct ConstraintKeyLess {
  bool operator()(const ConstraintKey& a, const ConstraintKey& b) const {
    if (a.alpha != b.alpha) return GrLexLess{}(a.alpha, b.alpha);
    if (a.k != b.k) return a.k < b.k;
    return a.l < b.l;
  }
};

/// Exact twin of an SdpConstraint (same symmetric-entry convention).
struct ExactConstraint {
  std::vector<std::tuple<int, int, int, Rational>> entries;
  std::vector<std::pair<int, Rational>> free;
  Rational rhs;
};

struct MembershipSdp {
  ModulePresentation module;
  RatMatrixPoly target;
  int degree = 0;
  std::vector<LocalizingBasis> bases;  // block b <-> bases[b]
  std::vector<EqualityBasis> eq_bases;
  std::vector<ConstraintKey> keys;
  std::vector<ExactConstraint> exact;
  std::map<ConstraintKey, int, ConstraintKeyLess> index;
  SdpInstance sdp;

  int constraint_index(const Monomial& alpha, int k, int l) const {
    if (k > l) std::swap(k, l);
    auto it = index.find(ConstraintKey{alpha, k, l});
    return it == index.end() ? -1 : it->second;
  }
};

inline int ceil_half(int v) { return v <= 0 ? 0 : (v + 1) / 2; }

/// Per-generator degree d_g = max(0, d - ceil(deg g / 2)).
inline int generator_degree(const RatMatrixPoly& g, int d) { return std::max(0, d - ceil_half(g.degree())); }

inline void check_target(const RatMatrixPoly& f, const ModulePresentation& m) {
  if (f.rows() != m.t || f.cols() != m.t) throw DimensionMismatch("target is not t x t");
  if (f.num_vars() != m.n) throw DimensionMismatch("target variable count differs from n");
  if (!f.symmetric()) throw DimensionMismatch("target is not symmetric");
}

/// Coefficient-matching SDP for f in M_G at degree d: one PSD block per
/// generator (identity first), one constraint per (monomial, k <= l).
inline MembershipSdp build_membership_sdp(const RatMatrixPoly& f, const ModulePresentation& m, int d) {
  m.validate();
  check_target(f, m);
  if (d < 0) throw DegreeTooSmall("degree must be nonnegative");
  const int n = m.n, t = m.t;
  MembershipSdp out;
  out.module = m;
  out.target = f;
  out.degree = d;

  struct Accum {
    std::map<std::tuple<int, int, int>, Rational> entries;
    std::map<int, Rational> free;
  };
  std::map<ConstraintKey, Accum, ConstraintKeyLess> acc;
  auto add_pair = [](Accum& a, int block, int i, int j, const Rational& c) {
    if (i == j) {
      a.entries[{block, i, i}] += c;
    } else {
      Rational half = c / 2;
      a.entries[{block, std::min(i, j), std::max(i, j)}] += half;
    }
  };

  for (int gi = 0; gi < m.num_generators(); ++gi) {
    const RatMatrixPoly g = m.generator(gi);
    LocalizingBasis basis;
    basis.generator = gi;
    basis.t = t;
    basis.degree = generator_degree(g, d);
    basis.compact = m.is_scalar(gi);
    basis.monomials = monomials_up_to(n, basis.degree);
    const int nm = basis.num_monomials();
    const int block = static_cast<int>(out.bases.size());
    if (basis.compact) {
      const RatPoly s = g(0, 0);
      for (int k = 0; k < t; ++k)
        for (int l = k; l < t; ++l)
          for (int a = 0; a < nm; ++a)
            for (int b = 0; b < nm; ++b) {
              const Monomial ab = basis.monomials[static_cast<std::size_t>(a)] * basis.monomials[static_cast<std::size_t>(b)];
              for (const auto& [beta, c] : s.terms())
                add_pair(acc[ConstraintKey{ab * beta, k, l}], block, basis.compact_index(a, k), basis.compact_index(b, l), c);
            }
    } else {
      for (int k = 0; k < t; ++k)
        for (int l = k; l < t; ++l)
          for (int a = 0; a < nm; ++a)
            for (int b = 0; b < nm; ++b) {
              const Monomial ab = basis.monomials[static_cast<std::size_t>(a)] * basis.monomials[static_cast<std::size_t>(b)];
              for (int r = 0; r < t; ++r)
                for (int r2 = 0; r2 < t; ++r2)
                  for (const auto& [beta, c] : g(r, r2).terms())
                    add_pair(acc[ConstraintKey{ab * beta, k, l}], block, basis.general_index(k, a, r),
                             basis.general_index(l, b, r2), c);
            }
    }
    out.bases.push_back(std::move(basis));
  }

  int num_free = 0;
  for (int qi = 0; qi < static_cast<int>(m.equalities.size()); ++qi) {
    const RatPoly& q = m.equalities[static_cast<std::size_t>(qi)];
    if (q.is_zero() || 2 * d - q.degree() < 0) continue;
    EqualityBasis eb;
    eb.equality = qi;
    eb.t = t;
    eb.degree = 2 * d - q.degree();
    eb.offset = num_free;
    eb.monomials = monomials_up_to(n, eb.degree);
    for (int k = 0; k < t; ++k)
      for (int l = k; l < t; ++l)
        for (int gm = 0; gm < static_cast<int>(eb.monomials.size()); ++gm)
          for (const auto& [beta, c] : q.terms())
            acc[ConstraintKey{eb.monomials[static_cast<std::size_t>(gm)] * beta, k, l}].free[eb.free_index(k, l, gm)] += c;
    num_free += eb.count();
    out.eq_bases.push_back(std::move(eb));
  }

  std::map<ConstraintKey, Rational, ConstraintKeyLess> rhs;
  for (int k = 0; k < t; ++k)
    for (int l = k; l < t; ++l)
      for (const auto& [alpha, c] : f(k, l).terms()) {
        ConstraintKey key{alpha, k, l};
        if (!acc.count(key))
          throw DegreeTooSmall("coefficient of " + alpha.to_string() + " at (" + std::to_string(k) + "," +
                               std::to_string(l) + ") lies outside the degree-" + std::to_string(d) + " span");
        rhs[key] = c;
      }

  for (int b = 0; b < static_cast<int>(out.bases.size()); ++b) out.sdp.blocks.push_back(out.bases[static_cast<std::size_t>(b)].size());
  out.sdp.num_free = num_free;
  for (auto& [key, a] : acc) {
    ExactConstraint ec;
    for (auto& [pos, v] : a.entries)
      if (sgn(v) != 0) ec.entries.emplace_back(std::get<0>(pos), std::get<1>(pos), std::get<2>(pos), v);
    for (auto& [fi, v] : a.free)
      if (sgn(v) != 0) ec.free.emplace_back(fi, v);
    auto it = rhs.find(key);
    ec.rhs = it == rhs.end() ? Rational(0) : it->second;
    if (ec.entries.empty() && ec.free.empty()) {
      if (sgn(ec.rhs) != 0) throw DegreeTooSmall("target coefficient of " + key.alpha.to_string() + " cannot be matched");
      continue;
    }
    SdpConstraint sc;
    for (const auto& [b, i, j, v] : ec.entries) sc.entries.push_back({b, i, j, v.get_d()});
    for (const auto& [fi, v] : ec.free) sc.free_coeffs.emplace_back(fi, v.get_d());
    sc.rhs = ec.rhs.get_d();
    out.index[key] = static_cast<int>(out.keys.size());
    out.keys.push_back(key);
    out.exact.push_back(std::move(ec));
    out.sdp.constraints.push_back(std::move(sc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

struct WeightedFactor {
  Rational weight;
  RatMatrixPoly p;
};

/// Contribution of one generator: a Gram block over its basis, or an explicit
/// factor list sum_i w_i p_i^T g p_i.
struct CertificatePart {
  int generator = 0;
  LocalizingBasis basis;
  bool has_gram = false;
  Eigen::MatrixXd gram;
  std::optional<RatMatrix> exact_gram;
  std::vector<RealMatrixPoly> factors;
  bool exact_factors_valid = false;
  std::vector<WeightedFactor> exact_factors;

  bool has_exact() const { return has_gram ? exact_gram.has_value() : exact_factors_valid; }
};

struct EqualityPart {
  int equality = 0;
  RealMatrixPoly multiplier;
  std::optional<RatMatrixPoly> exact_multiplier;
};

struct MembershipCertificate {
  ModulePresentation module;
  RatMatrixPoly target;
  int degree = 0;
  std::vector<CertificatePart> parts;
  std::vector<EqualityPart> equalities;

  bool has_exact() const {
    for (const auto& p : parts)
      if (!p.has_exact()) return false;
    for (const auto& e : equalities)
      if (!e.exact_multiplier) return false;
    return true;
  }
};

/// Polynomial matrix p (t x t) from a factor vector w over a basis: the
/// compact form fills row 0 only.
template <typename T, typename Vec>
MatrixPoly<T> factor_matrix(const Vec& w, const LocalizingBasis& b, int n) {
  MatrixPoly<T> p(b.t, b.t, n);
  const int nm = b.num_monomials();
  for (int a = 0; a < nm; ++a) {
    const Monomial& ma = b.monomials[static_cast<std::size_t>(a)];
    for (int k = 0; k < b.t; ++k) {
      if (b.compact) {
        p(0, k).add_term(ma, T(w[b.compact_index(a, k)]));
      } else {
        for (int r = 0; r < b.t; ++r) p(r, k).add_term(ma, T(w[b.general_index(k, a, r)]));
      }
    }
  }
  return p;
}

/// sum over the Gram block of m_a m_b gram(i, j) (times the generator).
template <typename T, typename Get>
MatrixPoly<T> gram_contribution(const MatrixPoly<T>& g, const LocalizingBasis& b, int n, Get get) {
  const int t = b.t, nm = b.num_monomials();
  MatrixPoly<T> out(t, t, n);
  if (b.compact) {
    for (int k = 0; k < t; ++k)
      for (int l = k; l < t; ++l) {
        Polynomial<T> s(n);
        for (int a = 0; a < nm; ++a)
          for (int c = 0; c < nm; ++c) {
            T v = get(b.compact_index(a, k), b.compact_index(c, l));
            if (CoeffTraits<T>::is_zero(v)) continue;
            s.add_term(b.monomials[static_cast<std::size_t>(a)] * b.monomials[static_cast<std::size_t>(c)], v);
          }
        out(k, l) = g(0, 0) * s;
        if (l != k) out(l, k) = out(k, l);
      }
    return out;
  }
  for (int k = 0; k < t; ++k)
    for (int l = k; l < t; ++l) {
      Polynomial<T> acc(n);
      for (int r = 0; r < t; ++r)
        for (int r2 = 0; r2 < t; ++r2) {
          if (g(r, r2).is_zero()) continue;
          Polynomial<T> s(n);
          for (int a = 0; a < nm; ++a)
            for (int c = 0; c < nm; ++c) {
              T v = get(b.general_index(k, a, r), b.general_index(l, c, r2));
              if (CoeffTraits<T>::is_zero(v)) continue;
              s.add_term(b.monomials[static_cast<std::size_t>(a)] * b.monomials[static_cast<std::size_t>(c)], v);
            }
          acc += g(r, r2) * s;
        }
      out(k, l) = acc;
      if (l != k) out(l, k) = acc;
    }
  return out;
}

/// Exact sum of all parts (requires exact data everywhere).
inline RatMatrixPoly reconstruct_exact(const MembershipCertificate& cert) {
  const int n = cert.module.n, t = cert.module.t;
  RatMatrixPoly sum(t, t, n);
  for (const auto& part : cert.parts) {
    if (!part.has_exact()) throw RationalizationFailed("certificate part has no exact data");
    const RatMatrixPoly g = cert.module.generator(part.generator);
    if (part.has_gram) {
      const RatMatrix& q = *part.exact_gram;
      sum += gram_contribution<Rational>(g, part.basis, n, [&](int i, int j) { return q(i, j); });
    } else {
      for (const auto& wf : part.exact_factors) sum += (wf.p.adjoint() * g * wf.p) * wf.weight;
    }
  }
  for (const auto& e : cert.equalities) {
    if (!e.exact_multiplier) throw RationalizationFailed("equality part has no exact data");
    sum += RatMatrixPoly::scalar(t, cert.module.equalities[static_cast<std::size_t>(e.equality)]) * *e.exact_multiplier;
  }
  return sum;
}

inline RealMatrixPoly reconstruct_numeric(const MembershipCertificate& cert) {
  const int n = cert.module.n, t = cert.module.t;
  RealMatrixPoly sum(t, t, n);
  for (const auto& part : cert.parts) {
    const RealMatrixPoly g = cert.module.generator(part.generator).cast<double>();
    if (part.has_gram) {
      sum += gram_contribution<double>(g, part.basis, n, [&](int i, int j) { return part.gram(i, j); });
    } else if (!part.factors.empty() || !part.exact_factors_valid) {
      for (const auto& p : part.factors) sum += p.adjoint() * g * p;
    } else {
      for (const auto& wf : part.exact_factors) sum += (wf.p.adjoint() * g.cast<Rational>() * wf.p * wf.weight).cast<double>();
    }
  }
  for (const auto& e : cert.equalities) {
    const auto q = cert.module.equalities[static_cast<std::size_t>(e.equality)].cast<double>();
    sum += RealMatrixPoly::scalar(t, q) * e.multiplier;
  }
  return sum;
}

/// Builds the numeric certificate from a Feasible solution; Gram blocks are
/// factored with psd_factor (rows = numerical rank).
inline MembershipCertificate certificate_from_solution(const SdpSolution& sol, const MembershipSdp& ms,
                                                       double factor_tol = 1e-10) {
  if (sol.status != SdpStatus::Feasible) throw Error("certificate_from_solution: solution is not Feasible");
  if (sol.blocks.size() != ms.bases.size()) throw DimensionMismatch("certificate_from_solution: block count mismatch");
  MembershipCertificate cert;
  cert.module = ms.module;
  cert.target = ms.target;
  cert.degree = ms.degree;
  const int n = ms.module.n, t = ms.module.t;
  for (std::size_t b = 0; b < ms.bases.size(); ++b) {
    CertificatePart part;
    part.generator = ms.bases[b].generator;
    part.basis = ms.bases[b];
    part.has_gram = true;
    part.gram = sol.blocks[b];
    const double lmax = part.gram.size() ? part.gram.cwiseAbs().maxCoeff() : 0.0;
    PsdFactor pf = psd_factor(part.gram, factor_tol * std::max(1.0, lmax));
    for (Eigen::Index r = 0; r < pf.factor.rows(); ++r) {
      Eigen::VectorXd w = pf.factor.row(r).transpose();
      part.factors.push_back(factor_matrix<double>(w, part.basis, n));
    }
    cert.parts.push_back(std::move(part));
  }
  for (const auto& eb : ms.eq_bases) {
    EqualityPart ep;
    ep.equality = eb.equality;
    ep.multiplier = RealMatrixPoly(t, t, n);
    for (int k = 0; k < t; ++k)
      for (int l = k; l < t; ++l) {
        RealPoly h(n);
        for (int g = 0; g < static_cast<int>(eb.monomials.size()); ++g)
          h.add_term(eb.monomials[static_cast<std::size_t>(g)], sol.free(eb.free_index(k, l, g)));
        ep.multiplier(k, l) = h;
        ep.multiplier(l, k) = h;
      }
    cert.equalities.push_back(std::move(ep));
  }
  return cert;
}

enum class VerifyMode { Exact, Numeric };

struct ResidualReport {
  VerifyMode mode = VerifyMode::Exact;
  bool passed = false;
  bool exact_zero = false;
  std::optional<RatMatrixPoly> exact_residual;
  double max_deviation = 0.0;
  double min_gram_eigenvalue = 0.0;
  double tolerance = 0.0;
  std::string note;
};

inline double target_scale(const RatMatrixPoly& f) { return std::max(1.0, f.max_abs_coefficient()); }

/// Never throws on certificate content; problems are reported.
inline ResidualReport verify_certificate(const MembershipCertificate& cert, VerifyMode mode, double tol = 1e-8) {
  ResidualReport rep;
  rep.mode = mode;
  const double scale = target_scale(cert.target);
  rep.tolerance = mode == VerifyMode::Exact ? 0.0 : 10.0 * tol * scale;
  double min_eig = std::numeric_limits<double>::infinity();
  try {
    if (mode == VerifyMode::Exact) {
      if (!cert.has_exact()) {
        rep.note = "certificate carries no exact data";
        return rep;
      }
      bool psd = true;
      for (const auto& part : cert.parts) {
        if (part.has_gram) {
          psd = psd && exact_is_psd(*part.exact_gram);
          if (part.exact_gram->rows() > 0) min_eig = std::min(min_eig, min_eigenvalue(part.exact_gram->to_double()));
        } else {
          for (const auto& wf : part.exact_factors) psd = psd && sgn(wf.weight) >= 0;
        }
      }
      RatMatrixPoly resid = cert.target - reconstruct_exact(cert);
      rep.exact_zero = resid.is_zero();
      rep.max_deviation = resid.max_abs_coefficient();
      rep.exact_residual = std::move(resid);
      rep.passed = rep.exact_zero && psd;
      if (!psd) rep.note = "exact Gram block or weight is not PSD";
    } else {
      for (const auto& part : cert.parts)
        if (part.has_gram && part.gram.rows() > 0) min_eig = std::min(min_eig, min_eigenvalue(part.gram));
      RealMatrixPoly resid = cert.target.cast<double>() - reconstruct_numeric(cert);
      rep.max_deviation = resid.max_abs_coefficient();
      rep.passed = rep.max_deviation <= rep.tolerance && !(min_eig < -rep.tolerance);
    }
  } catch (const std::exception& e) {
    rep.passed = false;
    rep.note = e.what();
  }
  rep.min_gram_eigenvalue = std::isfinite(min_eig) ? min_eig : 0.0;
  return rep;
}

/// Weighted exact factors (d_i, p_i) from the rational LDL^T of a Gram block.
inline std::vector<WeightedFactor> exact_factors_from_gram(const RatMatrix& q, const LocalizingBasis& b, int n) {
  auto ldl = exact_psd_ldl(q);
  if (!ldl) throw RationalizationFailed("Gram block is not PSD");
  std::vector<WeightedFactor> out;
  for (int i = 0; i < q.rows(); ++i) {
    if (sgn(ldl->diag[static_cast<std::size_t>(i)]) == 0) continue;
    std::vector<Rational> col(static_cast<std::size_t>(q.rows()));
    for (int r = 0; r < q.rows(); ++r) col[static_cast<std::size_t>(r)] = ldl->lower(r, i);
    out.push_back({ldl->diag[static_cast<std::size_t>(i)], factor_matrix<Rational>(col, b, n)});
  }
  return out;
}

/// Rounds Gram blocks and free values to bounded-denominator rationals,
/// absorbs the exact affine residual into the identity block (minimal-norm
/// correction; constraints touch disjoint identity-block entries) and
/// re-checks PSD-ness exactly.  Denominator bounds 10^2, 10^3, ... 10^max_exp.
inline MembershipCertificate rationalize(const MembershipCertificate& cert, const MembershipSdp& ms, int max_exp = 12) {
  if (cert.parts.size() != ms.bases.size()) throw DimensionMismatch("rationalize: certificate does not match the SDP");
  const int n = ms.module.n, t = ms.module.t;
  int num_free = ms.sdp.num_free;
  Eigen::VectorXd freev = Eigen::VectorXd::Zero(num_free);
  for (std::size_t e = 0; e < cert.equalities.size(); ++e) {
    const auto& eb = ms.eq_bases[e];
    for (int k = 0; k < t; ++k)
      for (int l = k; l < t; ++l)
        for (int g = 0; g < static_cast<int>(eb.monomials.size()); ++g)
          freev(eb.free_index(k, l, g)) = cert.equalities[e].multiplier(k, l).coefficient(eb.monomials[static_cast<std::size_t>(g)]);
  }
  // Rows forced to zero by facial reduction stay exactly zero; the
  // projection only moves entries of live rows.
  std::vector<std::vector<char>> live(cert.parts.size());
  {
    const detail::Presolved pre = detail::facial_reduce(ms.sdp);
    for (std::size_t b = 0; b < cert.parts.size(); ++b) {
      live[b].assign(static_cast<std::size_t>(cert.parts[b].gram.rows()), pre.changed ? 0 : 1);
      if (pre.changed && b < pre.keep.size())
        for (int i : pre.keep[b]) live[b][static_cast<std::size_t>(i)] = 1;
    }
  }
  auto alive = [&](int b, int i, int j) {
    return live[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] && live[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
  };
  Integer den = 10;
  for (int e = 2; e <= max_exp; ++e) {
    den *= 10;
    std::vector<RatMatrix> q;
    for (std::size_t b = 0; b < cert.parts.size(); ++b) {
      const auto& part = cert.parts[b];
      const int m = static_cast<int>(part.gram.rows());
      RatMatrix r(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          if (alive(static_cast<int>(b), i, j)) r(i, j) = round_rational(0.5 * (part.gram(i, j) + part.gram(j, i)), den);
          r(j, i) = r(i, j);
        }
      q.push_back(std::move(r));
    }
    std::vector<Rational> u(static_cast<std::size_t>(num_free));
    for (int f = 0; f < num_free; ++f) u[static_cast<std::size_t>(f)] = round_rational(freev(f), den);

    auto residual = [&](const ExactConstraint& c) {
      Rational s = c.rhs;
      for (const auto& [b, i, j, v] : c.entries) s -= (i == j ? v : 2 * v) * q[static_cast<std::size_t>(b)](i, j);
      for (const auto& [fi, v] : c.free) s -= v * u[static_cast<std::size_t>(fi)];
      return s;
    };
    bool ok = true;
    for (const auto& c : ms.exact) {
      Rational res = residual(c);
      if (sgn(res) == 0) continue;
      Rational norm2 = 0;
      for (const auto& [b, i, j, v] : c.entries)
        if (b == 0 && alive(0, i, j)) norm2 += (i == j ? 1 : 2) * v * v;
      if (sgn(norm2) == 0) {
        ok = false;
        break;
      }
      Rational theta = res / norm2;
      for (const auto& [b, i, j, v] : c.entries) {
        if (b != 0 || !alive(0, i, j)) continue;
        q[0](i, j) += theta * v;
        if (i != j) q[0](j, i) = q[0](i, j);
      }
    }
    if (!ok) continue;
    for (const auto& c : ms.exact)
      if (sgn(residual(c)) != 0) ok = false;
    if (!ok) continue;
    for (const auto& r : q)
      if (!exact_is_psd(r)) ok = false;
    if (!ok) continue;

    MembershipCertificate out = cert;
    for (std::size_t b = 0; b < out.parts.size(); ++b) {
      auto& part = out.parts[b];
      part.exact_gram = q[b];
      part.exact_factors = exact_factors_from_gram(q[b], part.basis, n);
      part.exact_factors_valid = true;
    }
    for (std::size_t e = 0; e < out.equalities.size(); ++e) {
      const auto& eb = ms.eq_bases[e];
      RatMatrixPoly h(t, t, n);
      for (int k = 0; k < t; ++k)
        for (int l = k; l < t; ++l) {
          RatPoly p(n);
          for (int g = 0; g < static_cast<int>(eb.monomials.size()); ++g)
            p.add_term(eb.monomials[static_cast<std::size_t>(g)], u[static_cast<std::size_t>(eb.free_index(k, l, g))]);
          h(k, l) = p;
          h(l, k) = p;
        }
      out.equalities[e].exact_multiplier = h;
    }
    return out;
  }
  throw RationalizationFailed("no bounded-denominator rounding keeps the Gram blocks PSD");
}

}  // namespace mpsatz
