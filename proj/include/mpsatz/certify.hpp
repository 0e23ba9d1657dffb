#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "mpsatz/gram.hpp"
#include "mpsatz/setops.hpp"
#include "mpsatz/states.hpp"

namespace mpsatz {

enum class Verdict { CertificateFound, Separated, ExhaustedDegrees };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertificateFound: return "CertificateFound";
    case Verdict::Separated: return "Separated";
    default: return "ExhaustedDegrees";
  }
}

struct SearchOptions {
  int d_min = -1;  // default ceil(deg f / 2)
  int d_max = -1;  // default d_min + 4
  double feas_tol = 1e-8;
  int max_iter = 200;
  bool try_exact = true;
  int max_den_exp = 12;
  bool sharpen = true;  // moment optimization before point extraction
  ExtractOptions extract;
};

struct DegreeLog {
  int degree = 0;
  std::string status;
  int iterations = 0;
  std::string note;
};

struct SearchOutcome {
  Verdict verdict = Verdict::ExhaustedDegrees;
  int degree = -1;  // degree of the certificate / state, or last degree tried
  std::optional<MembershipCertificate> certificate;
  ResidualReport report;
  std::optional<SeparatingState> state;
  std::optional<ExtractionResult> extraction;
  std::optional<PointReport> point_report;
  std::vector<DegreeLog> log;
  std::vector<std::string> warnings;
  double seconds = 0.0;  // wall time; not serialized
};

namespace detail {

inline SdpOptions sdp_options(const SearchOptions& o) {
  SdpOptions s;
  s.feas_tol = o.feas_tol;
  s.max_iter = o.max_iter;
  return s;
}

/// Exact certificate when rationalization succeeds, else the numeric one if
/// it verifies numerically.
inline std::optional<std::pair<MembershipCertificate, ResidualReport>> verified_certificate(
    const SdpSolution& sol, const MembershipSdp& ms, const SearchOptions& opts, std::string& note) {
  MembershipCertificate cert = certificate_from_solution(sol, ms);
  if (opts.try_exact) {
    try {
      MembershipCertificate ex = rationalize(cert, ms, opts.max_den_exp);
      ResidualReport rep = verify_certificate(ex, VerifyMode::Exact, opts.feas_tol);
      if (rep.passed) return std::make_pair(std::move(ex), std::move(rep));
      note = "exact verification failed";
    } catch (const RationalizationFailed& e) {
      note = e.what();
    }
  }
  ResidualReport rep = verify_certificate(cert, VerifyMode::Numeric, opts.feas_tol);
  if (rep.passed) return std::make_pair(std::move(cert), std::move(rep));
  note += note.empty() ? "numeric verification failed" : "; numeric verification failed";
  return std::nullopt;
}

}  // namespace detail

/// Degree-scheduled search for f in M_G.  The first degree whose SDP is
/// feasible and whose certificate verifies wins.  When the last degree tried
/// is infeasible the outcome is Separated, carrying the separating state of
/// that truncation (sharpened and, when possible, an extracted point).
inline SearchOutcome find_membership(const RatMatrixPoly& f, const ModulePresentation& m, const SearchOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  m.validate();
  check_target(f, m);
  SearchOutcome out;
  const int d0 = opts.d_min >= 0 ? opts.d_min : ceil_half(f.degree());
  const int dmax = opts.d_max >= 0 ? opts.d_max : d0 + 4;
  const SdpOptions sopts = detail::sdp_options(opts);
  std::optional<MembershipSdp> last_ms;
  std::optional<SdpSolution> last_sol;
  bool last_infeasible = false;
  for (int d = d0; d <= dmax; ++d) {
    out.degree = d;
    DegreeLog lg;
    lg.degree = d;
    MembershipSdp ms;
    try {
      ms = build_membership_sdp(f, m, d);
    } catch (const DegreeTooSmall& e) {
      lg.status = "DegreeTooSmall";
      lg.note = e.what();
      out.log.push_back(lg);
      last_infeasible = false;
      continue;
    }
    SdpSolution sol = solve_feasibility(ms.sdp, sopts);
    lg.status = to_string(sol.status);
    lg.iterations = sol.metrics.iterations;
    last_infeasible = sol.status == SdpStatus::Infeasible;
    if (sol.status == SdpStatus::Feasible) {
      std::string note;
      auto vc = detail::verified_certificate(sol, ms, opts, note);
      lg.note = vc ? (vc->second.mode == VerifyMode::Exact ? "exact" : "numeric") : note;
      out.log.push_back(lg);
      if (vc) {
        out.verdict = Verdict::CertificateFound;
        out.certificate = std::move(vc->first);
        out.report = std::move(vc->second);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return out;
      }
      continue;
    }
    lg.note = sol.note;
    out.log.push_back(lg);
    if (last_infeasible) {
      last_ms = std::move(ms);
      last_sol = std::move(sol);
    }
  }
  if (last_infeasible && last_ms && last_sol) {
    out.degree = last_ms->degree;
    try {
      SeparatingState raw = state_from_dual(*last_sol, *last_ms, opts.feas_tol);
      std::optional<SeparatingState> sharp;
      if (opts.sharpen) sharp = sharpen_state(*last_ms, opts.feas_tol);
      const SeparatingState& use = sharp ? *sharp : raw;
      out.verdict = Verdict::Separated;
      out.state = use;
      ExtractionResult ex = extract_point(use, opts.extract);
      if (!ex.ok && sharp) {
        ExtractionResult ex2 = extract_point(raw, opts.extract);
        if (ex2.ok) {
          ex = ex2;
          out.state = raw;
        }
      }
      if (ex.ok) out.point_report = verify_point(ex.pair, f, m);
      out.extraction = std::move(ex);
    } catch (const RayNotVerifiable& e) {
      out.warnings.push_back(e.what());
      out.verdict = Verdict::ExhaustedDegrees;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// Archimedean witness

struct ArchWitness {
  Rational N;
  MembershipCertificate certificate;
  ResidualReport report;
};

/// Searches N in {1, 2, 4, ..., N_max} (outer) and degrees 1..d_max (inner)
/// for N - sum x_i^2 (times I_t) in M_G.
inline std::optional<ArchWitness> archimedean_witness(const ModulePresentation& m, long n_max = 1024, int d_max = 3,
                                                      const SearchOptions& base = {}) {
  m.validate();
  for (long nv = 1; nv <= std::max(1L, n_max); nv *= 2) {
    RatMatrixPoly target = ball_generator(m.n, m.t, Rational(nv));
    SearchOptions o = base;
    o.d_min = 1;
    o.d_max = d_max;
    o.sharpen = false;
    const SdpOptions sopts = detail::sdp_options(o);
    for (int d = 1; d <= d_max; ++d) {
      MembershipSdp ms;
      try {
        ms = build_membership_sdp(target, m, d);
      } catch (const DegreeTooSmall&) {
        continue;
      }
      SdpSolution sol = solve_feasibility(ms.sdp, sopts);
      if (sol.status != SdpStatus::Feasible) continue;
      std::string note;
      auto vc = detail::verified_certificate(sol, ms, o, note);
      if (vc) return ArchWitness{Rational(nv), std::move(vc->first), std::move(vc->second)};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// nnsd certificates: sum_i w_i p_i^T f p_i in I + M_G

struct NnsdOutcome {
  SearchOutcome search;  // search for -I in M_{G + {-f}}
  std::vector<WeightedFactor> transformers;         // exact (weight, p_i)
  std::vector<RealMatrixPoly> numeric_transformers;  // p_i with unit weight
  std::optional<MembershipCertificate> rearranged;   // sum w p^T f p - I as an M_G element
  std::optional<ResidualReport> rearranged_report;
};

/// Runs the search for -I in M_{G + {-f}} and moves the (-f)-weighted terms
/// across.  Separated is reported only when a point with f(x) <= 0 (NSD)
/// inside S_G was extracted and verified; otherwise the outcome is
/// ExhaustedDegrees.
inline NnsdOutcome find_nnsd_certificate(const RatMatrixPoly& f, const ModulePresentation& m, const SearchOptions& opts = {},
                                         bool assume_archimedean = false) {
  m.validate();
  check_target(f, m);
  NnsdOutcome res;
  ModulePresentation ext = m;
  ext.generators.push_back(-f);
  const int fidx = ext.num_generators() - 1;
  SearchOptions o = opts;
  if (o.d_min < 0) o.d_min = 0;
  if (o.d_max < 0) o.d_max = o.d_min + 4;
  RatMatrixPoly target = -RatMatrixPoly::identity(m.t, m.n);
  res.search = find_membership(target, ext, o);
  if (!assume_archimedean && !archimedean_witness(m, 16, 2, opts))
    res.search.warnings.push_back("NotArchimedeanWarning: no archimedean witness found; completeness is not guaranteed");

  if (res.search.verdict == Verdict::Separated) {
    const bool verified = res.search.point_report && res.search.point_report->success;
    if (!verified) {
      res.search.verdict = Verdict::ExhaustedDegrees;
      res.search.warnings.push_back("separating state has no verified point; reported as exhausted");
    }
    return res;
  }
  if (res.search.verdict != Verdict::CertificateFound) return res;

  const MembershipCertificate& cert = *res.search.certificate;
  MembershipCertificate rest;
  rest.module = m;
  rest.degree = cert.degree;
  rest.equalities = cert.equalities;
  RatMatrixPoly lhs(m.t, m.t, m.n);
  RealMatrixPoly lhs_num(m.t, m.t, m.n);
  for (const auto& part : cert.parts) {
    if (part.generator == fidx) {
      for (const auto& p : part.factors) {
        res.numeric_transformers.push_back(p);
        lhs_num += p.adjoint() * f.cast<double>() * p;
      }
      if (part.has_exact()) {
        for (const auto& wf : part.exact_factors) {
          res.transformers.push_back(wf);
          lhs += (wf.p.adjoint() * f * wf.p) * wf.weight;
        }
      }
    } else {
      rest.parts.push_back(part);
    }
  }
  const bool exact = cert.has_exact();
  if (exact) {
    rest.target = lhs - RatMatrixPoly::identity(m.t, m.n);
    res.rearranged_report = verify_certificate(rest, VerifyMode::Exact, opts.feas_tol);
  } else {
    // Numeric target: round the double sum to its exact binary value.
    RatMatrixPoly tgt(m.t, m.t, m.n);
    for (int i = 0; i < m.t; ++i)
      for (int j = 0; j < m.t; ++j) tgt(i, j) = lhs_num(i, j).cast<Rational>();
    for (int i = 0; i < m.t; ++i)
      for (int j = i + 1; j < m.t; ++j) tgt(j, i) = tgt(i, j);
    rest.target = tgt - RatMatrixPoly::identity(m.t, m.n);
    res.rearranged_report = verify_certificate(rest, VerifyMode::Numeric, opts.feas_tol);
  }
  res.rearranged = std::move(rest);
  if (!res.rearranged_report->passed) {
    res.search.verdict = Verdict::ExhaustedDegrees;
    res.search.warnings.push_back("rearranged identity failed verification");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Constant matrices

struct ConstantWitness {
  std::vector<Eigen::MatrixXd> b;  // numeric B_i = lambda^{-1/2} u e_i^T
  double residual = 0.0;           // ||sum B_i^T A B_i - I||
  bool exact = false;
  Rational weight;                 // exact form: sum_i weight * (u e_i^T)^T A (u e_i^T) = I
  std::vector<Rational> u;
};

inline ConstantWitness constant_nnsd_witness(const RatMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionMismatch("constant_nnsd_witness: need a nonempty square matrix");
  if (!a.symmetric()) throw DimensionMismatch("constant_nnsd_witness: matrix is not symmetric");
  const int t = a.rows();
  const Eigen::MatrixXd ad = a.to_double();
  SymEigen ev = sym_eigen(ad);
  const double lam = ev.values(t - 1);
  if (!(lam > 0)) throw NegativeSemidefiniteInput("constant_nnsd_witness: no positive eigenvalue");
  Eigen::VectorXd u = ev.vectors.col(t - 1);
  std::vector<double> us(u.data(), u.data() + t);
  sign_normalize(us);
  u = Eigen::Map<Eigen::VectorXd>(us.data(), t);
  ConstantWitness w;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(t, t);
  for (int i = 0; i < t; ++i) {
    Eigen::MatrixXd bi = Eigen::MatrixXd::Zero(t, t);
    bi.col(i) = u / std::sqrt(lam);
    sum += bi.transpose() * ad * bi;
    w.b.push_back(std::move(bi));
  }
  w.residual = (sum - Eigen::MatrixXd::Identity(t, t)).norm();
  // Any rational u with u^T A u > 0 gives an exact identity with weight 1/(u^T A u).
  for (int e = 1; e <= 12 && !w.exact; ++e) {
    Integer den = 1;
    for (int k = 0; k < e; ++k) den *= 10;
    std::vector<Rational> ur(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) ur[static_cast<std::size_t>(i)] = round_rational(u(i), den);
    Rational quad = 0;
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) quad += ur[static_cast<std::size_t>(i)] * a(i, j) * ur[static_cast<std::size_t>(j)];
    if (sgn(quad) > 0) {
      w.exact = true;
      w.weight = 1 / quad;
      w.u = ur;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Product module and trace reduction

/// The 2^m - 1 nontrivial products g_1^{d_1} ... g_m^{d_m}, d in {0,1}^m,
/// in binary-counting order (bit i of the counter selects g_{i+1}).
inline std::vector<RatPoly> product_module(const std::vector<RatPoly>& g) {
  const std::size_t m = g.size();
  if (m > 20) throw MalformedInstance("product_module: more than 20 generators refused");
  std::vector<RatPoly> out;
  if (m == 0) return out;
  const int n = g.front().num_vars();
  for (unsigned long mask = 1; mask < (1UL << m); ++mask) {
    RatPoly p(n, Rational(1));
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1UL << i)) p = p * g[i];
    out.push_back(std::move(p));
  }
  return out;
}

/// (1/t) trace of a certificate over scalar generators g I_t: a scalar
/// certificate in Q_G with Gram blocks Q_s = (1/t) sum_k Q[(.,k),(.,k)].
inline MembershipCertificate trace_reduce(const MembershipCertificate& cert) {
  const int n = cert.module.n, t = cert.module.t;
  for (const auto& part : cert.parts)
    if (!cert.module.is_scalar(part.generator)) throw NonScalarGenerator("trace_reduce: generator is not of the form g I_t");
  MembershipCertificate out;
  out.module.n = n;
  out.module.t = 1;
  for (const auto& g : cert.module.generators) out.module.generators.push_back(RatMatrixPoly::from_scalar(g(0, 0)));
  out.module.equalities = cert.module.equalities;
  out.degree = cert.degree;
  const Rational inv_t(1, t);
  out.target = RatMatrixPoly::from_scalar(cert.target.trace() * inv_t);
  for (const auto& part : cert.parts) {
    CertificatePart sp;
    sp.generator = part.generator;
    sp.basis = part.basis;
    sp.basis.t = 1;
    const int nm = part.basis.num_monomials();
    if (part.has_gram) {
      sp.has_gram = true;
      sp.gram = Eigen::MatrixXd::Zero(nm, nm);
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b)
          for (int k = 0; k < t; ++k)
            sp.gram(a, b) += part.gram(part.basis.compact_index(a, k), part.basis.compact_index(b, k)) / t;
      if (part.exact_gram) {
        RatMatrix q(nm, nm);
        for (int a = 0; a < nm; ++a)
          for (int b = 0; b < nm; ++b) {
            Rational s = 0;
            for (int k = 0; k < t; ++k) s += (*part.exact_gram)(part.basis.compact_index(a, k), part.basis.compact_index(b, k));
            q(a, b) = s * inv_t;
          }
        sp.exact_gram = q;
        sp.exact_factors = exact_factors_from_gram(q, sp.basis, n);
        sp.exact_factors_valid = true;
      }
      PsdFactor pf = psd_factor(sp.gram, 1e-10 * std::max(1.0, sp.gram.size() ? sp.gram.cwiseAbs().maxCoeff() : 0.0));
      for (Eigen::Index r = 0; r < pf.factor.rows(); ++r) {
        Eigen::VectorXd w = pf.factor.row(r).transpose();
        sp.factors.push_back(factor_matrix<double>(w, sp.basis, n));
      }
    } else {
      // tr(p^T p) = sum_{r,k} p_rk^2: every entry becomes a 1x1 factor.
      const double s = 1.0 / std::sqrt(static_cast<double>(t));
      for (const auto& p : part.factors)
        for (int r = 0; r < t; ++r)
          for (int k = 0; k < t; ++k)
            if (!p(r, k).is_zero()) sp.factors.push_back(RealMatrixPoly::from_scalar(p(r, k) * s));
      sp.exact_factors_valid = part.exact_factors_valid;
      for (const auto& wf : part.exact_factors)
        for (int r = 0; r < t; ++r)
          for (int k = 0; k < t; ++k)
            if (!wf.p(r, k).is_zero()) sp.exact_factors.push_back({wf.weight * inv_t, RatMatrixPoly::from_scalar(wf.p(r, k))});
    }
    out.parts.push_back(std::move(sp));
  }
  for (const auto& e : cert.equalities) {
    EqualityPart ep;
    ep.equality = e.equality;
    ep.multiplier = RealMatrixPoly::from_scalar(e.multiplier.trace() * (1.0 / t));
    if (e.exact_multiplier) ep.exact_multiplier = RatMatrixPoly::from_scalar(e.exact_multiplier->trace() * inv_t);
    out.equalities.push_back(std::move(ep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial and real-eigenvalue certificates

struct CharPolyResult {
  RatPoly q;                    // det(Y I - f) in variables (x_1..x_n, Y)
  std::vector<RatPoly> coeffs;  // coefficient of Y^k, k = 0..t, in x only
  std::string kind = "characteristic";
  bool cayley_hamilton = false; // q(x, f) == 0 verified exactly
};

/// Substitutes Y -> f into a polynomial of (x, Y) (Y the last variable).
inline RatMatrixPoly substitute_matrix(const RatPoly& p, const RatMatrixPoly& f) {
  const int n = f.num_vars(), t = f.size();
  if (p.num_vars() != n + 1) throw DimensionMismatch("substitute_matrix: polynomial must have n + 1 variables");
  std::vector<RatMatrixPoly> pw{RatMatrixPoly::identity(t, n)};
  RatMatrixPoly out(t, t, n);
  for (const auto& [mono, c] : p.terms()) {
    const int e = mono.exponents()[static_cast<std::size_t>(n)];
    while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * f);
    std::vector<int> xe(mono.exponents().begin(), mono.exponents().end() - 1);
    out += RatPoly::monomial(Monomial(xe), c) * pw[static_cast<std::size_t>(e)];
  }
  return out;
}

/// Faddeev-LeVerrier over Q[x].
inline CharPolyResult char_poly(const RatMatrixPoly& f) {
  const int t = f.size(), n = f.num_vars();
  CharPolyResult res;
  res.coeffs.assign(static_cast<std::size_t>(t + 1), RatPoly(n));
  res.coeffs[static_cast<std::size_t>(t)] = RatPoly(n, Rational(1));
  RatMatrixPoly mk = RatMatrixPoly::zero(t, n);
  for (int k = 1; k <= t; ++k) {
    mk = f * mk + RatMatrixPoly::scalar(t, res.coeffs[static_cast<std::size_t>(t - k + 1)]);
    res.coeffs[static_cast<std::size_t>(t - k)] = (f * mk).trace() * Rational(-1, k);
  }
  res.q = RatPoly(n + 1);
  for (int k = 0; k <= t; ++k)
    for (const auto& [mono, c] : res.coeffs[static_cast<std::size_t>(k)].terms()) {
      std::vector<int> e = mono.exponents();
      e.push_back(k);
      res.q.add_term(Monomial(e), c);
    }
  res.cayley_hamilton = substitute_matrix(res.q, f).is_zero();
  return res;
}

struct RealEigenOutcome {
  SearchOutcome search;  // scalar search for Y in Q_{G, +-q_f}
  CharPolyResult char_poly;
  bool matrix_verified = false;  // f == sum_j sum_i w_i p_i(x,f)^2 g_j + h(x,f) q_f(x,f)
  bool matrix_exact = false;
  double matrix_deviation = 0.0;
};

/// Searches Y in Q_{G + {q_f, -q_f}} over (x, Y) and substitutes Y -> f.
inline RealEigenOutcome real_eigenvalue_certificate(const RatMatrixPoly& f, const std::vector<RatPoly>& g,
                                                    const SearchOptions& opts = {}) {
  if (!f.is_square()) throw DimensionMismatch("real_eigenvalue_certificate: f must be square");
  const int n = f.num_vars(), t = f.size();
  RealEigenOutcome res;
  res.char_poly = char_poly(f);
  ModulePresentation m;
  m.n = n + 1;
  m.t = 1;
  for (const auto& gi : g) {
    if (gi.num_vars() != n) throw DimensionMismatch("real_eigenvalue_certificate: generator variable count differs");
    m.generators.push_back(RatMatrixPoly::from_scalar(gi.resized(n + 1)));
  }
  m.equalities.push_back(res.char_poly.q);
  const RatMatrixPoly target = RatMatrixPoly::from_scalar(RatPoly::variable(n + 1, n));
  res.search = find_membership(target, m, opts);
  if (res.search.verdict != Verdict::CertificateFound) return res;

  const MembershipCertificate& cert = *res.search.certificate;
  if (cert.has_exact()) {
    RatMatrixPoly sum(t, t, n);
    for (const auto& part : cert.parts) {
      const RatMatrixPoly gm = part.generator == 0 ? RatMatrixPoly::identity(t, n)
                                                  : RatMatrixPoly::scalar(t, g[static_cast<std::size_t>(part.generator - 1)]);
      for (const auto& wf : part.exact_factors) {
        const RatMatrixPoly pf = substitute_matrix(wf.p(0, 0), f);
        sum += (pf * pf * gm) * wf.weight;
      }
    }
    for (const auto& e : cert.equalities) {
      const RatMatrixPoly h = substitute_matrix((*e.exact_multiplier)(0, 0), f);
      sum += h * substitute_matrix(m.equalities[static_cast<std::size_t>(e.equality)], f);
    }
    const RatMatrixPoly diff = f - sum;
    res.matrix_exact = true;
    res.matrix_deviation = diff.max_abs_coefficient();
    res.matrix_verified = diff.is_zero();
    if (!res.matrix_verified) throw SubstitutionMismatch("matrix identity fails after substituting Y -> f");
  } else {
    // Numeric: substitute the rounded scalar factors.
    RealMatrixPoly sum(t, t, n);
    for (const auto& part : cert.parts) {
      const RealMatrixPoly gm = part.generator == 0 ? RealMatrixPoly::identity(t, n)
                                                   : RealMatrixPoly::scalar(t, g[static_cast<std::size_t>(part.generator - 1)].cast<double>());
      for (const auto& p : part.factors) {
        const RealMatrixPoly pf = substitute_matrix(p(0, 0).cast<Rational>(), f).cast<double>();
        sum += pf * pf * gm;
      }
    }
    for (const auto& e : cert.equalities) {
      const RealMatrixPoly h = substitute_matrix(e.multiplier(0, 0).cast<Rational>(), f).cast<double>();
      sum += h * substitute_matrix(m.equalities[static_cast<std::size_t>(e.equality)], f).cast<double>();
    }
    res.matrix_deviation = (f.cast<double>() - sum).max_abs_coefficient();
    res.matrix_verified = res.matrix_deviation <= 10.0 * opts.feas_tol * target_scale(f) * 100.0;
  }
  return res;
}

}  // namespace mpsatz
