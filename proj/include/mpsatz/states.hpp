#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpsatz/gram.hpp"

namespace mpsatz {

/// Truncated linear functional L on symmetric matrix polynomials, stored by
/// its values on the basis x^alpha * E_kl^sym (k <= l), where E_kk^sym = E_kk
/// and E_kl^sym = E_kl + E_lk.  A point evaluation p -> <p(x)v, v> has
/// moments x^alpha * (2 if k < l else 1) * v_k v_l.
struct SeparatingState {
  int n = 0;
  int t = 1;
  int degree = 0;  // truncation 2d
  std::map<ConstraintKey, double, ConstraintKeyLess> moments;
  double value_f = 0.0;
  std::vector<double> generator_slack;  // min eigenvalue of each localizing block
  bool normalized = false;

  double moment(const Monomial& alpha, int k, int l) const {
    if (k > l) std::swap(k, l);
    if (alpha.degree() > degree) throw DimensionMismatch("state: monomial exceeds the truncation degree");
    auto it = moments.find(ConstraintKey{alpha, k, l});
    return it == moments.end() ? 0.0 : it->second;
  }

  /// L(p) for symmetric p.
  double apply(const RealMatrixPoly& p) const {
    double s = 0.0;
    for (int k = 0; k < t; ++k)
      for (int l = k; l < t; ++l)
        for (const auto& [alpha, c] : p(k, l).terms()) s += c * moment(alpha, k, l);
    return s;
  }
  double apply(const RatMatrixPoly& p) const { return apply(p.cast<double>()); }

  /// L(I), the normalization.
  double unit_value() const {
    double s = 0.0;
    for (int k = 0; k < t; ++k) s += moment(Monomial(n), k, k);
    return s;
  }
};

struct PointVectorPair {
  std::vector<double> x;
  std::vector<double> v;  // unit, first nonzero coordinate positive
};

/// Moments of p -> <p(x)v, v> up to the given degree.
inline SeparatingState synthesize_state(const std::vector<double>& x, const std::vector<double>& v, int degree) {
  SeparatingState s;
  s.n = static_cast<int>(x.size());
  s.t = static_cast<int>(v.size());
  s.degree = degree;
  s.normalized = true;
  for (const auto& alpha : monomials_up_to(s.n, degree)) {
    const double xa = alpha.evaluate<double>(std::span<const double>(x));
    for (int k = 0; k < s.t; ++k)
      for (int l = k; l < s.t; ++l)
        s.moments[ConstraintKey{alpha, k, l}] = xa * (k < l ? 2.0 : 1.0) * v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(l)];
  }
  return s;
}

/// Convex combination w*a + (1-w)*b of two states on the same key set.
inline SeparatingState mix_states(const SeparatingState& a, const SeparatingState& b, double w) {
  if (a.n != b.n || a.t != b.t || a.degree != b.degree) throw DimensionMismatch("mix_states: incompatible states");
  SeparatingState s = a;
  for (auto& [key, val] : s.moments) val = w * val + (1.0 - w) * b.moment(key.alpha, key.k, key.l);
  s.value_f = w * a.value_f + (1.0 - w) * b.value_f;
  return s;
}

namespace detail {

/// sum_c y_c A_c restricted to one block (dense).
inline Eigen::MatrixXd localizing_block(const MembershipSdp& ms, const Eigen::VectorXd& y, int block) {
  const int m = ms.sdp.blocks[static_cast<std::size_t>(block)];
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c < ms.sdp.num_constraints(); ++c)
    for (const auto& e : ms.sdp.constraints[static_cast<std::size_t>(c)].entries) {
      if (e.block != block) continue;
      a(e.i, e.j) += y(c) * e.value;
      if (e.i != e.j) a(e.j, e.i) += y(c) * e.value;
    }
  return a;
}

inline SeparatingState state_from_values(const MembershipSdp& ms, const Eigen::VectorXd& y) {
  SeparatingState s;
  s.n = ms.module.n;
  s.t = ms.module.t;
  s.degree = 2 * ms.degree;
  for (const auto& key : ms.keys) s.degree = std::max(s.degree, key.alpha.degree());
  for (std::size_t c = 0; c < ms.keys.size(); ++c) s.moments[ms.keys[c]] = y(static_cast<Eigen::Index>(c));
  Eigen::VectorXd yy = y;
  const double unit = s.unit_value();
  const double scale = y.lpNorm<Eigen::Infinity>();
  if (unit > 1e-12 * std::max(1.0, scale)) {
    yy /= unit;
    s.normalized = true;
  } else if (scale > 0) {
    yy /= scale;
  }
  for (std::size_t c = 0; c < ms.keys.size(); ++c) s.moments[ms.keys[c]] = yy(static_cast<Eigen::Index>(c));
  s.value_f = s.apply(ms.target);
  for (int b = 0; b < static_cast<int>(ms.bases.size()); ++b) {
    Eigen::MatrixXd a = localizing_block(ms, yy, b);
    s.generator_slack.push_back(a.rows() ? min_eigenvalue(a) : 0.0);
  }
  return s;
}

}  // namespace detail

/// Separating state from a verified Farkas ray of a membership SDP.
inline SeparatingState state_from_dual(const SdpSolution& sol, const MembershipSdp& ms, double feas_tol = 1e-8) {
  if (sol.status != SdpStatus::Infeasible) throw RayNotVerifiable("solution carries no dual ray");
  Eigen::VectorXd y = sol.y;
  SdpOptions opts;
  opts.feas_tol = feas_tol;
  if (!verify_dual_ray(ms.sdp, y, opts)) throw RayNotVerifiable("dual ray fails re-verification");
  return detail::state_from_values(ms, y);
}

/// Minimizes L(f) over normalized truncated states (dual of max gamma with
/// f - gamma I in the truncated module).  Returns nullopt when the
/// optimization does not converge or the result is not a valid state.
inline std::optional<SeparatingState> sharpen_state(const MembershipSdp& ms, double feas_tol = 1e-8) {
  SdpInstance inst = ms.sdp;
  const int gamma = inst.num_free;
  inst.num_free += 1;
  inst.free_objective.assign(static_cast<std::size_t>(inst.num_free), 0.0);
  inst.free_objective[static_cast<std::size_t>(gamma)] = -1.0;
  bool any = false;
  for (int k = 0; k < ms.module.t; ++k) {
    int c = ms.constraint_index(Monomial(ms.module.n), k, k);
    if (c < 0) return std::nullopt;
    inst.constraints[static_cast<std::size_t>(c)].free_coeffs.emplace_back(gamma, 1.0);
    any = true;
  }
  if (!any) return std::nullopt;
  SdpOptions opts;
  opts.feas_tol = feas_tol;
  opts.gap_tol = 1e-10;
  SdpSolution sol = solve_feasibility(inst, opts);
  if (sol.status != SdpStatus::Feasible) return std::nullopt;
  Eigen::VectorXd y = -sol.y;
  SeparatingState s = detail::state_from_values(ms, y);
  if (!s.normalized || !(s.value_f < 0)) return std::nullopt;
  const double tol = 10.0 * feas_tol * target_scale(ms.target);
  for (double slack : s.generator_slack)
    if (slack < -tol) return std::nullopt;
  return s;
}

struct ExtractOptions {
  double eps = 1e-5;        // relative re-verification tolerance
  double rank_tol = 1e-4;   // lambda_2 / lambda_1 bound
};

struct ExtractionResult {
  bool ok = false;
  PointVectorPair pair;
  double max_error = 0.0;
  std::string reason;
};

inline void sign_normalize(std::vector<double>& v) {
  for (double c : v) {
    if (std::fabs(c) <= 1e-12) continue;
    if (c < 0)
      for (double& d : v) d = -d;
    return;
  }
}

/// Rank-one extraction of (x, v) with L(p) = <p(x)v, v>; the candidate is
/// re-verified on every moment of degree <= degree - 2.
inline ExtractionResult extract_point(const SeparatingState& st, const ExtractOptions& opts = {}) {
  ExtractionResult res;
  const int n = st.n, t = st.t;
  const Monomial one(n);
  Eigen::MatrixXd vmat(t, t);
  for (int k = 0; k < t; ++k)
    for (int l = 0; l < t; ++l) vmat(k, l) = k == l ? st.moment(one, k, k) : 0.5 * st.moment(one, k, l);
  SymEigen ev = sym_eigen(vmat);
  const double l1 = ev.values(t - 1);
  if (!(l1 > 0)) {
    res.reason = "V is not positive";
    return res;
  }
  if (t > 1 && ev.values(t - 2) / l1 > opts.rank_tol) {
    res.reason = "V is not rank one";
    return res;
  }
  std::vector<double> u(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) u[static_cast<std::size_t>(k)] = ev.vectors(k, t - 1);
  sign_normalize(u);

  if (n > 0 && st.degree < 1) {
    res.reason = "truncation too low for a point";
    return res;
  }
  // x from degree-1 moments on the well-conditioned diagonal positions.
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  double wsum = 0.0;
  std::vector<int> pos;
  for (int j = 0; j < t; ++j)
    if (u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)] > 0.1 / t) pos.push_back(j);
  for (int j : pos) wsum += vmat(j, j);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j : pos) s += st.moment(Monomial::variable(n, i), j, j);
    x[static_cast<std::size_t>(i)] = s / wsum;
  }

  // Scalar moment matrix on {1, x_1..x_n} must be rank one as well.
  if (n > 0 && st.degree >= 2) {
    auto ell = [&](const Monomial& a) {
      double s = 0.0;
      for (int k = 0; k < t; ++k) s += st.moment(a, k, k);
      return s;
    };
    std::vector<Monomial> b1 = monomials_up_to(n, 1);
    const int nb = static_cast<int>(b1.size());
    Eigen::MatrixXd m1(nb, nb);
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) m1(a, b) = ell(b1[static_cast<std::size_t>(a)] * b1[static_cast<std::size_t>(b)]);
    SymEigen me = sym_eigen(m1);
    if (!(me.values(nb - 1) > 0) || me.values(nb - 2) / me.values(nb - 1) > opts.rank_tol) {
      res.reason = "scalar moment matrix is not rank one";
      return res;
    }
  }

  // Re-verification on all moments of degree <= degree - 2 (or 0).
  const double scale = std::sqrt(l1);
  std::vector<double> w(u);
  for (double& c : w) c *= scale;
  double mmax = 1.0;
  for (const auto& [key, val] : st.moments) mmax = std::max(mmax, std::fabs(val));
  const int check_deg = std::max(0, st.degree - 2);
  double err = 0.0;
  for (const auto& [key, val] : st.moments) {
    if (key.alpha.degree() > check_deg) continue;
    const double pred = key.alpha.evaluate<double>(std::span<const double>(x)) * (key.k < key.l ? 2.0 : 1.0) *
                        w[static_cast<std::size_t>(key.k)] * w[static_cast<std::size_t>(key.l)];
    err = std::max(err, std::fabs(val - pred));
  }
  res.max_error = err / mmax;
  res.pair = {x, u};
  if (res.max_error > opts.eps) {
    res.reason = "moments are not reproduced by a point evaluation";
    return res;
  }
  res.ok = true;
  return res;
}

struct PointReport {
  double value = 0.0;                  // <f(x)v, v>
  std::vector<double> generator_min;   // lambda_min(g(x)) per generator in G
  bool in_region = true;
  bool success = false;
};

/// Checks <f(x)v,v> <= eps and lambda_min(g(x)) >= -eps for g in G.
inline PointReport verify_point(const PointVectorPair& pair, const RatMatrixPoly& f, const ModulePresentation& m,
                                double eps = 1e-6) {
  PointReport rep;
  if (static_cast<int>(pair.x.size()) != m.n || static_cast<int>(pair.v.size()) != m.t) {
    rep.in_region = false;
    return rep;
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(pair.v.data(), static_cast<Eigen::Index>(pair.v.size()));
  Eigen::MatrixXd fx = f.cast<double>().evaluate(pair.x);
  rep.value = v.dot(fx * v);
  for (const auto& g : m.generators) {
    const double mn = min_eigenvalue(g.cast<double>().evaluate(pair.x));
    rep.generator_min.push_back(mn);
    if (mn < -eps) rep.in_region = false;
  }
  for (const auto& q : m.equalities)
    if (std::fabs(q.cast<double>().evaluate<double>(pair.x)) > eps) rep.in_region = false;
  rep.success = rep.in_region && rep.value <= eps;
  return rep;
}

inline json state_to_json(const SeparatingState& s) {
  json j;
  j["format"] = "mpsatz-state";
  j["version"] = 1;
  j["n"] = s.n;
  j["t"] = s.t;
  j["degree"] = s.degree;
  j["normalized"] = s.normalized;
  j["value_f"] = s.value_f;
  j["generator_slack"] = s.generator_slack;
  json mom = json::array();
  for (const auto& [key, val] : s.moments)
    mom.push_back(json{{"monomial", key.alpha.exponents()}, {"k", key.k}, {"l", key.l}, {"value", val}});
  j["moments"] = std::move(mom);
  return j;
}

inline SeparatingState state_from_json(const json& j) {
  SeparatingState s;
  s.n = j.at("n").get<int>();
  s.t = j.at("t").get<int>();
  s.degree = j.at("degree").get<int>();
  s.normalized = j.value("normalized", false);
  s.value_f = j.value("value_f", 0.0);
  if (j.contains("generator_slack")) s.generator_slack = j.at("generator_slack").get<std::vector<double>>();
  for (const auto& m : j.at("moments")) {
    auto e = m.at("monomial").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != s.n) throw ParseError("state: monomial length differs from n");
    s.moments[ConstraintKey{Monomial(e), m.at("k").get<int>(), m.at("l").get<int>()}] = m.at("value").get<double>();
  }
  return s;
}

inline json pair_to_json(const PointVectorPair& p) { return json{{"x", p.x}, {"v", p.v}}; }

inline PointVectorPair pair_from_json(const json& j) {
  return {j.at("x").get<std::vector<double>>(), j.at("v").get<std::vector<double>>()};
}

}  // namespace mpsatz
