#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "mpsatz/gram.hpp"

namespace mpsatz {

struct JakubovicResult {
  RealMatrixPoly g;         // f ~= adjoint(g) g, g is r x t
  double residual = 0.0;    // max coefficient of f - adjoint(g) g
  double scale = 1.0;       // max coefficient of f
  bool exact = false;
  // Exact form: f = adjoint(rows) diag(weights) rows.
  std::vector<Rational> weights;
  std::optional<RatMatrixPoly> exact_rows;
};

namespace detail {

inline double lam_min_at(const RealMatrixPoly& f, double z) { return min_eigenvalue(f.evaluate(std::vector<double>{z})); }

/// z = +-1, +-2, +-4, ... looking for lambda_min(f(z)) < -tol * scale * (1 + |z|^deg).
inline std::optional<double> growth_witness(const RealMatrixPoly& f, double tol, double scale) {
  const int deg = std::max(0, f.degree());
  for (int e = 0; e <= 40; ++e) {
    for (double s : {-1.0, 1.0}) {
      const double z = s * std::ldexp(1.0, e);
      if (lam_min_at(f, z) < -tol * scale * (1.0 + std::pow(std::fabs(z), deg))) return z;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Factor a univariate symmetric f that is PSD on the real line as
/// adjoint(g) g via a Gram SDP over {1, Z, ..., Z^{deg/2}} (x) R^t.
inline JakubovicResult jakubovic_factor(const RatMatrixPoly& f, double tol = 1e-8) {
  if (!f.is_square()) throw DimensionMismatch("jakubovic_factor: f must be square");
  if (f.num_vars() != 1) throw DimensionMismatch("jakubovic_factor: f must be univariate");
  if (!f.symmetric()) throw DimensionMismatch("jakubovic_factor: f must be symmetric");
  const int t = f.size();
  const int deg = f.degree();
  const RealMatrixPoly fd = f.cast<double>();
  JakubovicResult res;
  res.scale = std::max(1.0, f.max_abs_coefficient());
  if (deg < 0) {
    res.g = RealMatrixPoly(1, t, 1);
    res.exact = true;
    res.weights = {Rational(1)};
    res.exact_rows = RatMatrixPoly(1, t, 1);
    return res;
  }

  auto fail = [&](double z, const std::string& why) -> NotPsdOnLine {
    return NotPsdOnLine("jakubovic_factor: " + why, z, detail::lam_min_at(fd, z));
  };
  if (deg % 2 == 1) {
    auto z = detail::growth_witness(fd, tol, res.scale);
    throw fail(z.value_or(-1.0), "odd degree");
  }
  // Leading coefficient must be PSD.
  {
    Eigen::MatrixXd lead(t, t);
    const Monomial top = Monomial::variable(1, 0, deg);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) lead(i, j) = fd(i, j).coefficient(top);
    if (min_eigenvalue(lead) < -tol * res.scale) {
      auto z = detail::growth_witness(fd, tol, res.scale);
      throw fail(z.value_or(1e6), "leading coefficient is not PSD");
    }
  }
  // Chebyshev scan over a radius from the coefficient magnitudes.
  double lead_mag = 0, rest_mag = 0;
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (const auto& [m, c] : fd(i, j).terms()) {
        double& slot = m.degree() == deg ? lead_mag : rest_mag;
        slot = std::max(slot, std::fabs(c));
      }
  const double radius = 1.0 + (lead_mag > 0 ? rest_mag / lead_mag : rest_mag);
  double worst = std::numeric_limits<double>::infinity(), worst_z = 0.0;
  const int nodes = 257;
  for (double r : {1.0, radius}) {
    for (int i = 0; i < nodes; ++i) {
      const double z = r * std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * nodes));
      const double lm = detail::lam_min_at(fd, z);
      const double thr = -tol * res.scale * (1.0 + std::pow(std::fabs(z), deg));
      if (lm < thr) throw fail(z, "not PSD at a sampled point");
      if (lm / (1.0 + std::pow(std::fabs(z), deg)) < worst) {
        worst = lm / (1.0 + std::pow(std::fabs(z), deg));
        worst_z = z;
      }
    }
  }

  ModulePresentation m(1, t);
  MembershipSdp ms = build_membership_sdp(f, m, deg / 2);
  SdpOptions so;
  so.feas_tol = tol;
  SdpSolution sol = solve_feasibility(ms.sdp, so);
  if (sol.status != SdpStatus::Feasible) throw fail(worst_z, "Gram SDP has no PSD solution");
  MembershipCertificate cert = certificate_from_solution(sol, ms);
  const CertificatePart& part = cert.parts.at(0);
  const LocalizingBasis& b = part.basis;
  const int nm = b.num_monomials();

  const double qscale = std::max(1.0, part.gram.cwiseAbs().maxCoeff());
  PsdFactor pf = psd_factor(part.gram, 1e-12 * qscale);
  const int rows = static_cast<int>(pf.factor.rows());
  res.g = RealMatrixPoly(std::max(rows, 1), t, 1);
  for (int r = 0; r < rows; ++r)
    for (int l = 0; l < t; ++l)
      for (int a = 0; a < nm; ++a) {
        const double c = pf.factor(r, b.compact_index(a, l));
        if (c != 0.0) res.g(r, l).add_term(b.monomials[static_cast<std::size_t>(a)], c);
      }
  res.residual = (fd - res.g.adjoint() * res.g).max_abs_coefficient();

  try {
    MembershipCertificate ex = rationalize(cert, ms);
    const CertificatePart& ep = ex.parts.at(0);
    if (ep.exact_factors_valid) {
      RatMatrixPoly er(std::max<int>(1, static_cast<int>(ep.exact_factors.size())), t, 1);
      std::vector<Rational> w;
      for (std::size_t r = 0; r < ep.exact_factors.size(); ++r) {
        w.push_back(ep.exact_factors[r].weight);
        for (int l = 0; l < t; ++l) er(static_cast<int>(r), l) = ep.exact_factors[r].p(0, l);
      }
      if (w.empty()) w.push_back(Rational(0));
      RatMatrixPoly sum(t, t, 1);
      for (std::size_t r = 0; r < w.size(); ++r) {
        RatMatrixPoly row(1, t, 1);
        for (int l = 0; l < t; ++l) row(0, l) = er(static_cast<int>(r), l);
        sum += (row.adjoint() * row) * w[r];
      }
      if ((sum - f).is_zero()) {
        // Numeric g from the exact LDL form: row r scaled by sqrt(w_r).
        RealMatrixPoly ge(static_cast<int>(w.size()), t, 1);
        for (std::size_t r = 0; r < w.size(); ++r)
          for (int l = 0; l < t; ++l)
            ge(static_cast<int>(r), l) = er(static_cast<int>(r), l).cast<double>() * std::sqrt(w[r].get_d());
        res.g = std::move(ge);
        res.residual = (fd - res.g.adjoint() * res.g).max_abs_coefficient();
        res.exact = true;
        res.weights = std::move(w);
        res.exact_rows = std::move(er);
      }
    }
  } catch (const RationalizationFailed&) {
  }
  return res;
}

}  // namespace mpsatz
