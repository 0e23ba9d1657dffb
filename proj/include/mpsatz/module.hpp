#pragma once

#include <string>
#include <vector>

#include "mpsatz/matrix_poly.hpp"
#include "mpsatz/poly_json.hpp"

namespace mpsatz {

/// Generator list G of a quadratic module M_G in R[x1..xn]^{t x t}.  The
/// identity generator is implicit (index 0); G[i] has generator index i+1.
/// Scalar equality generators q contribute q * H for an arbitrary symmetric
/// H (the ideal part, i.e. the pair {q, -q}).
struct ModulePresentation {
  int n = 0;
  int t = 1;
  std::vector<RatMatrixPoly> generators;
  std::vector<RatPoly> equalities;

  ModulePresentation() = default;
  ModulePresentation(int n_, int t_, std::vector<RatMatrixPoly> g = {}, std::vector<RatPoly> eq = {})
      : n(n_), t(t_), generators(std::move(g)), equalities(std::move(eq)) {
    validate();
  }

  int num_generators() const { return static_cast<int>(generators.size()) + 1; }

  RatMatrixPoly generator(int idx) const {
    if (idx == 0) return RatMatrixPoly::identity(t, n);
    return generators.at(static_cast<std::size_t>(idx - 1));
  }

  bool is_scalar(int idx) const { return idx == 0 || generator(idx).is_scalar_identity(); }

  void validate() const {
    if (n < 0 || t < 1) throw DimensionMismatch("module: need n >= 0 and t >= 1");
    for (const auto& g : generators) {
      if (g.rows() != t || g.cols() != t) throw DimensionMismatch("module: generator is not t x t");
      if (g.num_vars() != n) throw DimensionMismatch("module: generator variable count differs from n");
      if (!g.symmetric()) throw DimensionMismatch("module: generator is not symmetric");
    }
    for (const auto& q : equalities)
      if (q.num_vars() != n) throw DimensionMismatch("module: equality variable count differs from n");
  }
};

/// Ball generator (R - sum x_i^2) I_t.
inline RatMatrixPoly ball_generator(int n, int t, const Rational& radius_sq = 1) {
  RatPoly s(n, radius_sq);
  for (int i = 0; i < n; ++i) s -= RatPoly::variable(n, i) * RatPoly::variable(n, i);
  return RatMatrixPoly::scalar(t, s);
}

// {"n":..,"t":..,"generators":[MatrixPoly...],"equalities":[poly...]}
inline json module_to_json(const ModulePresentation& m) {
  json j;
  j["n"] = m.n;
  j["t"] = m.t;
  j["generators"] = json::array();
  for (const auto& g : m.generators) j["generators"].push_back(matrix_poly_to_json(g));
  j["equalities"] = json::array();
  for (const auto& q : m.equalities) j["equalities"].push_back(polynomial_terms_to_json(q));
  return j;
}

inline ModulePresentation module_from_json(const json& j) {
  ModulePresentation m;
  m.n = j.at("n").get<int>();
  m.t = j.at("t").get<int>();
  if (j.contains("generators"))
    for (const auto& g : j.at("generators")) m.generators.push_back(matrix_poly_from_json(g));
  if (j.contains("equalities"))
    for (const auto& q : j.at("equalities")) m.equalities.push_back(polynomial_from_json(q, m.n));
  m.validate();
  return m;
}

}  // namespace mpsatz
