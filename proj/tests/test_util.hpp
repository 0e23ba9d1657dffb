#pragma once

#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mpsatz/mpsatz.hpp"

namespace testutil {

using namespace mpsatz;

inline RatPoly P(const std::string& s, int n) { return parse_polynomial(s, n); }

inline RatMatrixPoly M(const std::vector<std::vector<std::string>>& rows, int n) {
  RatMatrixPoly m(static_cast<int>(rows.size()), static_cast<int>(rows.at(0).size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = P(rows[i][j], n);
  return m;
}

inline RatMatrixPoly S(const std::string& s, int n) { return RatMatrixPoly::from_scalar(P(s, n)); }

/// Random polynomial with small integer coefficients over monomials of degree <= d.
inline RatPoly random_poly(std::mt19937_64& rng, int n, int d, int range = 3, double density = 0.6) {
  std::uniform_int_distribution<int> coef(-range, range);
  std::uniform_real_distribution<double> u(0, 1);
  RatPoly p(n);
  for (const auto& m : monomials_up_to(n, d))
    if (u(rng) < density) p.add_term(m, Rational(coef(rng)));
  return p;
}

inline RatMatrixPoly random_matrix(std::mt19937_64& rng, int rows, int cols, int n, int d, int range = 3) {
  RatMatrixPoly m(rows, cols, n);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_poly(rng, n, d, range);
  return m;
}

inline RatMatrixPoly random_symmetric(std::mt19937_64& rng, int t, int n, int d, int range = 3) {
  RatMatrixPoly m(t, t, n);
  for (int i = 0; i < t; ++i)
    for (int j = i; j < t; ++j) {
      m(i, j) = random_poly(rng, n, d, range);
      m(j, i) = m(i, j);
    }
  return m;
}

inline std::vector<double> random_point(std::mt19937_64& rng, int n, double r = 2.0) {
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& xi : x) xi = u(rng);
  return x;
}

inline std::string instance(const std::string& name) { return std::string(MPSATZ_INSTANCES) + "/" + name; }

}  // namespace testutil
