#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "mpsatz/module.hpp"
#include "mpsatz/numla.hpp"

namespace mpsatz {

/// lambda_min(g(x)) >= -tol for every g in G (equalities: |q(x)| <= tol).
inline bool in_region(const ModulePresentation& m, const std::vector<double>& x, double tol = 1e-9) {
  if (static_cast<int>(x.size()) != m.n) throw DimensionMismatch("in_region: point length differs from n");
  for (const auto& g : m.generators)
    if (min_eigenvalue(g.cast<double>().evaluate(x)) < -tol) return false;
  for (const auto& q : m.equalities)
    if (std::fabs(q.cast<double>().evaluate<double>(x)) > tol) return false;
  return true;
}

struct Box {
  std::vector<double> lo, hi;
  static Box cube(int n, double r) { return {std::vector<double>(static_cast<std::size_t>(n), -r), std::vector<double>(static_cast<std::size_t>(n), r)}; }
};

struct SampleResult {
  std::vector<std::vector<double>> points;
  long draws = 0;
  double acceptance_rate = 0.0;
  bool empty_suspected = false;  // heuristic only: zero acceptances over >= 1e5 draws
};

/// Uniform rejection sampling in a box; deterministic for a fixed seed.
inline SampleResult sample_region(const ModulePresentation& m, int count, const Box& box, std::uint64_t seed,
                                  long max_draws = 0, double tol = 1e-9) {
  if (static_cast<int>(box.lo.size()) != m.n || static_cast<int>(box.hi.size()) != m.n)
    throw DimensionMismatch("sample_region: box dimension differs from n");
  for (int i = 0; i < m.n; ++i) {
    const double lo = box.lo[static_cast<std::size_t>(i)], hi = box.hi[static_cast<std::size_t>(i)];
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw MalformedInstance("sample_region: invalid box");
  }
  if (count < 0) throw MalformedInstance("sample_region: negative count");
  if (max_draws <= 0) max_draws = std::max<long>(100000, 1000L * count);
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  SampleResult res;
  std::vector<double> x(static_cast<std::size_t>(m.n));
  while (static_cast<int>(res.points.size()) < count && res.draws < max_draws) {
    for (int i = 0; i < m.n; ++i) {
      const double lo = box.lo[static_cast<std::size_t>(i)], hi = box.hi[static_cast<std::size_t>(i)];
      x[static_cast<std::size_t>(i)] = lo + (hi - lo) * unit();
    }
    ++res.draws;
    if (in_region(m, x, tol)) res.points.push_back(x);
  }
  res.acceptance_rate = res.draws ? static_cast<double>(res.points.size()) / static_cast<double>(res.draws) : 0.0;
  res.empty_suspected = res.points.empty() && res.draws >= 100000;
  return res;
}

struct MinEigStats {
  double min = std::numeric_limits<double>::infinity();
  int argmin = -1;
  std::vector<double> edges;  // histogram bin edges (bins + 1)
  std::vector<int> histogram;
};

/// Minimum of lambda_min(f(x)) over the given points, with a histogram of
/// the per-point values.
inline MinEigStats min_eig_stats(const RealMatrixPoly& f, const std::vector<std::vector<double>>& points, int bins = 10) {
  MinEigStats st;
  std::vector<double> vals;
  vals.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = min_eigenvalue(f.evaluate(points[i]));
    vals.push_back(v);
    if (v < st.min) {
      st.min = v;
      st.argmin = static_cast<int>(i);
    }
  }
  if (vals.empty() || bins <= 0) return st;
  const double lo = *std::min_element(vals.begin(), vals.end());
  const double hi = *std::max_element(vals.begin(), vals.end());
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  for (int b = 0; b <= bins; ++b) st.edges.push_back(lo + b * width);
  st.histogram.assign(static_cast<std::size_t>(bins), 0);
  for (double v : vals) {
    int b = static_cast<int>((v - lo) / width);
    st.histogram[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  return st;
}

inline MinEigStats min_eig_stats(const RatMatrixPoly& f, const std::vector<std::vector<double>>& points, int bins = 10) {
  return min_eig_stats(f.cast<double>(), points, bins);
}

}  // namespace mpsatz
