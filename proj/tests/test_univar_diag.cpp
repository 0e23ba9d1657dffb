#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace mpsatz;
using namespace testutil;

namespace {

RatMatrixPoly exact_gram_sum(const JakubovicResult& r, int t) {
  RatMatrixPoly sum(t, t, 1);
  for (std::size_t k = 0; k < r.weights.size(); ++k) {
    RatMatrixPoly row(1, t, 1);
    for (int l = 0; l < t; ++l) row(0, l) = (*r.exact_rows)(static_cast<int>(k), l);
    sum += (row.adjoint() * row) * r.weights[k];
  }
  return sum;
}

void expect_evaluation_consistent(const RatMatrixPoly& f, const JakubovicResult& r, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  const RealMatrixPoly fd = f.cast<double>();
  const int deg = std::max(0, f.degree());
  for (int s = 0; s < 100; ++s) {
    std::vector<double> z{u(rng)};
    Eigen::MatrixXd g = r.g.evaluate(z);
    const double err = (fd.evaluate(z) - g.transpose() * g).norm();
    EXPECT_LE(err, 10 * tol * (1 + std::pow(std::fabs(z[0]), deg)) * r.scale);
  }
}

}  // namespace

// ---------------------------------------------------------------- univar

TEST(Jakubovic, IdentityFactorsAsIdentity) {
  RatMatrixPoly f = RatMatrixPoly::identity(2, 1);
  JakubovicResult r = jakubovic_factor(f);
  ASSERT_TRUE(r.exact);
  EXPECT_EQ(r.residual, 0.0);
  ASSERT_EQ(r.g.rows(), 2);
  EXPECT_LE((r.g - RealMatrixPoly::identity(2, 1)).max_abs_coefficient(), 1e-12);
}

TEST(Jakubovic, TwoByTwoExample) {
  RatMatrixPoly f = M({{"x^2 + 1", "x"}, {"x", "1"}}, 1);
  // One valid answer, checked by multiplication.
  RatMatrixPoly g0 = M({{"x", "1"}, {"1", "0"}}, 1);
  EXPECT_EQ(g0.adjoint() * g0, f);

  JakubovicResult r = jakubovic_factor(f);
  EXPECT_LE(r.residual, 1e-8 * r.scale);
  EXPECT_LE(r.g.rows(), 2 * (f.degree() / 2 + 1));
  ASSERT_TRUE(r.exact);
  EXPECT_EQ(exact_gram_sum(r, 2), f);
  expect_evaluation_consistent(f, r, 1e-8, 1);
}

TEST(Jakubovic, OddDiagonalNotPsd) {
  try {
    jakubovic_factor(M({{"x", "0"}, {"0", "1"}}, 1));
    FAIL() << "expected NotPsdOnLine";
  } catch (const NotPsdOnLine& e) {
    EXPECT_LT(e.witness(), 0.0);
    const double lm = min_eigenvalue(M({{"x", "0"}, {"0", "1"}}, 1).cast<double>().evaluate(std::vector<double>{e.witness()}));
    EXPECT_LT(lm, 0.0);
  }
}

TEST(Jakubovic, EvenDegreeButIndefinite) {
  RatMatrixPoly f = M({{"x^2 - 1", "0"}, {"0", "1"}}, 1);
  try {
    jakubovic_factor(f);
    FAIL() << "expected NotPsdOnLine";
  } catch (const NotPsdOnLine& e) {
    EXPECT_LT(min_eigenvalue(f.cast<double>().evaluate(std::vector<double>{e.witness()})), 0.0);
  }
}

TEST(Jakubovic, RejectsMultivariate) {
  EXPECT_THROW(jakubovic_factor(S("x^2 + y^2", 2)), DimensionMismatch);
}

TEST(Jakubovic, RandomRoundTrips) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const int t = 1 + trial % 3;
    RatMatrixPoly g = random_matrix(rng, 2 * t, t, 1, 1 + trial % 2, 2);
    RatMatrixPoly f = g.adjoint() * g;
    if (f.is_zero()) continue;
    JakubovicResult r = jakubovic_factor(f);
    EXPECT_LE(r.residual, 1e-7 * r.scale) << f.to_string();
    if (r.exact) EXPECT_EQ(exact_gram_sum(r, t), f);
    expect_evaluation_consistent(f, r, 1e-7, 100 + trial);
  }
}

// ---------------------------------------------------------------- diag

TEST(Diag, AlreadyDiagonal) {
  RatMatrixPoly f = M({{"x", "0"}, {"0", "x^2 + 1"}}, 1);
  auto bs = diagonalize_branching(f);
  ASSERT_EQ(bs.size(), 1u);
  EXPECT_EQ(bs[0].c, RatMatrixPoly::identity(2, 1));
  EXPECT_EQ(bs[0].d, f);
}

TEST(Diag, SymbolicTwoByTwo) {
  RatMatrixPoly f = M({{"x", "y"}, {"y", "z"}}, 3);
  const RatPoly a = P("x", 3), c = P("z", 3), det = P("x*z - y^2", 3);
  // Hand expansions: C = [[1, -b], [0, a]] gives diag(a, a det f).
  RatMatrixPoly c1 = M({{"1", "-y"}, {"0", "x"}}, 3);
  EXPECT_EQ(c1.adjoint() * f * c1, RatMatrixPoly::diagonal({a, a * det}));

  auto bs = diagonalize_branching(f);
  ASSERT_EQ(bs.size(), 2u);
  bool saw_a = false, saw_c = false;
  for (const auto& b : bs) {
    EXPECT_TRUE(congruence_holds(f, b));
    if (b.d == RatMatrixPoly::diagonal({a, a * det})) saw_a = true;
    if (b.d == RatMatrixPoly::diagonal({c, c * det}) || b.d == RatMatrixPoly::diagonal({c * det, c})) saw_c = true;
  }
  EXPECT_TRUE(saw_a);
  EXPECT_TRUE(saw_c);
}

TEST(Diag, ZeroDiagonalUsesRepair) {
  RatMatrixPoly f = M({{"0", "1"}, {"1", "0"}}, 1);
  auto bs = diagonalize_branching(f);
  ASSERT_FALSE(bs.empty());
  for (const auto& b : bs) {
    EXPECT_TRUE(congruence_holds(f, b));
    // One positive and one negative entry, as for diag(2, -2) up to units.
    const Rational d0 = b.d(0, 0).constant_term(), d1 = b.d(1, 1).constant_term();
    EXPECT_LT(sgn(d0) * sgn(d1), 0);
  }
  EXPECT_EQ(check_pointwise_equivalence(f, bs, 100).failures, 0);
}

TEST(Diag, RandomCongruenceAndEquivalence) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    const int t = 2 + trial % 2, n = 1 + trial % 2;
    RatMatrixPoly f = random_symmetric(rng, t, n, 2);
    std::vector<DiagBranch> bs;
    try {
      bs = diagonalize_branching(f);
    } catch (const BranchCapExceeded& e) {
      bs = e.partial();
    }
    for (const auto& b : bs) {
      EXPECT_TRUE(congruence_holds(f, b));
      for (int j = 0; j < t; ++j) EXPECT_TRUE(diag_entry_identity(b.d, j));
    }
    EquivalenceReport rep = check_pointwise_equivalence(f, bs, 300, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(rep.failures, 0) << f.to_string();
  }
}

TEST(Diag, CapExceededCarriesPartial) {
  RatMatrixPoly f = M({{"x", "y", "1"}, {"y", "x + 1", "y"}, {"1", "y", "x - 2"}}, 2);
  try {
    diagonalize_branching(f, 1);
    FAIL() << "expected BranchCapExceeded";
  } catch (const BranchCapExceeded& e) {
    ASSERT_EQ(e.partial().size(), 1u);
    EXPECT_TRUE(congruence_holds(f, e.partial()[0]));
  }
}

TEST(Diag, NonSymmetricRejected) {
  EXPECT_THROW(diagonalize_branching(M({{"x", "1"}, {"0", "x"}}, 1)), DimensionMismatch);
}

TEST(Diag, EntryIdentity) {
  RatMatrixPoly d = RatMatrixPoly::diagonal({P("x", 1), P("x^2 - 3", 1), P("5", 1)});
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(diag_entry_identity(d, j));
}
