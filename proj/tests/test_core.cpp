#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace mpsatz;
using namespace testutil;

// ---------------------------------------------------------------- poly-core

TEST(MatrixPoly, IdentityTimesF) {
  RatMatrixPoly f = M({{"x^2 + 1", "x*y"}, {"x*y", "3"}}, 2);
  EXPECT_EQ(RatMatrixPoly::identity(2, 2) * f, f);
}

TEST(MatrixPoly, AdjointGTimesG) {
  RatMatrixPoly g = M({{"z", "1"}, {"1", "0"}}, 1);
  RatMatrixPoly expect = M({{"z^2 + 1", "z"}, {"z", "1"}}, 1);
  // Hand expansion: column j of g^T g is sum_k g_kj g_k.
  EXPECT_EQ(g.adjoint() * g, expect);
}

TEST(MatrixPoly, UnitConjugationsOfDiagonal) {
  RatMatrixPoly f = M({{"x", "0"}, {"0", "y"}}, 2);
  // E_21 f E_12 = f_11 E_22 with E_12 = e1 e2^T.
  RatMatrixPoly e12 = RatMatrixPoly::unit(2, 2, 0, 1);
  EXPECT_EQ(e12.adjoint() * f * e12, M({{"0", "0"}, {"0", "x"}}, 2));
  for (int i = 0; i < 2; ++i) {
    RatMatrixPoly sum(2, 2, 2);
    for (int k = 0; k < 2; ++k) {
      RatMatrixPoly e = RatMatrixPoly::unit(2, 2, i, k);
      sum += e.adjoint() * f * e;
    }
    EXPECT_EQ(sum, RatMatrixPoly::scalar(2, f(i, i)));
  }
}

TEST(MatrixPoly, MulShapeMismatchThrows) {
  RatMatrixPoly a(2, 2, 1), b(3, 3, 1), c(2, 2, 2);
  EXPECT_THROW(a * b, DimensionMismatch);
  EXPECT_THROW(a * c, DimensionMismatch);
}

TEST(MatrixPoly, AdjointExamples) {
  RatMatrixPoly f = M({{"x", "y"}, {"y", "1"}}, 2);
  EXPECT_EQ(f.adjoint(), f);
  EXPECT_EQ(M({{"0", "x"}, {"0", "0"}}, 1).adjoint(), M({{"0", "0"}, {"x", "0"}}, 1));
}

TEST(MatrixPoly, RingAxiomsOnRandomInstances) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    RatMatrixPoly a = random_matrix(rng, 2, 2, 2, 2), b = random_matrix(rng, 2, 2, 2, 2), c = random_matrix(rng, 2, 2, 2, 1);
    EXPECT_EQ((a * b).adjoint(), b.adjoint() * a.adjoint());
    EXPECT_EQ(a.adjoint().adjoint(), a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_LE((a * b).degree(), a.degree() + b.degree());
    const RatMatrixPoly r = a * b - c;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (const auto& [m, v] : r(i, j).terms()) EXPECT_NE(sgn(v), 0);
  }
}

TEST(MatrixPoly, EvaluateIsHomomorphism) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    RatMatrixPoly a = random_matrix(rng, 3, 3, 2, 2), b = random_matrix(rng, 3, 3, 2, 2);
    std::vector<double> x = random_point(rng, 2);
    Eigen::MatrixXd lhs = (a * b).evaluate(x), rhs = a.evaluate(x) * b.evaluate(x);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
    // Exact evaluation at a rational point.
    std::vector<Rational> xr{Rational(1, 3), Rational(-2, 5)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Rational s = 0;
        for (int k = 0; k < 3; ++k) s += a(i, k).evaluate(xr) * b(k, j).evaluate(xr);
        EXPECT_EQ((a * b)(i, j).evaluate(xr), s);
      }
  }
}

TEST(MatrixPoly, EvaluateExamples) {
  RatMatrixPoly c = M({{"3", "1/2"}, {"1/2", "-1"}}, 2);
  Eigen::MatrixXd expect(2, 2);
  expect << 3, 0.5, 0.5, -1;
  EXPECT_EQ(c.evaluate(std::vector<double>{0.3, -7.0}), expect);

  RatPoly motzkin = P("x^2*y^4 + x^4*y^2 - 3*x^2*y^2 + 1", 2);
  EXPECT_EQ(motzkin.evaluate(std::vector<Rational>{1, 1}), 0);

  RatMatrixPoly f = M({{"x", "0", "0"}, {"0", "y", "0"}, {"0", "0", "x*y + 1"}}, 2);
  Eigen::MatrixXd fe = f.evaluate(std::vector<double>{-1, -1});
  EXPECT_EQ(fe, Eigen::Vector3d(-1, -1, 2).asDiagonal().toDenseMatrix());
  EXPECT_THROW(f.evaluate(std::vector<double>{1.0}), DimensionMismatch);
}

TEST(Polynomial, GradedLexBasis) {
  auto b = monomials_up_to(2, 2);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(b[0], Monomial(std::vector<int>{0, 0}));
  EXPECT_EQ(b[1], Monomial(std::vector<int>{1, 0}));
  EXPECT_EQ(b[2], Monomial(std::vector<int>{0, 1}));
  EXPECT_EQ(b[3], Monomial(std::vector<int>{2, 0}));
  EXPECT_EQ(b[4], Monomial(std::vector<int>{1, 1}));
  EXPECT_EQ(b[5], Monomial(std::vector<int>{0, 2}));
}

TEST(Polynomial, CancellationLeavesNoZeroTerms) {
  RatPoly p = P("x + y", 2) - P("x", 2);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((p - p).degree(), -1);
}

TEST(PolyJson, BitExactRoundTrip) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    RatMatrixPoly a = random_symmetric(rng, 3, 2, 3, 1000000);
    Rational big(Integer("123456789012345678901234567891"), Integer(7));
    big.canonicalize();
    a(0, 0).add_term(Monomial(2), big);
    json j = matrix_poly_to_json(a);
    EXPECT_EQ(matrix_poly_from_json(json::parse(j.dump())), a);
  }
}

TEST(PolyJson, ParserForms) {
  EXPECT_EQ(P("1/4 + 0.5*x^2", 1), P("x^2/2 + 1/4", 1));
  EXPECT_EQ(P("2*x1*x2^3 - x3", 3), P("2*x*y^3 - z", 3));
  EXPECT_THROW(P("x +* y", 2), ParseError);
  EXPECT_THROW(P("x4", 3), ParseError);
}

// ---------------------------------------------------------------- numla

TEST(Numla, EigenIdentity) {
  SymEigen e = sym_eigen(SymMatrix::identity(4));
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(e.values(i), 1.0);
}

TEST(Numla, EigenDiagonal) {
  Eigen::MatrixXd a(2, 2);
  a << -5, 0, 0, 1;
  SymEigen e = sym_eigen(a);
  EXPECT_DOUBLE_EQ(e.values(0), -5.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
}

TEST(Numla, EigenConstructThenDecompose) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  for (int m : {3, 7, 15}) {
    Eigen::MatrixXd r(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r(i, j) = nd(rng);
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r).householderQ();
    Eigen::VectorXd lam(m);
    for (int i = 0; i < m; ++i) lam(i) = -3.0 + 0.5 * i;
    Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
    SymEigen e = sym_eigen(a);
    EXPECT_LE((e.values - lam).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((a * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-10 * a.norm());
    EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(m, m)).norm(), 1e-10);
    EXPECT_NEAR(e.values.sum(), a.trace(), 1e-9 * a.norm());
  }
}

TEST(Numla, EigenRejectsNonFinite) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  a(0, 1) = a(1, 0) = std::nan("");
  EXPECT_THROW(sym_eigen(a), NonFiniteInput);
}

TEST(Numla, PsdFactorExamples) {
  PsdFactor id = psd_factor(Eigen::MatrixXd::Identity(3, 3), 1e-10);
  EXPECT_EQ(id.factor.rows(), 3);
  EXPECT_LE((id.factor.transpose() * id.factor - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);

  Eigen::Vector3d v(1, -2, 3);
  PsdFactor r1 = psd_factor(v * v.transpose(), 1e-10);
  ASSERT_EQ(r1.factor.rows(), 1);
  Eigen::VectorXd row = r1.factor.row(0).transpose();
  EXPECT_LE(std::min((row - v).norm(), (row + v).norm()), 1e-10);

  PsdFactor d = psd_factor(Eigen::Vector3d(4, 0, 1).asDiagonal().toDenseMatrix(), 1e-10);
  ASSERT_EQ(d.factor.rows(), 2);
  std::vector<Eigen::Vector3d> rows;
  for (int i = 0; i < 2; ++i) rows.push_back(d.factor.row(i).transpose().cwiseAbs());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a(0) > b(0); });
  EXPECT_LE((rows[0] - Eigen::Vector3d(2, 0, 0)).norm(), 1e-12);
  EXPECT_LE((rows[1] - Eigen::Vector3d(0, 0, 1)).norm(), 1e-12);
}

TEST(Numla, PsdFactorIndefiniteThrows) {
  Eigen::MatrixXd a = Eigen::Vector2d(1, -1).asDiagonal();
  EXPECT_THROW(psd_factor(a, 1e-8), IndefiniteInput);
}

TEST(Numla, PsdFactorRefactorIdempotent) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd b(3, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j) b(i, j) = nd(rng);
  Eigen::MatrixXd a = b.transpose() * b;
  const double tol = 1e-10;
  PsdFactor f1 = psd_factor(a, tol);
  EXPECT_EQ(f1.factor.rows(), 3);
  EXPECT_LE((a - f1.factor.transpose() * f1.factor).norm(), tol * std::max(1.0, a.norm()));
  Eigen::MatrixXd a2 = f1.factor.transpose() * f1.factor;
  PsdFactor f2 = psd_factor(a2, tol);
  EXPECT_EQ(f2.factor.rows(), 3);
  EXPECT_LE((a2 - f2.factor.transpose() * f2.factor).norm(), tol * std::max(1.0, a2.norm()));
}

TEST(Numla, SolveLinearExamples) {
  Eigen::VectorXd b(3);
  b << 1, 2, 3;
  EXPECT_EQ(solve_linear(Eigen::MatrixXd::Identity(3, 3), b), b);
  Eigen::MatrixXd a(2, 2);
  a << 2, 0, 0, 4;
  Eigen::Vector2d x = solve_linear(a, Eigen::Vector2d(2, 8));
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_NEAR(x(1), 2.0, 1e-15);
}

TEST(Numla, SolveLinearRoundTripAndSingular) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = nd(rng) + (i == j ? 8.0 : 0.0);
  Eigen::VectorXd x0(8);
  for (int i = 0; i < 8; ++i) x0(i) = nd(rng);
  Eigen::VectorXd b = a * x0;
  Eigen::VectorXd x = solve_linear(a, b);
  EXPECT_LE((a * x - b).norm(), 1e-9 * (a.norm() * x.norm() + b.norm()));
  Eigen::MatrixXd s = Eigen::MatrixXd::Ones(3, 3);
  EXPECT_THROW(solve_linear(s, Eigen::Vector3d(1, 2, 3)), SingularSystem);
}

TEST(Numla, ExactLdl) {
  RatMatrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = a(1, 0) = Rational(1, 2);
  a(1, 1) = 1;
  EXPECT_TRUE(exact_is_psd(a));
  a(1, 1) = Rational(1, 4);
  EXPECT_TRUE(exact_is_psd(a));  // singular, still PSD
  a(1, 1) = Rational(1, 5);
  EXPECT_FALSE(exact_is_psd(a));
}
