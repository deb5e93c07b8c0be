#include "lubrex/expansion_matrices.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lubrex/geometry.hpp"
#include "oracles.hpp"

using namespace lubrex;

namespace {

Rational q(long p, long den = 1) {
  Rational r(p, den);
  r.canonicalize();
  return r;
}

void expect_matrix(const Matrix<Rational>& got, const std::vector<std::vector<Rational>>& want) {
  ASSERT_EQ(got.rows(), static_cast<std::int64_t>(want.size()));
  for (std::int64_t i = 0; i < got.rows(); ++i) {
    ASSERT_EQ(got.cols(), static_cast<std::int64_t>(want[static_cast<std::size_t>(i)].size()));
    for (std::int64_t j = 0; j < got.cols(); ++j) {
      EXPECT_EQ(got(i, j), want[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
          << "entry (" << i << "," << j << ")";
    }
  }
}

}  // namespace

TEST(BaseCase, MatchesClosedForm) {
  auto m = base_case<Rational>();
  expect_matrix(m.A0, {{q(0)}, {q(1)}, {q(-2)}, {q(1)}});
  expect_matrix(m.A1, {{q(0)}, {q(0)}, {q(-1)}, {q(1)}});
  expect_matrix(m.B, {{q(0)}, {q(0)}, {q(3)}, {q(-2)}});
}

TEST(NextOrder, OrderTwoGoldenMatrices) {
  BasisSet bases(4);
  OperatorTable ops(bases, 3);
  auto stack = build_stack<Rational>(ops, 1);
  const auto& m = stack[1];
  expect_matrix(m.A0, {{q(0), q(0)},
                       {q(0), q(0)},
                       {q(-8, 15), q(2, 15)},
                       {q(7, 15), q(2, 15)},
                       {q(2, 3), q(-2, 3)},
                       {q(-3, 5), q(2, 5)}});
  expect_matrix(m.A1, {{q(0), q(0)},
                       {q(0), q(0)},
                       {q(-11, 30), q(7, 15)},
                       {q(19, 30), q(-8, 15)},
                       {q(1, 3), q(-1, 3)},
                       {q(-3, 5), q(2, 5)}});
  expect_matrix(m.B, {{q(0), q(0)},
                      {q(0), q(0)},
                      {q(9, 5), q(-2, 5)},
                      {q(-6, 5), q(-2, 5)},
                      {q(-3), q(2)},
                      {q(12, 5), q(-6, 5)}});
}

TEST(NextOrder, RowsZeroAndSumRules) {
  BasisSet bases(10);
  OperatorTable ops(bases, 9);
  auto stack = build_stack<Rational>(ops, 4);
  for (int k = 1; k <= 4; ++k) {
    const auto& m = stack[static_cast<std::size_t>(k)];
    for (const auto* mat : {&m.A0, &m.A1, &m.B}) {
      for (std::int64_t j = 0; j < mat->cols(); ++j) {
        EXPECT_EQ((*mat)(0, j), Rational(0));
        EXPECT_EQ((*mat)(1, j), Rational(0));
      }
    }
    // Row 2 = sum (n-3) row_n and row 3 = sum (2-n) row_n; A1 carries the
    // binomial boundary correction in column 1, which must be removed first.
    const Rational bin = binom_minus_half(k);
    for (std::int64_t j = 0; j < m.A0.cols(); ++j) {
      Rational r2a0(0), r3a0(0), r2a1(0), r3a1(0), r2b(0), r3b(0);
      for (std::int64_t n = 4; n < 2 * k + 4; ++n) {
        r2a0 += Rational(static_cast<long>(n - 3)) * m.A0(n, j);
        r3a0 += Rational(static_cast<long>(2 - n)) * m.A0(n, j);
        r2a1 += Rational(static_cast<long>(n - 3)) * m.A1(n, j);
        r3a1 += Rational(static_cast<long>(2 - n)) * m.A1(n, j);
        r2b += Rational(static_cast<long>(n - 3)) * m.B(n, j);
        r3b += Rational(static_cast<long>(2 - n)) * m.B(n, j);
      }
      EXPECT_EQ(m.A0(2, j), r2a0);
      EXPECT_EQ(m.A0(3, j), r3a0);
      EXPECT_EQ(m.B(2, j), r2b);
      EXPECT_EQ(m.B(3, j), r3b);
      const Rational corr2 = (j == 0) ? -bin : Rational(0);
      const Rational corr3 = (j == 0) ? bin : Rational(0);
      EXPECT_EQ(m.A1(2, j), r2a1 + corr2);
      EXPECT_EQ(m.A1(3, j), r3a1 + corr3);
    }
  }
}

TEST(NextOrder, OrderTwoRow3FeedsFluxCoefficients) {
  BasisSet bases(4);
  OperatorTable ops(bases, 3);
  auto stack = build_stack<Rational>(ops, 1);
  // a^(2) = (1/2)[V0 (7/15, 2/15) + V1 (19/30, -8/15)] E_2^(2)
  EXPECT_EQ(stack[1].A0(3, 0), q(7, 15));
  EXPECT_EQ(stack[1].A0(3, 1), q(2, 15));
  EXPECT_EQ(stack[1].A1(3, 0), q(19, 30));
  EXPECT_EQ(stack[1].A1(3, 1), q(-8, 15));
}

TEST(NextOrder, MissingPredecessorThrows) {
  BasisSet bases(4);
  OperatorTable ops(bases, 3);
  std::vector<OrderMatrices<Rational>> empty;
  EXPECT_THROW(next_order(empty, ops), Error);
  std::vector<OrderMatrices<Rational>> wrong(1);
  wrong[0].order = 2;  // stack top claims order 2, so orders 0..2k-2 are absent
  EXPECT_THROW(next_order(wrong, ops), Error);
}

TEST(Derivatives, OrderZeroSecondDerivativeGoldenValues) {
  BasisSet bases(4);
  OperatorTable ops(bases, 3);
  auto m = base_case<Rational>();
  auto d = derive_second(m, ops);
  expect_matrix(d.A0, {{q(0), q(0)}, {q(0), q(0)}, {q(-4), q(4)}, {q(6), q(-4)}});
  expect_matrix(d.A1, {{q(0), q(0)}, {q(0), q(0)}, {q(-2), q(2)}, {q(6), q(-4)}});
  expect_matrix(d.B, {{q(0), q(0)}, {q(0), q(0)}, {q(18), q(-12)}, {q(-24), q(12)}});
  EXPECT_EQ(d.prefactor_A, -1);
  EXPECT_EQ(d.prefactor_B, -2);
}

TEST(Derivatives, OrderZeroLegendreTransformGoldenValues) {
  BasisSet bases(4);
  OperatorTable ops(bases, 3);
  auto m = base_case<Rational>();
  auto d = derive_second(m, ops);
  auto leg = legendre_change_of_basis<Rational>(0);
  // Rows of D^{-1} R^{-T} M for M = [A0dot | A1dot | Bdot].
  auto entry = [&](const Matrix<Rational>& mat, int row, int col) {
    Rational acc(0);
    for (std::int64_t s = 0; s < 4; ++s) acc += leg.R_inv_T(row, s) * mat(s, col);
    return to_double(acc) / std::sqrt(static_cast<double>(2 * row + 1));
  };
  EXPECT_NEAR(entry(d.A0, 0, 0), 1.0 / 6, 1e-15);
  EXPECT_NEAR(entry(d.A0, 0, 1), 2.0 / 6, 1e-15);
  EXPECT_NEAR(entry(d.A0, 1, 0), 7.0 / (10 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(entry(d.A0, 1, 1), 2.0 / (10 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(entry(d.A0, 2, 0), 5.0 / (6 * std::sqrt(5.0)), 1e-15);
  EXPECT_NEAR(entry(d.A0, 3, 0), 3.0 / (10 * std::sqrt(7.0)), 1e-15);
  EXPECT_NEAR(entry(d.A1, 0, 0), 5.0 / 6, 1e-15);
  EXPECT_NEAR(entry(d.A1, 1, 1), -8.0 / (10 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(entry(d.B, 0, 1), -1.0, 1e-15);
  EXPECT_NEAR(entry(d.B, 2, 0), -18.0 / (6 * std::sqrt(5.0)), 1e-15);
  EXPECT_NEAR(entry(d.B, 3, 1), 6.0 / (10 * std::sqrt(7.0)), 1e-15);
}

TEST(Legendre, R0AndInverseGoldenValues) {
  auto leg = legendre_change_of_basis<Rational>(0);
  expect_matrix(leg.R, {{q(1), q(0), q(0), q(0)},
                        {q(-1), q(2), q(0), q(0)},
                        {q(1), q(-6), q(6), q(0)},
                        {q(-1), q(12), q(-30), q(20)}});
  EXPECT_EQ(leg.R_inv_T(0, 0), q(1));
  EXPECT_EQ(leg.R_inv_T(0, 1), q(1, 2));
  EXPECT_EQ(leg.R_inv_T(0, 2), q(1, 3));
  EXPECT_EQ(leg.R_inv_T(0, 3), q(1, 4));
  EXPECT_EQ(leg.R_inv_T(1, 3), q(9, 20));
  std::vector<std::int64_t> want_d2{1, 3, 5, 7};
  EXPECT_EQ(leg.D_squared, want_d2);
}

TEST(Legendre, InverseIsExactAndStochastic) {
  auto leg = legendre_change_of_basis<Rational>(3);
  const std::int64_t n = leg.R.rows();
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      Rational acc(0);
      for (std::int64_t m = 0; m < n; ++m) acc += leg.R(i, m) * leg.R_inv_T(j, m);
      EXPECT_EQ(acc, (i == j) ? Rational(1) : Rational(0));
    }
  }
  // Nonnegative entries with unit column sums.
  for (std::int64_t j = 0; j < n; ++j) {
    Rational col(0);
    for (std::int64_t i = 0; i < n; ++i) {
      EXPECT_GE(to_double(leg.R_inv_T(i, j)), 0.0);
      col += leg.R_inv_T(i, j);
    }
    EXPECT_EQ(col, Rational(1));
  }
}

TEST(Legendre, OrthogonalityByQuadrature) {
  auto leg = legendre_change_of_basis<double>(0);
  auto poly = [&](int n, double x) {
    double acc = 0, xp = 1;
    for (std::int64_t j = 0; j <= n; ++j) {
      acc += leg.R(n, j) * xp;
      xp *= x;
    }
    return acc;
  };
  const double i23 = oracles::simpson([&](double x) { return poly(2, x) * poly(3, x); }, 5000);
  const double i33 = oracles::simpson([&](double x) { return poly(3, x) * poly(3, x); }, 5000);
  EXPECT_NEAR(i23, 0.0, 1e-12);
  EXPECT_NEAR(i33, 1.0 / 7.0, 1e-12);
}

namespace {

// Direct evaluation of the B-part beta(x, y) = sum_n (y/h)^n B(n,:) Phi(x)
// and its matrix-represented second/fourth x-derivatives.
struct BetaEval {
  const BasisSet& bases;
  const ShapeSpec& shape;

  double direct(const Matrix<Rational>& B, int order, double x, double y) const {
    std::vector<double> hd(static_cast<std::size_t>(order) + 1);
    eval_h_derivs(shape, x, order, hd);
    std::vector<double> phi(static_cast<std::size_t>(bases.at(order).dim()));
    basis_values(bases.at(order), hd, phi);
    double acc = 0;
    const double eta = y / hd[0];
    for (std::int64_t n = 0; n < B.rows(); ++n) {
      double row = 0;
      for (std::int64_t j = 0; j < B.cols(); ++j) row += to_double(B(n, j)) * phi[static_cast<std::size_t>(j)];
      acc += std::pow(eta, static_cast<double>(n)) * row;
    }
    return acc;
  }

  double represented(const Matrix<Rational>& M, int order, int sdeg, int prefactor, double x,
                     double y) const {
    std::vector<double> hd(static_cast<std::size_t>(sdeg) + 1);
    eval_h_derivs(shape, x, sdeg, hd);
    std::vector<double> phi(static_cast<std::size_t>(bases.at(sdeg).dim()));
    basis_values(bases.at(sdeg), hd, phi);
    double acc = 0;
    const double eta = y / hd[0];
    for (std::int64_t n = 0; n < M.rows(); ++n) {
      double row = 0;
      for (std::int64_t j = 0; j < M.cols(); ++j) row += to_double(M(n, j)) * phi[static_cast<std::size_t>(j)];
      acc += std::pow(eta, static_cast<double>(n)) * row;
    }
    (void)order;
    return acc * std::pow(hd[0], prefactor);
  }
};

}  // namespace

TEST(Derivatives, FaithfulAgainstFiniteDifferences) {
  const int k = 1;  // order 2
  BasisSet bases(2 * k + 4);
  OperatorTable ops(bases, 2 * k + 4);
  auto stack = build_stack<Rational>(ops, k);
  auto second = derive_second(stack[1], ops);
  auto fourth = derive_fourth(stack[1], ops);
  ShapeSpec shape = parse_shape("sine:a=0.2");
  BetaEval ev{bases, shape};

  const double x0 = 0.3173, y0 = 0.21;
  double prev_err2 = 0, prev_err4 = 0;
  for (int level = 0; level < 3; ++level) {
    const double dx = 0.02 / (1 << level);
    // y is held fixed: the representation differentiates at constant y.
    auto f = [&](double x) { return ev.direct(stack[1].B, 2, x, y0); };
    const double fd2 = (f(x0 + dx) - 2 * f(x0) + f(x0 - dx)) / (dx * dx);
    const double fd4 =
        (f(x0 + 2 * dx) - 4 * f(x0 + dx) + 6 * f(x0) - 4 * f(x0 - dx) + f(x0 - 2 * dx)) /
        (dx * dx * dx * dx);
    const double ex2 = ev.represented(second.B, 2, 4, second.prefactor_B, x0, y0);
    const double ex4 = ev.represented(fourth.B, 2, 6, fourth.prefactor_B, x0, y0);
    const double err2 = std::abs(fd2 - ex2);
    const double err4 = std::abs(fd4 - ex4);
    if (level > 0) {
      EXPECT_GT(prev_err2 / err2, 2.5) << "second derivative not O(dx^2)";
      EXPECT_LT(prev_err2 / err2, 6.0);
      EXPECT_GT(prev_err4 / err4, 2.5) << "fourth derivative not O(dx^2)";
      EXPECT_LT(prev_err4 / err4, 6.0);
    }
    prev_err2 = err2;
    prev_err4 = err4;
  }
}

TEST(Stack, DoubleShadowTracksExactPipeline) {
  BasisSet bases(12);
  OperatorTable ops(bases, 11);
  auto exact = build_stack<Rational>(ops, 4);
  auto shadow = build_stack<double>(ops, 4);
  for (int k = 0; k <= 4; ++k) {
    const auto& e = exact[static_cast<std::size_t>(k)];
    const auto& s = shadow[static_cast<std::size_t>(k)];
    for (std::int64_t i = 0; i < e.A0.rows(); ++i) {
      for (std::int64_t j = 0; j < e.A0.cols(); ++j) {
        EXPECT_NEAR(s.A0(i, j), to_double(e.A0(i, j)), 1e-12 * (1 + std::abs(s.A0(i, j))));
        EXPECT_NEAR(s.B(i, j), to_double(e.B(i, j)), 1e-12 * (1 + std::abs(s.B(i, j))));
      }
    }
  }
}
