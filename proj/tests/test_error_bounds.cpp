#include "lubrex/error_bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace lubrex;

namespace {

class BoundFixture : public ::testing::Test {
 protected:
  BoundFixture()
      : shape(parse_shape("sine:a=0.2")),
        bases(6),
        mom(moments(shape, bases, 2, 1024)),
        constants(compute_constants<Rational>(2)),
        bc{-0.5, 1.0} {}

  ShapeSpec shape;
  BasisSet bases;
  GeometryMoments mom;
  ConstantsTables constants;
  BoundaryData bc;
};

}  // namespace

TEST_F(BoundFixture, StarFormulaAndDerivedBounds) {
  const double eps = 0.1;
  ErrorBudget b = star_bound(mom, constants, bc, 0, eps);
  EXPECT_TRUE(b.validity);
  const double speeds = std::abs(bc.V0) + std::abs(bc.V1);
  const double want = std::sqrt(mom.I1) * speeds *
                      (1 + b.theta_k * eps / b.r_k * std::sqrt(mom.I3 / mom.I1)) *
                      std::pow(eps / (b.rho_k * b.r_k), 2);
  EXPECT_NEAR(b.star, want, 1e-14 * want);
  EXPECT_DOUBLE_EQ(b.bound_psi, b.star);
  EXPECT_DOUBLE_EQ(b.bound_uv, b.star);
  EXPECT_DOUBLE_EQ(b.bound_omega, b.star);
  EXPECT_NEAR(b.bound_Q, b.star / std::sqrt(3.0), 1e-15);
  const double factor = std::max(9.0 / std::sqrt(b.h0), 2.25 * std::pow(b.h0, -1.5)) *
                        std::pow(b.r_k + 1 / b.r_k, 2);
  EXPECT_NEAR(b.bound_p / b.star, factor, 1e-10 * factor);
}

TEST_F(BoundFixture, ThetaOverRCombinationGoldenValue) {
  // theta_k / r_k sqrt(I3/I1) = 12.5 at k = 0 for a = 1/5.
  ErrorBudget b = star_bound(mom, constants, bc, 0, 0.05);
  const double combo = b.theta_k / b.r_k * std::sqrt(b.I3 / b.I1);
  EXPECT_NEAR(combo, 12.5, 0.05 * 12.5);
}

TEST(BoundTinyGap, CombinationGoldenValueAtK1) {
  // Golden value 19.3 at k = 1 for a = 1/100.
  ShapeSpec shape = parse_shape("sine:a=0.01");
  BasisSet bases(4);
  GeometryMoments mom = moments(shape, bases, 1, 16384);
  ConstantsTables constants = compute_constants<Rational>(1);
  ErrorBudget b = star_bound(mom, constants, BoundaryData{-0.5, 1.0}, 1, 0.01);
  const double combo = b.theta_k / b.r_k * std::sqrt(b.I3 / b.I1);
  EXPECT_NEAR(combo, 19.3, 0.05 * 19.3);
}

TEST(BoundConstShape, EverythingZero) {
  ShapeSpec flat = parse_shape("const:c=0.5");
  BasisSet bases(4);
  GeometryMoments mom = moments(flat, bases, 1, 256);
  ConstantsTables constants = compute_constants<Rational>(1);
  ErrorBudget b = star_bound(mom, constants, BoundaryData{-0.5, 1.0}, 1, 0.2);
  EXPECT_EQ(b.star, 0.0);
  EXPECT_EQ(b.bound_p, 0.0);
  EXPECT_EQ(b.bound_Q, 0.0);
}

TEST_F(BoundFixture, MonotoneInEpsAndSpeeds) {
  double prev = 0;
  for (double eps : {0.02, 0.05, 0.08, 0.11}) {
    ErrorBudget b = star_bound(mom, constants, bc, 1, eps);
    EXPECT_GT(b.star, prev);
    prev = b.star;
  }
  ErrorBudget base = star_bound(mom, constants, bc, 1, 0.1);
  ErrorBudget faster = star_bound(mom, constants, BoundaryData{-1.0, 1.0}, 1, 0.1);
  EXPECT_GT(faster.star, base.star);
}

TEST_F(BoundFixture, ValidityFlagOutsideTheorem) {
  ErrorBudget b = star_bound(mom, constants, bc, 0, 0.2);  // r_0/3 = 0.1186
  EXPECT_FALSE(b.validity);
  EXPECT_GT(b.star, 0.0);  // still evaluable
}

TEST(GammaProfile, ConstShapeIsZero) {
  ShapeSpec flat = parse_shape("const:c=0.5");
  BoundaryResidual r = gamma_k_profile(flat, BoundaryData{-0.5, 1.0}, 2, 0.1, 64);
  for (double g : r.gamma) EXPECT_EQ(g, 0.0);
  for (double g : r.gamma_x) EXPECT_EQ(g, 0.0);
}

TEST(GammaProfile, KZeroMatchesDirectDifference) {
  ShapeSpec shape = parse_shape("sine:a=0.2");
  const double eps = 0.1;
  const double V1 = 1.0;
  BoundaryResidual r = gamma_k_profile(shape, BoundaryData{-0.5, V1}, 0, eps, 128);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    double hd[2];
    eval_h_derivs(shape, r.x[i], 1, hd);
    const double z = eps * eps * hd[1] * hd[1];
    const double direct = (V1 / std::sqrt(1 + z) - V1) / (eps * eps);
    EXPECT_NEAR(r.gamma[i], direct, 1e-12 * (1 + std::abs(direct)));
    EXPECT_LE(std::abs(r.gamma[i]), V1 * hd[1] * hd[1] / 2 * (1 + 1e-12));
  }
  EXPECT_LE(r.max_ratio, 1.0);
}

TEST(GammaProfile, PointwiseBoundAtK2) {
  ShapeSpec shape = parse_shape("sine:a=0.2");
  BoundaryResidual r = gamma_k_profile(shape, BoundaryData{-0.5, 1.0}, 2, 0.1, 256);
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_GT(r.max_ratio, 0.1);  // the bound is within an order of magnitude
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    EXPECT_LE(std::abs(r.gamma[i]), r.bound[i] * (1 + 1e-12));
    EXPECT_LE(std::abs(r.gamma_x[i]), r.bound_x[i] * (1 + 1e-12));
  }
}

TEST(GammaProfile, DivergenceGuard) {
  ShapeSpec shape = parse_shape("sine:a=0.2");  // sup|h_x| = 0.8 pi
  try {
    gamma_k_profile(shape, BoundaryData{-0.5, 1.0}, 1, 0.5, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BinomialDivergence);
  }
}

TEST_F(BoundFixture, CompareRatiosAndViolation) {
  ErrorBudget b = star_bound(mom, constants, bc, 0, 0.1);
  NormReport measured;
  measured.psi_2eps = b.star / 100.0;
  measured.uv_1eps = b.star / 123.0;
  measured.omega_0 = b.star / 50.0;
  measured.p_0 = b.bound_p / 10.0;
  measured.q_err = b.bound_Q / 3.0;
  RatioReport r = compare_bound_to_error(b, measured);
  EXPECT_FALSE(r.exact_match);
  EXPECT_NEAR(r.ratio_uv, 123.0, 1e-9);
  EXPECT_NEAR(r.slack_uv, std::sqrt(123.0), 1e-9);
  measured.uv_1eps = b.star * 1.01;
  try {
    compare_bound_to_error(b, measured);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundViolation);
  }
}

TEST(CompareConstShape, ExactMatchSentinel) {
  ShapeSpec flat = parse_shape("const:c=0.5");
  BasisSet bases(4);
  GeometryMoments mom = moments(flat, bases, 1, 256);
  ConstantsTables constants = compute_constants<Rational>(1);
  ErrorBudget b = star_bound(mom, constants, BoundaryData{-0.5, 1.0}, 1, 0.05);
  NormReport noise;
  noise.uv_1eps = 1e-12;  // solver noise
  RatioReport r = compare_bound_to_error(b, noise);
  EXPECT_TRUE(r.exact_match);
}
