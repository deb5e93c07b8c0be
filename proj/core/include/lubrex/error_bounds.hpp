#pragma once

#include <vector>

#include "lubrex/field_eval.hpp"
#include "lubrex/geometry.hpp"
#include "lubrex/universal_constants.hpp"

namespace lubrex {

/// The evaluated a priori truncation-error budget at one (k, eps): the
/// master bound
///
///   star = sqrt(I1) (|V0|+|V1|) [1 + theta_k (eps/r_k) sqrt(I3/I1)]
///          (eps / (rho_k r_k))^{2k+2}
///
/// bounds the stream function, velocity and vorticity errors; |Q_err| is
/// bounded by star/sqrt(3); pressure picks up the inf-sup factor
/// max(9 h0^{-1/2}, (9/4) h0^{-3/2}) (r_k + 1/r_k)^2. A constant shape has
/// r_k = infinity and every bound collapses to zero.
struct ErrorBudget {
  double star = 0;
  double bound_psi = 0, bound_Q = 0, bound_uv = 0, bound_omega = 0, bound_p = 0;
  double beta_lbb_inverse_bound = 0;
  bool validity = true;  // eps <= r_0/3 (bounds are still reported outside)
  // inputs echoed
  int k = 0;
  double eps = 0, r_k = 0, I1 = 0, I3 = 0, rho_k = 0, theta_k = 0, h0 = 0, V0 = 0, V1 = 0;
};

ErrorBudget star_bound(const GeometryMoments& mom, const ConstantsTables& constants,
                       const BoundaryData& bc, int k, double eps);

/// Sampled profile of the slip boundary mismatch gamma_k and its derivative,
/// with the first-omitted-term pointwise bounds.
struct BoundaryResidual {
  int k = 0;
  double eps = 0;
  std::vector<double> x;
  std::vector<double> gamma;    // gamma_k(x)
  std::vector<double> gamma_x;  // d gamma_k / dx
  std::vector<double> bound;    // |V1| |h_x|^{2k+2} / sqrt(3k+4)
  std::vector<double> bound_x;  // |V1| 2(k+1)/sqrt(3k+4) |h_x^{2k+1} h_xx|
  double max_ratio = 0;         // max |gamma|/bound over samples (<= 1)
};

/// Evaluates gamma_k by summing the tail of the alternating binomial series
/// directly (no catastrophic subtraction). Requires eps * sup|h_x| < 1;
/// throws Error(BinomialDivergence) otherwise.
BoundaryResidual gamma_k_profile(const ShapeSpec& shape, const BoundaryData& bc, int k,
                                 double eps, int n_samples);

/// Measured weighted error norms for one configuration (produced by the
/// reference-solver module; mirrored here to compare against the budget).
struct NormReport {
  double psi_2eps = 0;    // || psi_err ||_{2,eps}
  double uv_1eps = 0;     // sqrt(||u_err||_{1,eps}^2 + ||eps v_err||_{1,eps}^2)
  double omega_0 = 0;     // || omega_err ||_0
  double p_0 = 0;         // || p_err ||_0 (zero-mean representative)
  double q_err = 0;       // |Q_err|
};

/// Bound-to-measured ratios; `slack` entries are ratio^{1/(2k+2)}.
struct RatioReport {
  int k = 0;
  double eps = 0;
  double ratio_psi = 0, ratio_uv = 0, ratio_omega = 0, ratio_p = 0, ratio_q = 0;
  double slack_psi = 0, slack_uv = 0, slack_omega = 0, slack_p = 0, slack_q = 0;
  bool exact_match = false;  // both bound and error at zero (constant shape)
};

/// Throws Error(BoundViolation) when a measured error exceeds its bound
/// while the validity hypothesis holds; such a violation signals an
/// implementation bug, not a sharpness issue.
RatioReport compare_bound_to_error(const ErrorBudget& budget, const NormReport& measured);

}  // namespace lubrex
