#include "lubrex/error_bounds.hpp"

#include <cmath>
#include <limits>

#include "lubrex/errors.hpp"

namespace lubrex {

ErrorBudget star_bound(const GeometryMoments& mom, const ConstantsTables& constants,
                       const BoundaryData& bc, int k, double eps) {
  if (k >= static_cast<int>(constants.rho_theta.size()) || k > mom.k_max) {
    throw Error(ErrorCode::MissingPredecessor, "constants/moments tables too short for k");
  }
  ErrorBudget b;
  b.k = k;
  b.eps = eps;
  b.I1 = mom.I1;
  b.I3 = mom.I3;
  b.h0 = mom.h0;
  b.V0 = bc.V0;
  b.V1 = bc.V1;
  b.rho_k = constants.rho_theta[static_cast<std::size_t>(k)].rho;
  b.theta_k = constants.rho_theta[static_cast<std::size_t>(k)].theta;
  b.r_k = mom.r[static_cast<std::size_t>(k)];
  b.validity = !(eps > mom.r[0] / 3.0);

  if (std::isinf(b.r_k)) {
    // Constant shape: the expansion is exact and the pressure vanishes.
    b.star = 0;
    b.beta_lbb_inverse_bound = std::max(9.0 / std::sqrt(b.h0), 2.25 * std::pow(b.h0, -1.5));
    return b;
  }
  const double speeds = std::abs(bc.V0) + std::abs(bc.V1);
  const double bracket = 1.0 + b.theta_k * (eps / b.r_k) * std::sqrt(mom.I3 / mom.I1);
  b.star = std::sqrt(mom.I1) * speeds * bracket *
           std::pow(eps / (b.rho_k * b.r_k), 2.0 * k + 2.0);
  b.bound_psi = b.star;
  b.bound_uv = b.star;
  b.bound_omega = b.star;
  b.bound_Q = b.star / std::sqrt(3.0);
  b.beta_lbb_inverse_bound = std::max(9.0 / std::sqrt(b.h0), 2.25 * std::pow(b.h0, -1.5)) *
                             (1.0 + 1.0 / (b.r_k * b.r_k));
  const double r_plus_inv = b.r_k + 1.0 / b.r_k;
  b.bound_p = std::max(9.0 / std::sqrt(b.h0), 2.25 * std::pow(b.h0, -1.5)) * r_plus_inv *
              r_plus_inv * b.star;
  return b;
}

namespace {

// Tail of sum_{l >= l0} binom(a, l) z^l for the alternating binomial series,
// where `first` = binom(a, l0) and `step(l)` advances binom(a, l) to
// binom(a, l+1). Alternating with decreasing magnitude for 0 < z < 1, so the
// truncation error is below the first omitted term.
template <class Step>
double binomial_tail(double first, int l0, double z, Step step) {
  double coef = first;
  double zpow = 1.0;
  double sum = 0.0;
  for (int l = l0; l < l0 + 400; ++l) {
    const double term = coef * zpow;
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    coef = step(l, coef);
    zpow *= z;
  }
  return sum;
}

}  // namespace

BoundaryResidual gamma_k_profile(const ShapeSpec& shape, const BoundaryData& bc, int k,
                                 double eps, int n_samples) {
  // sup |h_x| from a dense sample.
  double sup_hx = 0;
  {
    std::vector<double> hd(3);
    for (int i = 0; i < 8192; ++i) {
      eval_h_derivs(shape, static_cast<double>(i) / 8192, 1, hd);
      sup_hx = std::max(sup_hx, std::abs(hd[1]));
    }
  }
  if (eps * sup_hx >= 1.0) {
    throw Error(ErrorCode::BinomialDivergence, "gamma_k needs eps * sup|h_x| < 1");
  }

  BoundaryResidual r;
  r.k = k;
  r.eps = eps;
  r.x.resize(static_cast<std::size_t>(n_samples));
  r.gamma.resize(static_cast<std::size_t>(n_samples));
  r.gamma_x.resize(static_cast<std::size_t>(n_samples));
  r.bound.resize(static_cast<std::size_t>(n_samples));
  r.bound_x.resize(static_cast<std::size_t>(n_samples));

  const double b_half_k1 = std::abs(to_double(binom_minus_half(k + 1)));
  const double b_3half_k = std::abs(to_double(binom_minus_three_half(k)));
  std::vector<double> hd(3);
  for (int i = 0; i < n_samples; ++i) {
    const double x = static_cast<double>(i) / n_samples;
    eval_h_derivs(shape, x, 2, hd);
    const double hx = hd[1];
    const double z = eps * eps * hx * hx;

    // gamma_k = V1 eps^{-2k-2} * tail_{l >= k+1} binom(-1/2, l) z^l
    //         = V1 h_x^{2k+2} * sum_{m >= 0} binom(-1/2, k+1+m) z^m * (z/(...)),
    // evaluated as the tail sum with the eps powers folded into z^{k+1}.
    const double first_half = to_double(binom_minus_half(k + 1));
    const double tail_half = binomial_tail(first_half, k + 1, z, [](int l, double c) {
      return c * -(2.0 * l + 1.0) / (2.0 * l + 2.0);
    });
    // eps^{-2k-2} z^{k+1} = h_x^{2k+2}
    r.gamma[static_cast<std::size_t>(i)] = bc.V1 * tail_half * std::pow(hx, 2 * k + 2);

    // gamma_{k,x} = -V1 h_x h_xx eps^{-2k} * tail_{l >= k} binom(-3/2, l) z^l
    const double first_3half = to_double(binom_minus_three_half(k));
    const double tail_3half = binomial_tail(first_3half, k, z, [](int l, double c) {
      return c * -(2.0 * l + 3.0) / (2.0 * l + 2.0);
    });
    r.gamma_x[static_cast<std::size_t>(i)] =
        -bc.V1 * hd[1] * hd[2] * tail_3half * std::pow(hx, 2 * k);

    r.x[static_cast<std::size_t>(i)] = x;
    r.bound[static_cast<std::size_t>(i)] =
        std::abs(bc.V1) * b_half_k1 * std::pow(std::abs(hx), 2 * k + 2);
    r.bound_x[static_cast<std::size_t>(i)] =
        std::abs(bc.V1) * b_3half_k * std::abs(std::pow(hx, 2 * k + 1) * hd[2]);
    // Reported against the relaxed 1/sqrt(3k+4) form of the bound.
    const double relaxed = std::abs(bc.V1) * std::pow(std::abs(hx), 2 * k + 2) /
                           std::sqrt(3.0 * k + 4.0);
    if (relaxed > 0) {
      r.max_ratio = std::max(r.max_ratio, std::abs(r.gamma[static_cast<std::size_t>(i)]) / relaxed);
    }
  }
  return r;
}

namespace {

double ratio_of(double bound, double measured) {
  if (measured == 0) return std::numeric_limits<double>::infinity();
  return bound / measured;
}

}  // namespace

RatioReport compare_bound_to_error(const ErrorBudget& budget, const NormReport& measured) {
  RatioReport r;
  r.k = budget.k;
  r.eps = budget.eps;
  if (budget.star == 0) {
    // Constant shape: bound and truncation error are both identically zero;
    // whatever the solver reports is its own noise floor.
    r.exact_match = true;
    return r;
  }
  r.ratio_psi = ratio_of(budget.bound_psi, measured.psi_2eps);
  r.ratio_uv = ratio_of(budget.bound_uv, measured.uv_1eps);
  r.ratio_omega = ratio_of(budget.bound_omega, measured.omega_0);
  r.ratio_p = ratio_of(budget.bound_p, measured.p_0);
  r.ratio_q = ratio_of(budget.bound_Q, measured.q_err);
  const double e = 1.0 / (2.0 * budget.k + 2.0);
  r.slack_psi = std::pow(r.ratio_psi, e);
  r.slack_uv = std::pow(r.ratio_uv, e);
  r.slack_omega = std::pow(r.ratio_omega, e);
  r.slack_p = std::pow(r.ratio_p, e);
  r.slack_q = std::pow(r.ratio_q, e);
  if (budget.validity) {
    const double tol = 1.0;  // the bound admits no slack below 1
    if (r.ratio_psi < tol || r.ratio_uv < tol || r.ratio_omega < tol || r.ratio_p < tol ||
        r.ratio_q < tol) {
      throw Error(ErrorCode::BoundViolation,
                  "measured error exceeds its a priori bound; this indicates a bug");
    }
  }
  return r;
}

}  // namespace lubrex
