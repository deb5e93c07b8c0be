#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lubrex/expansion_matrices.hpp"

namespace lubrex {

/// One row of the kappa table: half l1-norms of row 3 of A_0, A_1, B, plus
/// the values after the flux accumulation loop (kappa_2 never changes).
struct KappaRow {
  double k0_before = 0, k1_before = 0, k2 = 0, k0_after = 0, k1_after = 0;
};

/// One row of the K (or K-tilde) table: scaled Frobenius norms of the
/// Legendre-transformed derivative matrices, before/after the loop.
struct KRow {
  double K0_before = 0, K1_before = 0, K2 = 0, K0_after = 0, K1_after = 0;
};

struct RhoThetaRow {
  double rho = 0, theta = 0;
  double max_value = 0;          // rho = max_value^{-1/(2k+2)}
  bool chain_term_argmax = false;  // true if the rho_{k-1}^{-2k} term won
};

struct ConstantsTables {
  std::vector<KappaRow> kappa;
  std::vector<KRow> K;
  std::vector<KRow> Ktilde;
  std::vector<RhoThetaRow> rho_theta;
};

/// Before-values from row 3 of each order, then the convolution loop
/// (sequential in k; updated values feed later orders).
template <class T>
std::vector<KappaRow> kappa_constants(const std::vector<OrderMatrices<T>>& stack);

/// K and K-tilde tables. The accumulation loop uses the post-loop kappas.
template <class T>
std::pair<std::vector<KRow>, std::vector<KRow>> k_constants(
    const std::vector<OrderMatrices<T>>& stack,
    const std::vector<DerivativeMatrices<T>>& derivs,
    const std::vector<LegendreBasisChange<T>>& legendres,
    const std::vector<KappaRow>& kappa);

/// rho_k and theta_k from the after-loop K constants. The running maximum
/// M_k satisfies rho_{k-1}^{-2k} = M_{k-1}, which keeps the chain term exact.
std::vector<RhoThetaRow> rho_theta(const std::vector<KRow>& K, const std::vector<KRow>& Ktilde);

/// Full pipeline for tables k = 0..k_max with a rolling two-order window, so
/// high orders never hold the whole stack in memory. T = Rational gives the
/// exact pipeline (practical through 2k ~ 20+); T = double is the shadow
/// pipeline (2k = 50 in seconds).
template <class T>
ConstantsTables compute_constants(int k_max);

// --- template bodies ---

namespace detail {

template <class T>
double half_l1_row3(const Matrix<T>& m) {
  T acc(0);
  for (const auto& v : m.row(3)) acc += (v < T(0)) ? T(-v) : v;
  return to_double(acc) / 2.0;
}

template <class T>
KappaRow kappa_before(const OrderMatrices<T>& m) {
  KappaRow r;
  r.k0_before = half_l1_row3(m.A0);
  r.k1_before = half_l1_row3(m.A1);
  r.k2 = half_l1_row3(m.B);
  return r;
}

inline void run_kappa_loop(std::vector<KappaRow>& rows) {
  const int k_max = static_cast<int>(rows.size()) - 1;
  for (int k = 0; k <= k_max; ++k) {
    rows[k].k0_after = rows[k].k0_before;
    rows[k].k1_after = rows[k].k1_before;
  }
  for (int k = 1; k <= k_max; ++k) {
    double s0 = 0, s1 = 0;
    for (int ell = 0; ell < k; ++ell) {
      s0 += rows[ell].k0_after * rows[k - ell].k2;
      s1 += rows[ell].k1_after * rows[k - ell].k2;
    }
    rows[k].k0_after += s0;
    rows[k].k1_after += s1;
  }
}

inline void run_k_loop(std::vector<KRow>& rows, const std::vector<KappaRow>& kappa) {
  const int k_max = static_cast<int>(rows.size()) - 1;
  for (int k = 0; k <= k_max; ++k) {
    double s0 = 0, s1 = 0;
    for (int ell = 0; ell <= k; ++ell) {
      s0 += kappa[ell].k0_after * rows[k - ell].K2;
      s1 += kappa[ell].k1_after * rows[k - ell].K2;
    }
    rows[k].K0_after = rows[k].K0_before + s0;
    rows[k].K1_after = rows[k].K1_before + s1;
  }
}

template <class T>
KRow k_before_row(const LegendreBasisChange<T>& leg, const Matrix<T>& m0, const Matrix<T>& m1,
                  const Matrix<T>& mb, std::int64_t dim_target) {
  KRow r;
  const double scale = std::sqrt(static_cast<double>(dim_target));
  r.K0_before = scale * std::sqrt(to_double(transformed_frobenius_squared(leg, m0)));
  r.K1_before = scale * std::sqrt(to_double(transformed_frobenius_squared(leg, m1)));
  r.K2 = scale * std::sqrt(to_double(transformed_frobenius_squared(leg, mb)));
  return r;
}

}  // namespace detail

template <class T>
std::vector<KappaRow> kappa_constants(const std::vector<OrderMatrices<T>>& stack) {
  std::vector<KappaRow> rows;
  rows.reserve(stack.size());
  for (const auto& m : stack) rows.push_back(detail::kappa_before(m));
  detail::run_kappa_loop(rows);
  return rows;
}

template <class T>
std::pair<std::vector<KRow>, std::vector<KRow>> k_constants(
    const std::vector<OrderMatrices<T>>& stack,
    const std::vector<DerivativeMatrices<T>>& derivs,
    const std::vector<LegendreBasisChange<T>>& legendres,
    const std::vector<KappaRow>& kappa) {
  std::vector<KRow> K, Kt;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const auto& leg = legendres[i];
    K.push_back(detail::k_before_row(leg, derivs[i].second.A0, derivs[i].second.A1,
                                     derivs[i].second.B, derivs[i].second.A0.cols()));
    Kt.push_back(detail::k_before_row(leg, derivs[i].fourth.A0, derivs[i].fourth.A1,
                                      derivs[i].fourth.B, derivs[i].fourth.A0.cols()));
  }
  detail::run_k_loop(K, kappa);
  detail::run_k_loop(Kt, kappa);
  return {std::move(K), std::move(Kt)};
}

template <class T>
ConstantsTables compute_constants(int k_max) {
  BasisSet bases(2 * k_max + 4);
  OperatorTable ops(bases, 2 * k_max + 4);

  ConstantsTables out;
  std::vector<OrderMatrices<T>> window;  // at most orders 2k-2, 2k-4
  for (int k = 0; k <= k_max; ++k) {
    OrderMatrices<T> cur;
    if (k == 0) {
      cur = base_case<T>();
    } else {
      cur = next_order(window, ops);
    }
    out.kappa.push_back(detail::kappa_before(cur));
    const auto leg = legendre_change_of_basis<T>(k);
    {
      auto second = derive_second(cur, ops);
      out.K.push_back(detail::k_before_row(leg, second.A0, second.A1, second.B,
                                           second.A0.cols()));
    }
    {
      auto fourth = derive_fourth(cur, ops);
      out.Ktilde.push_back(detail::k_before_row(leg, fourth.A0, fourth.A1, fourth.B,
                                                fourth.A0.cols()));
    }
    window.push_back(std::move(cur));
    // next_order only looks at the top two entries; blank older orders.
    if (window.size() >= 3) {
      auto& old = window[window.size() - 3];
      old.A0 = Matrix<T>();
      old.A1 = Matrix<T>();
      old.B = Matrix<T>();
    }
  }
  detail::run_kappa_loop(out.kappa);
  detail::run_k_loop(out.K, out.kappa);
  detail::run_k_loop(out.Ktilde, out.kappa);
  out.rho_theta = rho_theta(out.K, out.Ktilde);
  return out;
}

}  // namespace lubrex
