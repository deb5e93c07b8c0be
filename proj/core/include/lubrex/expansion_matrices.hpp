#pragma once

#include <cstdint>
#include <vector>

#include "lubrex/errors.hpp"
#include "lubrex/matrix.hpp"
#include "lubrex/parallel.hpp"
#include "lubrex/partition_basis.hpp"
#include "lubrex/rational.hpp"

namespace lubrex {

/// The universal matrices A_0, A_1, B of one expansion order 2k: rows are
/// indexed 0..2k+3 (powers of y/h), columns 1..d_{2k} (basis monomials).
/// They are geometry-independent; the shape enters only through the basis
/// functions and their weighted averages.
template <class T>
struct OrderMatrices {
  int order = 0;  // 2k
  Matrix<T> A0, A1, B;
};

/// Matrices of the second x-derivatives: row n of A-type carries its
/// coefficients over the superdegree-(2k+2) basis with an overall h^{-1}
/// prefactor (h^{-2} for the B part).
template <class T>
struct SecondDerivativeMatrices {
  int order = 0;
  Matrix<T> A0, A1, B;  // (2k+4) x d_{2k+2}
  static constexpr int prefactor_A = -1;
  static constexpr int prefactor_B = -2;
};

/// Fourth x-derivatives; prefactors h^{-3} (A parts) and h^{-4} (B part).
template <class T>
struct FourthDerivativeMatrices {
  int order = 0;
  Matrix<T> A0, A1, B;  // (2k+4) x d_{2k+4}
  static constexpr int prefactor_A = -3;
  static constexpr int prefactor_B = -4;
};

template <class T>
struct DerivativeMatrices {
  SecondDerivativeMatrices<T> second;
  FourthDerivativeMatrices<T> fourth;
};

/// Change of basis between monomials (y/h)^n and shifted Legendre
/// polynomials on [0,1]: rows of R are P~_n coefficients, D = diag sqrt(2n+1).
/// R_inv_T is R^{-T}; its entries are nonnegative with unit column sums.
template <class T>
struct LegendreBasisChange {
  int order = 0;                        // 2k; matrices are (2k+4) x (2k+4)
  Matrix<T> R;                          // lower triangular, integer entries
  Matrix<T> R_inv_T;                    // upper triangular
  std::vector<std::int64_t> D_squared;  // 2n+1, n = 0..2k+3
};

/// Order-0 matrices: A0 = (0,1,-2,1)^T, A1 = (0,0,-1,1)^T, B = (0,0,3,-2)^T.
template <class T>
OrderMatrices<T> base_case();

/// One step of the row recursion: consumes orders 2k-2 (and 2k-4 when k >= 2)
/// from `stack` and returns order 2k = stack.size()*2. Throws
/// Error(MissingPredecessor) when the stack is short.
template <class T>
OrderMatrices<T> next_order(const std::vector<OrderMatrices<T>>& stack,
                            const OperatorTable& ops);

/// Builds orders 0..2k_max.
template <class T>
std::vector<OrderMatrices<T>> build_stack(const OperatorTable& ops, int k_max);

template <class T>
SecondDerivativeMatrices<T> derive_second(const OrderMatrices<T>& m, const OperatorTable& ops);

template <class T>
FourthDerivativeMatrices<T> derive_fourth(const OrderMatrices<T>& m, const OperatorTable& ops);

template <class T>
DerivativeMatrices<T> derive_x_derivatives(const OrderMatrices<T>& m, const OperatorTable& ops) {
  return {derive_second(m, ops), derive_fourth(m, ops)};
}

template <class T>
LegendreBasisChange<T> legendre_change_of_basis(int k);

/// ||D^{-1} R^{-T} M||_F^2, accumulated row by row so M is never copied.
/// Exact when T is Rational (D^{-2} is integer diagonal).
template <class T>
T transformed_frobenius_squared(const LegendreBasisChange<T>& leg, const Matrix<T>& m);

// --- template bodies ---

template <class T>
OrderMatrices<T> base_case() {
  OrderMatrices<T> m;
  m.order = 0;
  m.A0 = Matrix<T>(4, 1);
  m.A1 = Matrix<T>(4, 1);
  m.B = Matrix<T>(4, 1);
  auto I = [](std::int64_t v) { return ScalarTraits<T>::from_int(v); };
  m.A0(1, 0) = I(1);
  m.A0(2, 0) = I(-2);
  m.A0(3, 0) = I(1);
  m.A1(2, 0) = I(-1);
  m.A1(3, 0) = I(1);
  m.B(2, 0) = I(3);
  m.B(3, 0) = I(-2);
  return m;
}

namespace detail {

// Applies the shifted-operator chain L_{c+len-1} ... L_{c+1} L_c to a row
// vector over Phi_{k0}, innermost factor first.
template <class T>
std::vector<T> shifted_chain(const OperatorTable& ops, int k0, std::int64_t c_first, int len,
                             std::span<const T> v) {
  std::vector<T> cur(v.begin(), v.end());
  for (int s = 0; s < len; ++s) {
    const int k = k0 + s;
    std::vector<T> next(static_cast<std::size_t>(ops.dim(k + 1)), T(0));
    ops.apply_shifted<T>(k, c_first + s, cur, next);
    cur = std::move(next);
  }
  return cur;
}

template <class T>
void scale_add(std::span<T> dst, std::span<const T> src, const T& w) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
}

}  // namespace detail

template <class T>
OrderMatrices<T> next_order(const std::vector<OrderMatrices<T>>& stack,
                            const OperatorTable& ops) {
  const int k = static_cast<int>(stack.size());
  if (k < 1 || stack.back().order != 2 * k - 2) {
    throw Error(ErrorCode::MissingPredecessor, "next_order requires orders 0..2k-2 in the stack");
  }
  if (k >= 2 && stack[static_cast<std::size_t>(k) - 2].order != 2 * k - 4) {
    throw Error(ErrorCode::MissingPredecessor, "next_order requires order 2k-4 in the stack");
  }
  const OrderMatrices<T>& prev2 = stack.back();
  const std::int64_t d = ops.dim(2 * k);
  OrderMatrices<T> m;
  m.order = 2 * k;
  m.A0 = Matrix<T>(2 * k + 4, d);
  m.A1 = Matrix<T>(2 * k + 4, d);
  m.B = Matrix<T>(2 * k + 4, d);

  // Rows 4..2k+3. Row n is fed by row n-2 of order 2k-2 through two shifted
  // operators (A rows carry one power of h, so their shifts lag B's by one),
  // plus row n-4 of order 2k-4 through four shifted operators when k >= 2.
  parallel_for(4, 2 * k + 4, [&](std::int64_t n) {
    const T w2 = ScalarTraits<T>::from_ratio(-2, n * (n - 1));
    auto a0 = detail::shifted_chain<T>(ops, 2 * k - 2, n - 3, 2, prev2.A0.row(n - 2));
    auto a1 = detail::shifted_chain<T>(ops, 2 * k - 2, n - 3, 2, prev2.A1.row(n - 2));
    auto b = detail::shifted_chain<T>(ops, 2 * k - 2, n - 2, 2, prev2.B.row(n - 2));
    detail::scale_add<T>(m.A0.row(n), a0, w2);
    detail::scale_add<T>(m.A1.row(n), a1, w2);
    detail::scale_add<T>(m.B.row(n), b, w2);
    if (k >= 2 && n >= 6) {
      const OrderMatrices<T>& prev4 = stack[static_cast<std::size_t>(k) - 2];
      const T w4 = ScalarTraits<T>::from_ratio(-1, n * (n - 1) * (n - 2) * (n - 3));
      auto c0 = detail::shifted_chain<T>(ops, 2 * k - 4, n - 5, 4, prev4.A0.row(n - 4));
      auto c1 = detail::shifted_chain<T>(ops, 2 * k - 4, n - 5, 4, prev4.A1.row(n - 4));
      auto cb = detail::shifted_chain<T>(ops, 2 * k - 4, n - 4, 4, prev4.B.row(n - 4));
      detail::scale_add<T>(m.A0.row(n), c0, w4);
      detail::scale_add<T>(m.A1.row(n), c1, w4);
      detail::scale_add<T>(m.B.row(n), cb, w4);
    }
  });

  // Rows 2 and 3 restore the boundary conditions destroyed by integration.
  for (std::int64_t n = 4; n < 2 * k + 4; ++n) {
    const T w2 = ScalarTraits<T>::from_int(n - 3);
    const T w3 = ScalarTraits<T>::from_int(2 - n);
    detail::scale_add<T>(m.A0.row(2), m.A0.row(n), w2);
    detail::scale_add<T>(m.A0.row(3), m.A0.row(n), w3);
    detail::scale_add<T>(m.A1.row(2), m.A1.row(n), w2);
    detail::scale_add<T>(m.A1.row(3), m.A1.row(n), w3);
    detail::scale_add<T>(m.B.row(2), m.B.row(n), w2);
    detail::scale_add<T>(m.B.row(3), m.B.row(n), w3);
  }

  // Slip boundary data: move binom(-1/2,k) between rows 2 and 3 of A1 in the
  // pure-h_x column.
  const T bin = ScalarTraits<T>::from_rational(binom_minus_half(k));
  m.A1(2, 0) -= bin;
  m.A1(3, 0) += bin;
  return m;
}

template <class T>
std::vector<OrderMatrices<T>> build_stack(const OperatorTable& ops, int k_max) {
  std::vector<OrderMatrices<T>> stack;
  stack.reserve(static_cast<std::size_t>(k_max) + 1);
  stack.push_back(base_case<T>());
  for (int k = 1; k <= k_max; ++k) stack.push_back(next_order(stack, ops));
  return stack;
}

template <class T>
SecondDerivativeMatrices<T> derive_second(const OrderMatrices<T>& m, const OperatorTable& ops) {
  const int twok = m.order;
  if (ops.k_top() < twok + 2) {
    throw Error(ErrorCode::MissingPredecessor, "operator table must reach superdegree 2k+2");
  }
  SecondDerivativeMatrices<T> d;
  d.order = twok;
  const std::int64_t cols = ops.dim(twok + 2);
  d.A0 = Matrix<T>(twok + 4, cols);
  d.A1 = Matrix<T>(twok + 4, cols);
  d.B = Matrix<T>(twok + 4, cols);
  // d/dx of g h^{p-n} y^n shifts p down by one and applies L_{n-p}; A rows
  // start at p = 1, B rows at p = 0.
  parallel_for(0, twok + 4, [&](std::int64_t n) {
    auto a0 = detail::shifted_chain<T>(ops, twok, n - 1, 2, m.A0.row(n));
    auto a1 = detail::shifted_chain<T>(ops, twok, n - 1, 2, m.A1.row(n));
    auto b = detail::shifted_chain<T>(ops, twok, n, 2, m.B.row(n));
    std::copy(a0.begin(), a0.end(), d.A0.row(n).begin());
    std::copy(a1.begin(), a1.end(), d.A1.row(n).begin());
    std::copy(b.begin(), b.end(), d.B.row(n).begin());
  });
  return d;
}

template <class T>
FourthDerivativeMatrices<T> derive_fourth(const OrderMatrices<T>& m, const OperatorTable& ops) {
  const int twok = m.order;
  if (ops.k_top() < twok + 4) {
    throw Error(ErrorCode::MissingPredecessor, "operator table must reach superdegree 2k+4");
  }
  FourthDerivativeMatrices<T> d;
  d.order = twok;
  const std::int64_t cols = ops.dim(twok + 4);
  d.A0 = Matrix<T>(twok + 4, cols);
  d.A1 = Matrix<T>(twok + 4, cols);
  d.B = Matrix<T>(twok + 4, cols);
  parallel_for(0, twok + 4, [&](std::int64_t n) {
    auto a0 = detail::shifted_chain<T>(ops, twok, n - 1, 4, m.A0.row(n));
    auto a1 = detail::shifted_chain<T>(ops, twok, n - 1, 4, m.A1.row(n));
    auto b = detail::shifted_chain<T>(ops, twok, n, 4, m.B.row(n));
    std::copy(a0.begin(), a0.end(), d.A0.row(n).begin());
    std::copy(a1.begin(), a1.end(), d.A1.row(n).begin());
    std::copy(b.begin(), b.end(), d.B.row(n).begin());
  });
  return d;
}

template <class T>
LegendreBasisChange<T> legendre_change_of_basis(int k) {
  LegendreBasisChange<T> leg;
  leg.order = 2 * k;
  const std::int64_t n_rows = 2 * k + 4;
  leg.R = Matrix<T>(n_rows, n_rows);
  leg.R_inv_T = Matrix<T>(n_rows, n_rows);
  leg.D_squared.resize(static_cast<std::size_t>(n_rows));
  for (std::int64_t n = 0; n < n_rows; ++n) leg.D_squared[static_cast<std::size_t>(n)] = 2 * n + 1;

  auto I = [](std::int64_t v) { return ScalarTraits<T>::from_int(v); };
  // Three-term recurrence for the shifted Legendre coefficients.
  leg.R(0, 0) = I(1);
  if (n_rows > 1) {
    leg.R(1, 0) = I(-1);
    leg.R(1, 1) = I(2);
  }
  for (std::int64_t n = 2; n < n_rows; ++n) {
    const T an = ScalarTraits<T>::from_ratio(2 * n - 1, n);
    const T bn = ScalarTraits<T>::from_ratio(n - 1, n);
    for (std::int64_t j = 0; j <= n; ++j) {
      T acc = T(0);
      if (j >= 1) acc += an * I(2) * leg.R(n - 1, j - 1);
      if (j <= n - 1) acc -= an * leg.R(n - 1, j);
      if (j <= n - 2) acc -= bn * leg.R(n - 2, j);
      leg.R(n, j) = acc;
    }
  }
  // R^{-1}(n,m) = (2m+1) (n!)^2 / ((n-m)! (n+m+1)!), filled along each row by
  // the stable ratio recurrence; R_inv_T is its transpose.
  for (std::int64_t n = 0; n < n_rows; ++n) {
    T c = ScalarTraits<T>::from_ratio(1, n + 1);
    leg.R_inv_T(0, n) = c;
    for (std::int64_t mm = 1; mm <= n; ++mm) {
      c *= ScalarTraits<T>::from_ratio((2 * mm + 1) * (n - mm + 1), (2 * mm - 1) * (n + mm + 1));
      leg.R_inv_T(mm, n) = c;
    }
  }
  return leg;
}

template <class T>
T transformed_frobenius_squared(const LegendreBasisChange<T>& leg, const Matrix<T>& m) {
  const std::int64_t n_rows = m.rows();
  const std::int64_t d = m.cols();
  std::vector<T> per_row(static_cast<std::size_t>(n_rows), T(0));
  parallel_for(0, n_rows, [&](std::int64_t n) {
    std::vector<T> scratch(static_cast<std::size_t>(d), T(0));
    for (std::int64_t mm = n; mm < n_rows; ++mm) {
      const T& w = leg.R_inv_T(n, mm);
      if (w == T(0)) continue;
      detail::scale_add<T>(scratch, m.row(mm), w);
    }
    T row_sq(0);
    for (const auto& x : scratch) row_sq += x * x;
    per_row[static_cast<std::size_t>(n)] =
        row_sq / ScalarTraits<T>::from_int(leg.D_squared[static_cast<std::size_t>(n)]);
  });
  T total(0);
  for (const auto& v : per_row) total += v;
  return total;
}

}  // namespace lubrex
