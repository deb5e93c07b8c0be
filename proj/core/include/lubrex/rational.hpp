#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace lubrex {

/// Exact arbitrary-precision rational. All expansion matrices are computed
/// over this type by default; `double` is the shadow scalar for high orders.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }
inline constexpr double to_double(double x) { return x; }

inline std::string to_fraction_string(const Rational& q) {
  return q.get_str();  // "p/q" (or "p" when the denominator is 1)
}

/// Scalar adaptor so the matrix recursion can run in exact or shadow mode.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(std::int64_t n) { return Rational(static_cast<long>(n)); }
  static Rational from_ratio(std::int64_t p, std::int64_t q) {
    Rational r(static_cast<long>(p), static_cast<long>(q));
    r.canonicalize();
    return r;
  }
  static Rational from_rational(const Rational& q) { return q; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(std::int64_t n) { return static_cast<double>(n); }
  static double from_ratio(std::int64_t p, std::int64_t q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double from_rational(const Rational& q) { return q.get_d(); }
};

/// Binomial coefficient (-1/2 choose k), exact. Appears in the order-2k slip
/// boundary data and in the boundary correction of the matrix recursion.
inline Rational binom_minus_half(int k) {
  Rational r(1);
  for (int ell = 1; ell <= k; ++ell) {
    r *= Rational(-(2 * ell - 1), 2 * ell);
    r.canonicalize();
  }
  return r;
}

/// Binomial coefficient (-3/2 choose k), exact.
inline Rational binom_minus_three_half(int k) {
  Rational r(1);
  for (int ell = 1; ell <= k; ++ell) {
    r *= Rational(-(2 * ell + 1), 2 * ell);
    r.canonicalize();
  }
  return r;
}

}  // namespace lubrex
