#pragma once

// Test-only oracles, implemented independently of the library paths they
// check: a pentagonal-number partition counter, a brute-force symbolic
// algebra over the raw polynomial ring Q[h, h', h'', ...], and plain
// composite quadrature.

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "lubrex/partition_basis.hpp"
#include "lubrex/rational.hpp"

namespace oracles {

/// Euler's pentagonal-number recurrence.
std::vector<std::int64_t> pentagonal_partition_numbers(int n_max);

/// A polynomial in h and its derivatives: monomial exponents e[j] = power of
/// d^j h (e[0] = power of h), mapped to rational coefficients.
using RawMonomial = std::vector<int>;
using RawPoly = std::map<RawMonomial, lubrex::Rational>;

RawPoly raw_from_tuple(std::span<const std::uint8_t> tuple);

/// Product rule applied directly to the raw exponents.
RawPoly raw_h_dx(const RawPoly& p);
RawPoly raw_mult_hx(const RawPoly& p);

/// Re-expands a raw polynomial in the canonical t-monomial basis of
/// superdegree k; throws if a monomial falls outside the algebra.
std::vector<lubrex::Rational> raw_to_basis(const RawPoly& p, const lubrex::Basis& basis);

/// Composite Simpson on [0,1] with n panels (n even).
double simpson(const std::function<double(double)>& f, int n);

}  // namespace oracles
