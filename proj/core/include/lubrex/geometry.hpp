#pragma once

#include <span>
#include <string>
#include <vector>

#include "lubrex/partition_basis.hpp"

namespace lubrex {

/// Gap profile h(x) on the periodic unit interval, normalized 0 < h <= 1.
/// Restricted to trigonometric polynomials (plus constants) so derivatives
/// of every order are analytic; tabulated shapes would contaminate the
/// high-order moments with differentiation noise.
struct ShapeSpec {
  enum class Kind { constant, sine_family, fourier };
  Kind kind = Kind::constant;
  double constant_c = 1.0;
  double sine_a = 0.0;  // h = (1+a)/2 + (1-a)/2 sin(2 pi x)
  double c0 = 0.0;
  std::vector<double> a_coef;  // a_j cos(2 pi j x), index j-1
  std::vector<double> b_coef;  // b_j sin(2 pi j x)

  bool is_constant() const { return kind == Kind::constant; }
  std::string to_string() const;
};

/// Grammar: `const:c=<v>` | `sine:a=<v>` |
/// `fourier:c0=<v>[;a<j>=<v>][;b<j>=<v>]...`. Positivity and the h <= 1
/// normalization are verified on 8192 samples at parse time.
ShapeSpec parse_shape(const std::string& spec);

/// h and its first max_order analytic derivatives at x (out has size
/// max_order+1).
void eval_h_derivs(const ShapeSpec& shape, double x, int max_order, std::span<double> out);

inline double eval_h(const ShapeSpec& shape, double x) {
  double v[1];
  eval_h_derivs(shape, x, 0, v);
  return v[0];
}

/// Geometry moments for a concrete shape: inverse moments I_m, gap minimum
/// h0, the derivative-product radii r_k, and the weighted first/second
/// moments of every basis monomial (E and E-tilde vectors).
struct GeometryMoments {
  double I1 = 0, I2 = 0, I3 = 0;
  double h0 = 0;
  int k_max = 0;  // vectors cover even orders 0..2*k_max
  int N = 0;      // quadrature resolution actually used
  std::vector<double> r;                  // r[k], may be +infinity
  std::vector<std::vector<double>> E2;    // E^{(2l)}_2, length d_{2l}
  std::vector<std::vector<double>> E3;    // E^{(2l)}_3
  std::vector<std::vector<double>> Et1;   // E-tilde^{(2l)}_1
  std::vector<std::vector<double>> Et3;   // E-tilde^{(2l)}_3
};

/// N-point periodic trapezoid quadrature (spectrally accurate for these
/// shapes); r_k and h0 by dense sampling over 8192 points. Throws
/// Error(QuadratureUnderResolved) if doubling N moves I3 by more than 1e-10
/// relative.
GeometryMoments moments(const ShapeSpec& shape, const BasisSet& bases, int k_max, int N);

/// Closed form r_0 = (pi sqrt(1-a))^{-1} for the sine family; for
/// a in (0, 2/3] every r_k equals this value. Throws
/// Error(OutOfStatedRange) outside (0, 2/3].
double sine_family_r0(double a);

/// Evaluates every basis monomial of superdegree k at x given the h
/// derivatives (hd[j] = d^j h / dx^j). out has size d_k.
void basis_values(const Basis& basis, std::span<const double> hd, std::span<double> out);

}  // namespace lubrex
