#include "oracles.hpp"

#include <stdexcept>

namespace oracles {

std::vector<std::int64_t> pentagonal_partition_numbers(int n_max) {
  std::vector<std::int64_t> p(static_cast<std::size_t>(n_max) + 1, 0);
  p[0] = 1;
  for (int n = 1; n <= n_max; ++n) {
    std::int64_t acc = 0;
    for (int g = 1;; ++g) {
      const int pent1 = g * (3 * g - 1) / 2;
      const int pent2 = g * (3 * g + 1) / 2;
      if (pent1 > n && pent2 > n) break;
      const std::int64_t sign = (g % 2 == 1) ? 1 : -1;
      if (pent1 <= n) acc += sign * p[static_cast<std::size_t>(n - pent1)];
      if (pent2 <= n) acc += sign * p[static_cast<std::size_t>(n - pent2)];
    }
    p[static_cast<std::size_t>(n)] = acc;
  }
  return p;
}

RawPoly raw_from_tuple(std::span<const std::uint8_t> tuple) {
  RawMonomial m(tuple.size(), 0);
  lubrex::Rational coef(1);
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    m[j] = tuple[j];
    if (j >= 1) {
      lubrex::Rational fact(1);
      for (std::size_t f = 2; f <= j; ++f) fact *= static_cast<long>(f);
      for (int rep = 0; rep < tuple[j]; ++rep) coef /= fact;
    }
  }
  RawPoly p;
  p[m] = coef;
  return p;
}

RawPoly raw_h_dx(const RawPoly& p) {
  RawPoly out;
  for (const auto& [m, c] : p) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] == 0) continue;
      RawMonomial d = m;
      if (d.size() < j + 2) d.resize(j + 2, 0);
      d[j] -= 1;
      d[j + 1] += 1;
      d[0] += 1;  // the h of h d/dx
      out[d] += c * static_cast<long>(m[j]);
    }
  }
  return out;
}

RawPoly raw_mult_hx(const RawPoly& p) {
  RawPoly out;
  for (const auto& [m, c] : p) {
    RawMonomial d = m;
    if (d.size() < 2) d.resize(2, 0);
    d[1] += 1;
    out[d] += c;
  }
  return out;
}

std::vector<lubrex::Rational> raw_to_basis(const RawPoly& p, const lubrex::Basis& basis) {
  std::vector<lubrex::Rational> coeffs(static_cast<std::size_t>(basis.dim()), lubrex::Rational(0));
  for (const auto& [m, c] : p) {
    if (c == 0) continue;
    // The t-basis element with the same derivative exponents carries the
    // coefficient prod 1/j!^{e_j}; divide it out and look the tuple up.
    std::vector<std::uint8_t> tuple(static_cast<std::size_t>(basis.k()) + 1, 0);
    lubrex::Rational scale(1);
    int h_power = 0;
    for (std::size_t j = 1; j < m.size(); ++j) {
      if (static_cast<int>(j) > basis.k() && m[j] != 0) {
        throw std::runtime_error("raw monomial has higher derivative than the basis allows");
      }
      if (m[j] == 0) continue;
      tuple[j] = static_cast<std::uint8_t>(m[j]);
      lubrex::Rational fact(1);
      for (std::size_t f = 2; f <= j; ++f) fact *= static_cast<long>(f);
      for (int rep = 0; rep < m[j]; ++rep) scale *= fact;
      h_power += static_cast<int>(j - 1) * m[j];
    }
    if (h_power != m[0]) {
      throw std::runtime_error("raw monomial is not in the graded algebra");
    }
    tuple[0] = static_cast<std::uint8_t>(h_power);
    const std::int64_t col = basis.index_of(tuple);
    coeffs[static_cast<std::size_t>(col)] += c * scale;
  }
  return coeffs;
}

double simpson(const std::function<double(double)>& f, int n) {
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) {
    acc += f(static_cast<double>(i) / n) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return acc / (3.0 * n);
}

}  // namespace oracles
