#include "lubrex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "lubrex/errors.hpp"

namespace lubrex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDenseSamples = 8192;

double parse_value(const std::string& s, std::size_t eq, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s.substr(eq + 1), &used);
    if (eq + 1 + used != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad value for '" + field + "' in shape spec");
  }
}

void check_normalization(const ShapeSpec& shape) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (int i = 0; i < kDenseSamples; ++i) {
    const double h = eval_h(shape, static_cast<double>(i) / kDenseSamples);
    mn = std::min(mn, h);
    mx = std::max(mx, h);
  }
  if (!(mn > 0.0)) {
    throw Error(ErrorCode::NonPositiveShape, "shape must satisfy h(x) > 0 on [0,1]");
  }
  if (mx > 1.0 + 1e-12) {
    throw Error(ErrorCode::ExceedsUnitHeight, "shape must satisfy h(x) <= 1 on [0,1]");
  }
}

}  // namespace

std::string ShapeSpec::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::constant:
      std::snprintf(buf, sizeof buf, "const:c=%.17g", constant_c);
      return buf;
    case Kind::sine_family:
      std::snprintf(buf, sizeof buf, "sine:a=%.17g", sine_a);
      return buf;
    case Kind::fourier: {
      std::string s = "fourier:c0=";
      std::snprintf(buf, sizeof buf, "%.17g", c0);
      s += buf;
      for (std::size_t j = 0; j < a_coef.size(); ++j) {
        if (a_coef[j] == 0.0) continue;
        std::snprintf(buf, sizeof buf, ";a%zu=%.17g", j + 1, a_coef[j]);
        s += buf;
      }
      for (std::size_t j = 0; j < b_coef.size(); ++j) {
        if (b_coef[j] == 0.0) continue;
        std::snprintf(buf, sizeof buf, ";b%zu=%.17g", j + 1, b_coef[j]);
        s += buf;
      }
      return s;
    }
  }
  return "";
}

ShapeSpec parse_shape(const std::string& spec) {
  ShapeSpec shape;
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::ParseError, "shape spec needs '<kind>:<params>'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "const") {
    if (rest.rfind("c=", 0) != 0) throw Error(ErrorCode::ParseError, "expected const:c=<v>");
    shape.kind = ShapeSpec::Kind::constant;
    shape.constant_c = parse_value(rest, 1, "c");
  } else if (kind == "sine") {
    if (rest.rfind("a=", 0) != 0) throw Error(ErrorCode::ParseError, "expected sine:a=<v>");
    shape.kind = ShapeSpec::Kind::sine_family;
    shape.sine_a = parse_value(rest, 1, "a");
    shape.c0 = (1.0 + shape.sine_a) / 2.0;
    shape.b_coef = {(1.0 - shape.sine_a) / 2.0};
  } else if (kind == "fourier") {
    shape.kind = ShapeSpec::Kind::fourier;
    bool have_c0 = false;
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto sep = rest.find(';', pos);
      if (sep == std::string::npos) sep = rest.size();
      const std::string item = rest.substr(pos, sep - pos);
      pos = sep + 1;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected <name>=<value>");
      const std::string name = item.substr(0, eq);
      if (name == "c0") {
        shape.c0 = parse_value(item, eq, name);
        have_c0 = true;
      } else if (name.size() >= 2 && (name[0] == 'a' || name[0] == 'b')) {
        int j = 0;
        try {
          j = std::stoi(name.substr(1));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError, "bad coefficient name '" + name + "'");
        }
        if (j < 1) throw Error(ErrorCode::ParseError, "coefficient index must be >= 1");
        auto& coef = (name[0] == 'a') ? shape.a_coef : shape.b_coef;
        if (static_cast<int>(coef.size()) < j) coef.resize(static_cast<std::size_t>(j), 0.0);
        coef[static_cast<std::size_t>(j) - 1] = parse_value(item, eq, name);
      } else {
        throw Error(ErrorCode::ParseError, "unknown shape field '" + name + "'");
      }
    }
    if (!have_c0) throw Error(ErrorCode::ParseError, "fourier shape needs c0");
  } else {
    throw Error(ErrorCode::ParseError, "unknown shape kind '" + kind + "'");
  }
  check_normalization(shape);
  return shape;
}

void eval_h_derivs(const ShapeSpec& shape, double x, int max_order, std::span<double> out) {
  for (int d = 0; d <= max_order; ++d) out[static_cast<std::size_t>(d)] = 0.0;
  if (shape.kind == ShapeSpec::Kind::constant) {
    out[0] = shape.constant_c;
    return;
  }
  out[0] = shape.c0;
  const std::size_t n_modes = std::max(shape.a_coef.size(), shape.b_coef.size());
  for (std::size_t m = 0; m < n_modes; ++m) {
    const double w = kTwoPi * static_cast<double>(m + 1);
    const double a = (m < shape.a_coef.size()) ? shape.a_coef[m] : 0.0;
    const double b = (m < shape.b_coef.size()) ? shape.b_coef[m] : 0.0;
    double c = std::cos(w * x);
    double s = std::sin(w * x);
    double amp = 1.0;
    // d/dx rotates (cos, sin) -> (-sin, cos) and scales by w.
    for (int d = 0; d <= max_order; ++d) {
      out[static_cast<std::size_t>(d)] += amp * (a * c + b * s);
      amp *= w;
      const double c_new = -s;
      s = c;
      c = c_new;
    }
  }
}

void basis_values(const Basis& basis, std::span<const double> hd, std::span<double> out) {
  const int k = basis.k();
  // t_j = h^{j-1} d^j h / j!
  std::vector<double> t(static_cast<std::size_t>(k) + 1, 0.0);
  double hpow = 1.0;
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) {
    fact *= j;
    t[static_cast<std::size_t>(j)] = hpow * hd[static_cast<std::size_t>(j)] / fact;
    hpow *= hd[0];
  }
  for (std::int64_t c = 0; c < basis.dim(); ++c) {
    auto tup = basis.tuple(c);
    double v = 1.0;
    for (int j = 1; j <= k; ++j) {
      const int e = tup[static_cast<std::size_t>(j)];
      for (int rep = 0; rep < e; ++rep) v *= t[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(c)] = v;
  }
}

namespace {

struct RawMoments {
  double I1, I2, I3;
  std::vector<std::vector<double>> E2, E3, Et1, Et3;
};

RawMoments integrate(const ShapeSpec& shape, const BasisSet& bases, int k_max, int N) {
  RawMoments rm;
  rm.I1 = rm.I2 = rm.I3 = 0.0;
  rm.E2.resize(static_cast<std::size_t>(k_max) + 1);
  rm.E3.resize(static_cast<std::size_t>(k_max) + 1);
  rm.Et1.resize(static_cast<std::size_t>(k_max) + 1);
  rm.Et3.resize(static_cast<std::size_t>(k_max) + 1);
  for (int l = 0; l <= k_max; ++l) {
    const auto d = bases.at(2 * l).dim();
    rm.E2[l].assign(static_cast<std::size_t>(d), 0.0);
    rm.E3[l].assign(static_cast<std::size_t>(d), 0.0);
    rm.Et1[l].assign(static_cast<std::size_t>(d), 0.0);
    rm.Et3[l].assign(static_cast<std::size_t>(d), 0.0);
  }
  std::vector<double> hd(static_cast<std::size_t>(2 * k_max) + 1);
  std::vector<double> phi;
  for (int i = 0; i < N; ++i) {
    const double x = static_cast<double>(i) / N;
    eval_h_derivs(shape, x, 2 * k_max, hd);
    const double inv_h = 1.0 / hd[0];
    const double w1 = inv_h, w2 = inv_h * inv_h, w3 = w2 * inv_h;
    rm.I1 += w1;
    rm.I2 += w2;
    rm.I3 += w3;
    for (int l = 0; l <= k_max; ++l) {
      const Basis& basis = bases.at(2 * l);
      phi.resize(static_cast<std::size_t>(basis.dim()));
      basis_values(basis, hd, phi);
      for (std::size_t j = 0; j < phi.size(); ++j) {
        rm.E2[l][j] += phi[j] * w2;
        rm.E3[l][j] += phi[j] * w3;
        rm.Et1[l][j] += phi[j] * phi[j] * w1;
        rm.Et3[l][j] += phi[j] * phi[j] * w3;
      }
    }
  }
  const double dx = 1.0 / N;
  rm.I1 *= dx;
  rm.I2 *= dx;
  rm.I3 *= dx;
  for (int l = 0; l <= k_max; ++l) {
    for (std::size_t j = 0; j < rm.E2[l].size(); ++j) {
      rm.E2[l][j] *= dx / rm.I2;
      rm.E3[l][j] *= dx / rm.I3;
      rm.Et1[l][j] *= dx / rm.I1;
      rm.Et3[l][j] *= dx / rm.I3;
    }
  }
  return rm;
}

}  // namespace

GeometryMoments moments(const ShapeSpec& shape, const BasisSet& bases, int k_max, int N) {
  if (N < 64 || N % 2 != 0) {
    throw Error(ErrorCode::QuadratureUnderResolved, "moments requires even N >= 64");
  }
  if (bases.k_max() < 2 * k_max) {
    throw Error(ErrorCode::MissingPredecessor, "basis set too small for requested k_max");
  }
  RawMoments rm = integrate(shape, bases, k_max, N);
  {
    RawMoments check = integrate(shape, bases, 0, 2 * N);
    const double rel = std::abs(check.I3 - rm.I3) / std::abs(check.I3);
    if (rel > 1e-10) {
      throw Error(ErrorCode::QuadratureUnderResolved,
                  "I3 moved by " + std::to_string(rel) + " under N doubling; increase N");
    }
  }

  GeometryMoments gm;
  gm.I1 = rm.I1;
  gm.I2 = rm.I2;
  gm.I3 = rm.I3;
  gm.k_max = k_max;
  gm.N = N;
  gm.E2 = std::move(rm.E2);
  gm.E3 = std::move(rm.E3);
  gm.Et1 = std::move(rm.Et1);
  gm.Et3 = std::move(rm.Et3);

  // h0 and the normalized derivative products t_l over a dense sample; the
  // sampled sup is a lower bound on the true sup, so the reported r_k can be
  // slightly too large (exponentially small effect for band-limited shapes).
  gm.r.assign(static_cast<std::size_t>(k_max) + 1, std::numeric_limits<double>::infinity());
  gm.h0 = std::numeric_limits<double>::infinity();
  if (shape.is_constant()) {
    gm.h0 = shape.constant_c;
    return gm;
  }
  const int L = 2 * k_max + 2;
  std::vector<double> hd(static_cast<std::size_t>(L) + 1);
  std::vector<double> sup_t(static_cast<std::size_t>(L) + 1, 0.0);
  for (int i = 0; i < kDenseSamples; ++i) {
    const double x = static_cast<double>(i) / kDenseSamples;
    eval_h_derivs(shape, x, L, hd);
    gm.h0 = std::min(gm.h0, hd[0]);
    double hpow = 1.0;
    double fact = 1.0;
    for (int l = 1; l <= L; ++l) {
      fact *= l;
      sup_t[l] = std::max(sup_t[l], std::abs(hpow * hd[static_cast<std::size_t>(l)] / fact));
      hpow *= hd[0];
    }
  }
  for (int k = 0; k <= k_max; ++k) {
    double mx = 0.0;
    for (int l = 1; l <= 2 * k + 2; ++l) {
      mx = std::max(mx, std::pow(sup_t[static_cast<std::size_t>(l)], 1.0 / l));
    }
    gm.r[static_cast<std::size_t>(k)] = (mx > 0.0) ? 1.0 / mx
                                                   : std::numeric_limits<double>::infinity();
  }
  return gm;
}

double sine_family_r0(double a) {
  if (!(a > 0.0) || a > 2.0 / 3.0) {
    throw Error(ErrorCode::OutOfStatedRange,
                "closed form r_0 holds for a in (0, 2/3]; use sampled moments instead");
  }
  return 1.0 / (std::numbers::pi * std::sqrt(1.0 - a));
}

}  // namespace lubrex
