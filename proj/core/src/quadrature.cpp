#include "lubrex/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace lubrex {

QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<double> cgl_nodes(int n_points) {
  const int N = n_points - 1;
  std::vector<double> eta(static_cast<std::size_t>(n_points));
  for (int j = 0; j <= N; ++j) {
    eta[static_cast<std::size_t>(j)] = (1.0 - std::cos(std::numbers::pi * j / N)) / 2.0;
  }
  return eta;
}

std::vector<double> clenshaw_curtis_weights(int n_points) {
  const int N = n_points - 1;
  std::vector<double> w(static_cast<std::size_t>(n_points));
  for (int j = 0; j <= N; ++j) {
    const double theta = std::numbers::pi * j / N;
    double s = 1.0;
    for (int m = 1; m <= N / 2; ++m) {
      const double b = (2 * m == N) ? 1.0 : 2.0;
      s -= b * std::cos(2.0 * m * theta) / (4.0 * m * m - 1.0);
    }
    const double c = (j == 0 || j == N) ? 1.0 : 2.0;
    w[static_cast<std::size_t>(j)] = 0.5 * c * s / N;  // the 0.5 maps [-1,1] to [0,1]
  }
  return w;
}

}  // namespace lubrex
