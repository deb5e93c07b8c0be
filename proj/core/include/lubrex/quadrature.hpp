#pragma once

#include <vector>

namespace lubrex {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the recurrence).
QuadratureRule gauss_legendre(int n);

/// Chebyshev-Gauss-Lobatto nodes on [0, 1], increasing: (1 - cos(j pi/N))/2.
std::vector<double> cgl_nodes(int n_points);

/// Clenshaw-Curtis weights matching cgl_nodes (integrate over [0, 1]).
std::vector<double> clenshaw_curtis_weights(int n_points);

}  // namespace lubrex
