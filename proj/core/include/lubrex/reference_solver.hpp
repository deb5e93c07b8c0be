#pragma once

#include <Eigen/Dense>

#include "lubrex/error_bounds.hpp"
#include "lubrex/field_eval.hpp"
#include "lubrex/geometry.hpp"

namespace lubrex {

/// Desk-scale "exact" solver: Fourier collocation in x, Chebyshev-Gauss-
/// Lobatto collocation in eta = y/h(x), dense direct solve for the grid
/// values of psi plus the scalar flux Q.
struct SolverConfig {
  int Nx = 64;  // even number of x nodes
  int Ny = 24;  // CGL levels in eta
  double eps = 0.1;
  ShapeSpec shape;
  BoundaryData boundary;
  bool check_resolution = false;  // re-solve refined and compare Q
};

struct ReferenceSolution {
  EvalMesh mesh;
  double eps = 0;
  double Q = 0;
  // Node-major [ix * Ny + j] like FieldGrid.
  std::vector<double> psi, u, v, omega, p;
  double est_accuracy = 0;  // relative Q shift under refinement (when checked)
  // p(1,y) - p(0,y), i.e. the whole-period integral of p_x along the floor;
  // vanishes to solver tolerance because of the flux closure row.
  double pressure_periodicity_defect = 0;
};

/// Differentiation machinery on the mapped tensor grid, shared by the solve
/// and the error norms: d/dy = (1/h) d/deta and
/// d/dx|_y = d/dx|_eta - (eta h_x / h) d/deta.
class SpectralWorkspace {
 public:
  SpectralWorkspace(const ShapeSpec& shape, int Nx, int Ny);

  int Nx() const { return nx_; }
  int Ny() const { return ny_; }
  const EvalMesh& mesh() const { return mesh_; }
  const std::vector<double>& h() const { return h_; }
  const std::vector<double>& hx() const { return hx_; }
  const Eigen::MatrixXd& Dx() const { return dx_; }
  const Eigen::MatrixXd& De() const { return de_; }

  Eigen::VectorXd ddx(const Eigen::VectorXd& f) const;  // physical d/dx
  Eigen::VectorXd ddy(const Eigen::VectorXd& f) const;

  /// Integral over Omega: trapezoid in x, Clenshaw-Curtis in eta, Jacobian h.
  double integrate(const Eigen::VectorXd& f) const;

  /// Interpolates a grid function in eta at grid column ix (barycentric).
  double interp_eta(const std::vector<double>& f, int ix, double eta) const;

 private:
  int nx_, ny_;
  EvalMesh mesh_;
  std::vector<double> h_, hx_;
  std::vector<double> cc_weights_;
  Eigen::MatrixXd dx_, de_;
};

/// Throws Error(SingularSystem) if the collocation matrix is numerically
/// singular and Error(UnresolvedSolution) if the refinement check moves Q by
/// more than 1e-8 relative.
ReferenceSolution solve_stokes(const SolverConfig& config);

/// Weighted error norms of approx (truncated at `order2k`) against the
/// reference on the same grid. The pressure error is reduced to its
/// zero-mean representative before taking the L2 norm.
NormReport error_norms(const ReferenceSolution& ref, const FieldGrid& approx, int order2k,
                       const SpectralWorkspace& ws);

struct ConvergenceRow {
  double eps = 0;
  int order = 0;  // 2k
  NormReport norms;
  ErrorBudget budget;
  double ratio_uv = 0;  // budget.star / measured uv norm
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<int> orders;
  std::vector<double> slopes;        // fitted d log(uv)/d log(eps) per order
  std::vector<double> slope_targets; // 2k+2
};

ConvergenceStudy convergence_study(const ShapeSpec& shape, const BoundaryData& bc,
                                   const std::vector<int>& orders,
                                   const std::vector<double>& eps_list, int Nx, int Ny,
                                   const ConstantsTables& constants);

}  // namespace lubrex
