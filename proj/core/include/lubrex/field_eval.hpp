#pragma once

#include <optional>
#include <vector>

#include "lubrex/expansion_matrices.hpp"
#include "lubrex/geometry.hpp"

namespace lubrex {

struct BoundaryData {
  double V0 = -0.5;
  double V1 = 1.0;
};

/// Flux expansion terms: Q[l] multiplies eps^{2l}; a and b are the row-3
/// moment contractions feeding the convolution recursion for Q.
struct FluxExpansion {
  std::vector<double> Q, a, b;
};

FluxExpansion flux_terms(const GeometryMoments& mom,
                         const std::vector<OrderMatrices<double>>& stack,
                         const BoundaryData& bc, int k_max);

/// One closed-form building block y^n h^{p-n} g(x) with g a coefficient
/// vector over the superdegree-sdeg basis. A whole field is a sum of terms;
/// differentiation acts term by term, so the y-dependence stays exact and
/// only x-quadrature is ever numeric.
struct FieldTerm {
  int ypow = 0;  // n
  int hpow = 0;  // p
  int sdeg = 0;
  std::vector<double> coeffs;
};

struct FieldRep {
  int order = 0;
  std::vector<FieldTerm> terms;
};

/// The two halves of psi^{(2k)} before flux weighting: the alpha part (rows
/// of A = V0 A0 + V1 A1 against h Phi_{2k}) and one beta part per lower
/// order (rows of B^{(2k-2l)} against Phi_{2k-2l}).
struct PsiRepParts {
  FieldRep alpha;                // carries p = 1
  std::vector<FieldRep> betas;   // index l, carries p = 0
};

PsiRepParts build_field_rep(const std::vector<OrderMatrices<double>>& stack,
                            const BoundaryData& bc, int order2k);

/// Assembled psi^{(2k)} = alpha + sum_l Q^{(2l)} beta_l.
FieldRep build_psi_rep(const std::vector<OrderMatrices<double>>& stack, const FluxExpansion& flux,
                       const BoundaryData& bc, int order2k);

enum class Axis { x, y };

/// d/dy: (n, p, g) -> (n-1, p-1, n g). d/dx: (n, p, g) -> (n, p-1, L_{n-p} g)
/// with L_c = h d/dx - c h_x acting on the coefficient algebra.
FieldRep differentiate(const FieldRep& rep, Axis axis, const OperatorTable& ops);

/// Antiderivative in y vanishing at y = 0: (n, p, g) -> (n+1, p+1, g/(n+1)).
FieldRep integrate_y(const FieldRep& rep);

FieldRep rep_sum(const FieldRep& a, const FieldRep& b, double wa = 1.0, double wb = 1.0);

/// Caches h-derivatives and all basis values at one x; FieldRep evaluation
/// is then a dot product per term.
class ShapeSampler {
 public:
  ShapeSampler(const ShapeSpec& shape, const BasisSet& bases, int max_sdeg);
  void move_to(double x);
  double x() const { return x_; }
  double h() const { return hd_[0]; }
  double h_deriv(int j) const { return hd_[static_cast<std::size_t>(j)]; }
  std::span<const double> basis(int sdeg) const { return phi_[static_cast<std::size_t>(sdeg)]; }

 private:
  const ShapeSpec* shape_;
  const BasisSet* bases_;
  int max_sdeg_;
  double x_ = 0;
  bool primed_ = false;
  std::vector<double> hd_;
  std::vector<std::vector<double>> phi_;
};

double eval_rep(const FieldRep& rep, ShapeSampler& s, double x, double y);

/// Value at y = 0: only the n = 0 terms contribute.
double eval_rep_floor(const FieldRep& rep, ShapeSampler& s, double x);

/// Everything needed to evaluate the truncated expansion for one
/// configuration. `validity` is false when eps exceeds r_0/3, i.e. the
/// bound hypothesis fails (evaluation is still permitted).
struct EvalContext {
  const ShapeSpec* shape = nullptr;
  const BasisSet* bases = nullptr;
  const OperatorTable* ops = nullptr;
  const GeometryMoments* moments = nullptr;
  const std::vector<OrderMatrices<double>>* stack = nullptr;
  FluxExpansion flux;
  BoundaryData boundary;
  double eps = 0;
  bool validity = true;
};

EvalContext make_context(const ShapeSpec& shape, const BasisSet& bases, const OperatorTable& ops,
                         const GeometryMoments& mom,
                         const std::vector<OrderMatrices<double>>& stack,
                         const BoundaryData& bc, double eps);

/// Tensor evaluation mesh: x nodes paired with eta = y/h levels in [0, 1].
struct EvalMesh {
  std::vector<double> x;
  std::vector<double> eta;
};

/// Sampled per-order fields and their eps-weighted truncated sums, all on
/// the tensor mesh (row-major, index ix * eta.size() + j).
struct FieldGrid {
  EvalMesh mesh;
  int order = 0;  // 2k
  double eps = 0;
  std::vector<double> y;  // physical height per node
  std::vector<std::vector<double>> psi, u, v, omega, p;  // index l = order/2
  std::vector<double> psi_trunc, u_trunc, v_trunc, omega_trunc, p_trunc;
};

FieldGrid truncated_fields(const EvalContext& ctx, int order2k, const EvalMesh& mesh,
                           bool with_pressure = true);

/// Per-order pressure by the line-integral construction: 20-point Gauss per
/// x-interval along the floor, then the analytic y-antiderivative.
void add_pressure_fields(const EvalContext& ctx, FieldGrid& grid);

}  // namespace lubrex
