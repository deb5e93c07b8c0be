#include "lubrex/field_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lubrex/parallel.hpp"
#include "lubrex/quadrature.hpp"

namespace lubrex {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Coalesces terms sharing (ypow, hpow, sdeg).
void normalize(FieldRep& rep) {
  std::map<std::tuple<int, int, int>, std::vector<double>> merged;
  for (auto& t : rep.terms) {
    auto key = std::make_tuple(t.ypow, t.hpow, t.sdeg);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, std::move(t.coeffs));
    } else {
      for (std::size_t j = 0; j < it->second.size(); ++j) it->second[j] += t.coeffs[j];
    }
  }
  rep.terms.clear();
  for (auto& [key, coeffs] : merged) {
    const auto [n, p, m] = key;
    bool nonzero = false;
    for (double c : coeffs) {
      if (c != 0.0) {
        nonzero = true;
        break;
      }
    }
    if (nonzero) rep.terms.push_back({n, p, m, std::move(coeffs)});
  }
}

}  // namespace

FluxExpansion flux_terms(const GeometryMoments& mom,
                         const std::vector<OrderMatrices<double>>& stack,
                         const BoundaryData& bc, int k_max) {
  if (static_cast<int>(stack.size()) <= k_max || mom.k_max < k_max) {
    throw Error(ErrorCode::MissingPredecessor, "flux_terms needs matrices/moments through k_max");
  }
  FluxExpansion f;
  f.a.resize(static_cast<std::size_t>(k_max) + 1);
  f.b.resize(static_cast<std::size_t>(k_max) + 1);
  f.Q.resize(static_cast<std::size_t>(k_max) + 1);
  for (int l = 0; l <= k_max; ++l) {
    const auto& m = stack[static_cast<std::size_t>(l)];
    double a = 0, b = 0;
    for (std::int64_t j = 0; j < m.A0.cols(); ++j) {
      a += (bc.V0 * m.A0(3, j) + bc.V1 * m.A1(3, j)) * mom.E2[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      b += m.B(3, j) * mom.E3[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
    }
    f.a[static_cast<std::size_t>(l)] = a / 2.0;
    f.b[static_cast<std::size_t>(l)] = b / 2.0;
  }
  const double i2_over_i3 = mom.I2 / mom.I3;
  for (int l = 0; l <= k_max; ++l) {
    double q = i2_over_i3 * f.a[static_cast<std::size_t>(l)];
    for (int j = 0; j < l; ++j) {
      q += f.Q[static_cast<std::size_t>(j)] * f.b[static_cast<std::size_t>(l - j)];
    }
    f.Q[static_cast<std::size_t>(l)] = q;
  }
  return f;
}

PsiRepParts build_field_rep(const std::vector<OrderMatrices<double>>& stack,
                            const BoundaryData& bc, int order2k) {
  const int k = order2k / 2;
  if (static_cast<int>(stack.size()) <= k) {
    throw Error(ErrorCode::MissingPredecessor, "matrix stack too short for requested order");
  }
  PsiRepParts parts;
  const auto& m = stack[static_cast<std::size_t>(k)];
  parts.alpha.order = order2k;
  for (std::int64_t n = 0; n < m.A0.rows(); ++n) {
    FieldTerm t;
    t.ypow = static_cast<int>(n);
    t.hpow = 1;
    t.sdeg = order2k;
    t.coeffs.resize(static_cast<std::size_t>(m.A0.cols()));
    bool nonzero = false;
    for (std::int64_t j = 0; j < m.A0.cols(); ++j) {
      t.coeffs[static_cast<std::size_t>(j)] = bc.V0 * m.A0(n, j) + bc.V1 * m.A1(n, j);
      nonzero |= t.coeffs[static_cast<std::size_t>(j)] != 0.0;
    }
    if (nonzero) parts.alpha.terms.push_back(std::move(t));
  }
  for (int l = 0; l <= k; ++l) {
    const auto& mb = stack[static_cast<std::size_t>(k - l)];
    FieldRep beta;
    beta.order = 2 * (k - l);
    for (std::int64_t n = 0; n < mb.B.rows(); ++n) {
      FieldTerm t;
      t.ypow = static_cast<int>(n);
      t.hpow = 0;
      t.sdeg = 2 * (k - l);
      t.coeffs.assign(mb.B.row(n).begin(), mb.B.row(n).end());
      bool nonzero = false;
      for (double c : t.coeffs) nonzero |= c != 0.0;
      if (nonzero) beta.terms.push_back(std::move(t));
    }
    parts.betas.push_back(std::move(beta));
  }
  return parts;
}

FieldRep build_psi_rep(const std::vector<OrderMatrices<double>>& stack, const FluxExpansion& flux,
                       const BoundaryData& bc, int order2k) {
  const int k = order2k / 2;
  PsiRepParts parts = build_field_rep(stack, bc, order2k);
  FieldRep rep = std::move(parts.alpha);
  for (int l = 0; l <= k; ++l) {
    const double q = flux.Q[static_cast<std::size_t>(l)];
    for (auto& t : parts.betas[static_cast<std::size_t>(l)].terms) {
      FieldTerm scaled = t;
      for (auto& c : scaled.coeffs) c *= q;
      rep.terms.push_back(std::move(scaled));
    }
  }
  normalize(rep);
  return rep;
}

FieldRep differentiate(const FieldRep& rep, Axis axis, const OperatorTable& ops) {
  FieldRep out;
  out.order = rep.order;
  for (const auto& t : rep.terms) {
    if (axis == Axis::y) {
      if (t.ypow == 0) continue;
      FieldTerm d;
      d.ypow = t.ypow - 1;
      d.hpow = t.hpow - 1;
      d.sdeg = t.sdeg;
      d.coeffs.resize(t.coeffs.size());
      for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
        d.coeffs[j] = static_cast<double>(t.ypow) * t.coeffs[j];
      }
      out.terms.push_back(std::move(d));
    } else {
      if (t.sdeg + 1 > ops.k_top()) {
        throw Error(ErrorCode::MissingPredecessor, "operator table too small to differentiate");
      }
      FieldTerm d;
      d.ypow = t.ypow;
      d.hpow = t.hpow - 1;
      d.sdeg = t.sdeg + 1;
      d.coeffs.assign(static_cast<std::size_t>(ops.dim(t.sdeg + 1)), 0.0);
      ops.apply_shifted<double>(t.sdeg, t.ypow - t.hpow, t.coeffs, d.coeffs);
      out.terms.push_back(std::move(d));
    }
  }
  normalize(out);
  return out;
}

FieldRep integrate_y(const FieldRep& rep) {
  FieldRep out;
  out.order = rep.order;
  for (const auto& t : rep.terms) {
    FieldTerm d;
    d.ypow = t.ypow + 1;
    d.hpow = t.hpow + 1;
    d.sdeg = t.sdeg;
    d.coeffs.resize(t.coeffs.size());
    for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
      d.coeffs[j] = t.coeffs[j] / static_cast<double>(t.ypow + 1);
    }
    out.terms.push_back(std::move(d));
  }
  return out;
}

FieldRep rep_sum(const FieldRep& a, const FieldRep& b, double wa, double wb) {
  FieldRep out;
  out.order = std::max(a.order, b.order);
  for (const auto& t : a.terms) {
    FieldTerm s = t;
    for (auto& c : s.coeffs) c *= wa;
    out.terms.push_back(std::move(s));
  }
  for (const auto& t : b.terms) {
    FieldTerm s = t;
    for (auto& c : s.coeffs) c *= wb;
    out.terms.push_back(std::move(s));
  }
  normalize(out);
  return out;
}

ShapeSampler::ShapeSampler(const ShapeSpec& shape, const BasisSet& bases, int max_sdeg)
    : shape_(&shape), bases_(&bases), max_sdeg_(max_sdeg) {
  if (bases.k_max() < max_sdeg) {
    throw Error(ErrorCode::MissingPredecessor, "basis set smaller than sampler superdegree");
  }
  hd_.resize(static_cast<std::size_t>(max_sdeg_) + 1);
  phi_.resize(static_cast<std::size_t>(max_sdeg_) + 1);
  for (int m = 0; m <= max_sdeg_; ++m) {
    phi_[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(bases_->at(m).dim()));
  }
}

void ShapeSampler::move_to(double x) {
  if (primed_ && x == x_) return;
  x_ = x;
  primed_ = true;
  eval_h_derivs(*shape_, x, max_sdeg_, hd_);
  for (int m = 0; m <= max_sdeg_; ++m) {
    basis_values(bases_->at(m), hd_, phi_[static_cast<std::size_t>(m)]);
  }
}

double eval_rep(const FieldRep& rep, ShapeSampler& s, double x, double y) {
  s.move_to(x);
  const double h = s.h();
  const double eta = y / h;
  double total = 0;
  for (const auto& t : rep.terms) {
    const double g = dot(t.coeffs, s.basis(t.sdeg));
    total += std::pow(eta, t.ypow) * std::pow(h, t.hpow) * g;
  }
  return total;
}

double eval_rep_floor(const FieldRep& rep, ShapeSampler& s, double x) {
  s.move_to(x);
  double total = 0;
  for (const auto& t : rep.terms) {
    if (t.ypow != 0) continue;
    total += std::pow(s.h(), t.hpow) * dot(t.coeffs, s.basis(t.sdeg));
  }
  return total;
}

EvalContext make_context(const ShapeSpec& shape, const BasisSet& bases, const OperatorTable& ops,
                         const GeometryMoments& mom,
                         const std::vector<OrderMatrices<double>>& stack,
                         const BoundaryData& bc, double eps) {
  EvalContext ctx;
  ctx.shape = &shape;
  ctx.bases = &bases;
  ctx.ops = &ops;
  ctx.moments = &mom;
  ctx.stack = &stack;
  ctx.boundary = bc;
  ctx.eps = eps;
  ctx.flux = flux_terms(mom, stack, bc, static_cast<int>(stack.size()) - 1);
  ctx.validity = !(eps > mom.r[0] / 3.0);
  return ctx;
}

namespace {

struct OrderReps {
  FieldRep psi, u, v, omega;
};

// psi, u = psi_y, v = -psi_x per order; omega^{(2k)} = -psi^{(2k-2)}_xx
// - psi^{(2k)}_yy.
std::vector<OrderReps> build_order_reps(const EvalContext& ctx, int order2k) {
  const int k = order2k / 2;
  std::vector<OrderReps> reps(static_cast<std::size_t>(k) + 1);
  std::vector<FieldRep> psi_xx(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) {
    auto& r = reps[static_cast<std::size_t>(l)];
    r.psi = build_psi_rep(*ctx.stack, ctx.flux, ctx.boundary, 2 * l);
    r.u = differentiate(r.psi, Axis::y, *ctx.ops);
    r.v = differentiate(r.psi, Axis::x, *ctx.ops);
    for (auto& t : r.v.terms) {
      for (auto& c : t.coeffs) c = -c;
    }
    const FieldRep psi_yy = differentiate(r.u, Axis::y, *ctx.ops);
    if (l == 0) {
      r.omega = psi_yy;
      for (auto& t : r.omega.terms) {
        for (auto& c : t.coeffs) c = -c;
      }
    } else {
      r.omega = rep_sum(psi_yy, psi_xx[static_cast<std::size_t>(l) - 1], -1.0, -1.0);
    }
    if (l < k) {
      const FieldRep psi_x = differentiate(r.psi, Axis::x, *ctx.ops);
      psi_xx[static_cast<std::size_t>(l)] = differentiate(psi_x, Axis::x, *ctx.ops);
    }
  }
  return reps;
}

}  // namespace

FieldGrid truncated_fields(const EvalContext& ctx, int order2k, const EvalMesh& mesh,
                           bool with_pressure) {
  for (double eta : mesh.eta) {
    if (eta < -1e-14 || eta > 1.0 + 1e-14) {
      throw Error(ErrorCode::PointOutsideDomain, "eta level outside [0, 1]");
    }
  }
  const int k = order2k / 2;
  FieldGrid grid;
  grid.mesh = mesh;
  grid.order = order2k;
  grid.eps = ctx.eps;
  const std::size_t nx = mesh.x.size();
  const std::size_t ny = mesh.eta.size();
  const std::size_t nn = nx * ny;
  grid.y.resize(nn);
  auto alloc = [&](std::vector<std::vector<double>>& f) {
    f.assign(static_cast<std::size_t>(k) + 1, std::vector<double>(nn, 0.0));
  };
  alloc(grid.psi);
  alloc(grid.u);
  alloc(grid.v);
  alloc(grid.omega);
  alloc(grid.p);
  grid.psi_trunc.assign(nn, 0.0);
  grid.u_trunc.assign(nn, 0.0);
  grid.v_trunc.assign(nn, 0.0);
  grid.omega_trunc.assign(nn, 0.0);
  grid.p_trunc.assign(nn, 0.0);

  const auto reps = build_order_reps(ctx, order2k);
  int max_sdeg = 0;
  for (const auto& r : reps) {
    for (const auto* rep : {&r.psi, &r.u, &r.v, &r.omega}) {
      for (const auto& t : rep->terms) max_sdeg = std::max(max_sdeg, t.sdeg);
    }
  }

  parallel_for(0, static_cast<std::int64_t>(nx), [&](std::int64_t ix) {
    ShapeSampler s(*ctx.shape, *ctx.bases, max_sdeg);
    const double x = mesh.x[static_cast<std::size_t>(ix)];
    s.move_to(x);
    const double h = s.h();
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t node = static_cast<std::size_t>(ix) * ny + j;
      const double y = mesh.eta[j] * h;
      grid.y[node] = y;
      for (int l = 0; l <= k; ++l) {
        const auto& r = reps[static_cast<std::size_t>(l)];
        grid.psi[static_cast<std::size_t>(l)][node] = eval_rep(r.psi, s, x, y);
        grid.u[static_cast<std::size_t>(l)][node] = eval_rep(r.u, s, x, y);
        grid.v[static_cast<std::size_t>(l)][node] = eval_rep(r.v, s, x, y);
        grid.omega[static_cast<std::size_t>(l)][node] = eval_rep(r.omega, s, x, y);
      }
    }
  });

  if (with_pressure) add_pressure_fields(ctx, grid);

  for (std::size_t node = 0; node < nn; ++node) {
    double w = 1.0;
    for (int l = 0; l <= k; ++l) {
      grid.psi_trunc[node] += w * grid.psi[static_cast<std::size_t>(l)][node];
      grid.u_trunc[node] += w * grid.u[static_cast<std::size_t>(l)][node];
      grid.v_trunc[node] += w * grid.v[static_cast<std::size_t>(l)][node];
      grid.omega_trunc[node] += w * grid.omega[static_cast<std::size_t>(l)][node];
      grid.p_trunc[node] += w * grid.p[static_cast<std::size_t>(l)][node];
      w *= ctx.eps * ctx.eps;
    }
  }
  return grid;
}

void add_pressure_fields(const EvalContext& ctx, FieldGrid& grid) {
  const int k = grid.order / 2;
  const std::size_t nx = grid.mesh.x.size();
  const std::size_t ny = grid.mesh.eta.size();
  const QuadratureRule gauss = gauss_legendre(20);

  // Reps reused across orders.
  std::vector<FieldRep> psi(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) psi[static_cast<std::size_t>(l)] = build_psi_rep(*ctx.stack, ctx.flux, ctx.boundary, 2 * l);

  int max_sdeg = 0;
  std::vector<FieldRep> px_floor(static_cast<std::size_t>(k) + 1);
  std::vector<FieldRep> py_int(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) {
    const auto& p_l = psi[static_cast<std::size_t>(l)];
    FieldRep psi_y = differentiate(p_l, Axis::y, *ctx.ops);
    FieldRep psi_yy = differentiate(psi_y, Axis::y, *ctx.ops);
    FieldRep psi_yyy = differentiate(psi_yy, Axis::y, *ctx.ops);
    // p_x^{(2l)} = psi^{(2l)}_yyy + psi^{(2l-2)}_xxy
    if (l == 0) {
      px_floor[0] = psi_yyy;
    } else {
      const auto& prev = psi[static_cast<std::size_t>(l) - 1];
      FieldRep prev_x = differentiate(prev, Axis::x, *ctx.ops);
      FieldRep prev_xx = differentiate(prev_x, Axis::x, *ctx.ops);
      FieldRep prev_xxy = differentiate(prev_xx, Axis::y, *ctx.ops);
      px_floor[static_cast<std::size_t>(l)] = rep_sum(psi_yyy, prev_xxy);
    }
    // p_y^{(2l)} = -psi^{(2l-4)}_xxx - psi^{(2l-2)}_xyy
    FieldRep py;
    if (l >= 1) {
      const auto& prev = psi[static_cast<std::size_t>(l) - 1];
      FieldRep prev_x = differentiate(prev, Axis::x, *ctx.ops);
      FieldRep prev_xy = differentiate(prev_x, Axis::y, *ctx.ops);
      FieldRep prev_xyy = differentiate(prev_xy, Axis::y, *ctx.ops);
      py = prev_xyy;
      for (auto& t : py.terms) {
        for (auto& c : t.coeffs) c = -c;
      }
    }
    if (l >= 2) {
      const auto& prev2 = psi[static_cast<std::size_t>(l) - 2];
      FieldRep a = differentiate(prev2, Axis::x, *ctx.ops);
      FieldRep b = differentiate(a, Axis::x, *ctx.ops);
      FieldRep c3 = differentiate(b, Axis::x, *ctx.ops);
      py = rep_sum(py, c3, 1.0, -1.0);
    }
    py_int[static_cast<std::size_t>(l)] = integrate_y(py);
    for (const auto* rep : {&px_floor[static_cast<std::size_t>(l)], &py_int[static_cast<std::size_t>(l)]}) {
      for (const auto& t : rep->terms) max_sdeg = std::max(max_sdeg, t.sdeg);
    }
  }

  ShapeSampler s(*ctx.shape, *ctx.bases, max_sdeg);
  // Cumulative floor integral per order at the mesh x nodes; the gauge is
  // p(0,0) = 0, so a mesh that starts past x = 0 needs the leading segment.
  std::vector<std::vector<double>> floor_p(static_cast<std::size_t>(k) + 1,
                                           std::vector<double>(nx, 0.0));
  if (grid.mesh.x[0] > 0.0) {
    const double x0 = 0.0, x1 = grid.mesh.x[0];
    const double mid = (x0 + x1) / 2.0, half = (x1 - x0) / 2.0;
    for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
      const double xq = mid + half * gauss.nodes[q];
      for (int l = 0; l <= k; ++l) {
        floor_p[static_cast<std::size_t>(l)][0] +=
            half * gauss.weights[q] * eval_rep_floor(px_floor[static_cast<std::size_t>(l)], s, xq);
      }
    }
  }
  for (std::size_t i = 1; i < nx; ++i) {
    const double x0 = grid.mesh.x[i - 1];
    const double x1 = grid.mesh.x[i];
    const double mid = (x0 + x1) / 2.0;
    const double half = (x1 - x0) / 2.0;
    std::vector<double> seg(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
      const double xq = mid + half * gauss.nodes[q];
      for (int l = 0; l <= k; ++l) {
        seg[static_cast<std::size_t>(l)] +=
            half * gauss.weights[q] * eval_rep_floor(px_floor[static_cast<std::size_t>(l)], s, xq);
      }
    }
    for (int l = 0; l <= k; ++l) {
      floor_p[static_cast<std::size_t>(l)][i] =
          floor_p[static_cast<std::size_t>(l)][i - 1] + seg[static_cast<std::size_t>(l)];
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = grid.mesh.x[i];
    s.move_to(x);
    const double h = s.h();
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t node = i * ny + j;
      const double y = grid.mesh.eta[j] * h;
      for (int l = 0; l <= k; ++l) {
        grid.p[static_cast<std::size_t>(l)][node] =
            floor_p[static_cast<std::size_t>(l)][i] +
            eval_rep(py_int[static_cast<std::size_t>(l)], s, x, y);
      }
    }
  }
}

}  // namespace lubrex
