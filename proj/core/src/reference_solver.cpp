#include "lubrex/reference_solver.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "lubrex/quadrature.hpp"

namespace lubrex {

namespace {

constexpr double kPi = std::numbers::pi;

// Fourier differentiation matrix on x_i = i/N (even N), period 1.
Eigen::MatrixXd fourier_diff(int N) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const int d = i - j;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;  // (-1)^{i-j}
      D(i, j) = kPi * sign / std::tan(kPi * d / N);
    }
  }
  return D;
}

// Chebyshev differentiation matrix on the CGL nodes of [0,1], increasing
// order, with the negative-sum trick on the diagonal.
Eigen::MatrixXd cheb_diff(const std::vector<double>& eta) {
  const int n = static_cast<int>(eta.size());
  Eigen::MatrixXd D(n, n);
  std::vector<double> c(static_cast<std::size_t>(n), 1.0);
  c[0] = 2.0;
  c[static_cast<std::size_t>(n) - 1] = 2.0;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = (c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(j)]) * sign /
                (eta[static_cast<std::size_t>(i)] - eta[static_cast<std::size_t>(j)]);
      row_sum += D(i, j);
    }
    D(i, i) = -row_sum;
  }
  return D;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const ShapeSpec& shape, int Nx, int Ny)
    : nx_(Nx), ny_(Ny) {
  mesh_.x.resize(static_cast<std::size_t>(Nx));
  for (int i = 0; i < Nx; ++i) mesh_.x[static_cast<std::size_t>(i)] = static_cast<double>(i) / Nx;
  mesh_.eta = cgl_nodes(Ny);
  cc_weights_ = clenshaw_curtis_weights(Ny);
  h_.resize(static_cast<std::size_t>(Nx));
  hx_.resize(static_cast<std::size_t>(Nx));
  std::vector<double> hd(2);
  for (int i = 0; i < Nx; ++i) {
    eval_h_derivs(shape, mesh_.x[static_cast<std::size_t>(i)], 1, hd);
    h_[static_cast<std::size_t>(i)] = hd[0];
    hx_[static_cast<std::size_t>(i)] = hd[1];
  }
  dx_ = fourier_diff(Nx);
  de_ = cheb_diff(mesh_.eta);
}

Eigen::VectorXd SpectralWorkspace::ddx(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out(nx_ * ny_);
  // d/dx at fixed eta, then the metric term.
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      double s = 0;
      for (int m = 0; m < nx_; ++m) s += dx_(i, m) * f(m * ny_ + j);
      out(i * ny_ + j) = s;
    }
  }
  for (int i = 0; i < nx_; ++i) {
    const double c = hx_[static_cast<std::size_t>(i)] / h_[static_cast<std::size_t>(i)];
    for (int j = 0; j < ny_; ++j) {
      double s = 0;
      for (int m = 0; m < ny_; ++m) s += de_(j, m) * f(i * ny_ + m);
      out(i * ny_ + j) -= mesh_.eta[static_cast<std::size_t>(j)] * c * s;
    }
  }
  return out;
}

Eigen::VectorXd SpectralWorkspace::ddy(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out(nx_ * ny_);
  for (int i = 0; i < nx_; ++i) {
    const double inv_h = 1.0 / h_[static_cast<std::size_t>(i)];
    for (int j = 0; j < ny_; ++j) {
      double s = 0;
      for (int m = 0; m < ny_; ++m) s += de_(j, m) * f(i * ny_ + m);
      out(i * ny_ + j) = inv_h * s;
    }
  }
  return out;
}

double SpectralWorkspace::integrate(const Eigen::VectorXd& f) const {
  double total = 0;
  for (int i = 0; i < nx_; ++i) {
    double col = 0;
    for (int j = 0; j < ny_; ++j) col += cc_weights_[static_cast<std::size_t>(j)] * f(i * ny_ + j);
    total += col * h_[static_cast<std::size_t>(i)];
  }
  return total / nx_;
}

double SpectralWorkspace::interp_eta(const std::vector<double>& f, int ix, double eta) const {
  // Barycentric weights for CGL nodes: (-1)^j, halved at the ends.
  double num = 0, den = 0;
  for (int j = 0; j < ny_; ++j) {
    const double ej = mesh_.eta[static_cast<std::size_t>(j)];
    if (std::abs(eta - ej) < 1e-14) return f[static_cast<std::size_t>(ix * ny_ + j)];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == ny_ - 1) w *= 0.5;
    const double t = w / (eta - ej);
    num += t * f[static_cast<std::size_t>(ix * ny_ + j)];
    den += t;
  }
  return num / den;
}

namespace {

struct AssembledSolve {
  Eigen::VectorXd psi;  // length Nx*Ny
  double Q;
};

AssembledSolve solve_grid(const SolverConfig& config, const SpectralWorkspace& ws) {
  const int Nx = config.Nx, Ny = config.Ny;
  const int N = Nx * Ny;
  const double eps = config.eps;
  const auto& eta = ws.mesh().eta;
  const auto& h = ws.h();
  const auto& hx = ws.hx();

  // Mx = d/dx at constant y as a full grid operator.
  Eigen::MatrixXd Mx = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < Nx; ++i) {
    for (int m = 0; m < Nx; ++m) {
      const double d = ws.Dx()(i, m);
      if (d == 0.0) continue;
      for (int j = 0; j < Ny; ++j) Mx(i * Ny + j, m * Ny + j) = d;
    }
  }
  for (int i = 0; i < Nx; ++i) {
    const double c = hx[static_cast<std::size_t>(i)] / h[static_cast<std::size_t>(i)];
    for (int j = 0; j < Ny; ++j) {
      for (int m = 0; m < Ny; ++m) {
        Mx(i * Ny + j, i * Ny + m) -= eta[static_cast<std::size_t>(j)] * c * ws.De()(j, m);
      }
    }
  }

  // Laplacian_eps = eps^2 Mx^2 + h^{-2} De^2.
  Eigen::MatrixXd Lap = (eps * eps) * (Mx * Mx).eval();
  Eigen::MatrixXd De2 = ws.De() * ws.De();
  for (int i = 0; i < Nx; ++i) {
    const double w = 1.0 / (h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)]);
    for (int j = 0; j < Ny; ++j) {
      for (int m = 0; m < Ny; ++m) Lap(i * Ny + j, i * Ny + m) += w * De2(j, m);
    }
  }
  Eigen::MatrixXd Bih = Lap * Lap;

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N + 1, N + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N + 1);
  S.topLeftCorner(N, N) = Bih;

  Eigen::MatrixXd De3 = De2 * ws.De();
  for (int i = 0; i < Nx; ++i) {
    const double g1 = config.boundary.V1 /
                      std::sqrt(1.0 + eps * eps * hx[static_cast<std::size_t>(i)] *
                                          hx[static_cast<std::size_t>(i)]);
    // psi = 0 on the floor.
    int r = i * Ny + 0;
    S.row(r).setZero();
    S(r, i * Ny + 0) = 1.0;
    b(r) = 0.0;
    // psi_eta = h V0 on the floor (row slot j = 1).
    r = i * Ny + 1;
    S.row(r).setZero();
    for (int m = 0; m < Ny; ++m) S(r, i * Ny + m) = ws.De()(0, m);
    b(r) = h[static_cast<std::size_t>(i)] * config.boundary.V0;
    // psi_eta = h g1 on the lid (row slot j = Ny-2).
    r = i * Ny + (Ny - 2);
    S.row(r).setZero();
    for (int m = 0; m < Ny; ++m) S(r, i * Ny + m) = ws.De()(Ny - 1, m);
    b(r) = h[static_cast<std::size_t>(i)] * g1;
    // psi = Q on the lid.
    r = i * Ny + (Ny - 1);
    S.row(r).setZero();
    S(r, i * Ny + (Ny - 1)) = 1.0;
    S(r, N) = -1.0;
    b(r) = 0.0;
  }
  // Closure: trapezoid over x of psi_yyy(x, 0) = h^{-3} psi_etaetaeta.
  for (int i = 0; i < Nx; ++i) {
    const double w = 1.0 / (static_cast<double>(Nx) *
                            std::pow(h[static_cast<std::size_t>(i)], 3));
    for (int m = 0; m < Ny; ++m) S(N, i * Ny + m) += w * De3(0, m);
  }

  // Row equilibration: the collocation rows of the squared operator dwarf
  // the unit boundary rows, which otherwise ruins the pivoting.
  Eigen::VectorXd row_scale(N + 1);
  for (int r = 0; r <= N; ++r) {
    const double m = S.row(r).cwiseAbs().maxCoeff();
    if (!(m > 0)) {
      throw Error(ErrorCode::SingularSystem, "collocation matrix has an empty row");
    }
    row_scale(r) = 1.0 / m;
    S.row(r) *= row_scale(r);
    b(r) *= row_scale(r);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
  const auto diag = lu.matrixLU().diagonal();
  const double dmax = diag.cwiseAbs().maxCoeff();
  const double dmin = diag.cwiseAbs().minCoeff();
  if (!(dmin > 0) || dmin / dmax < 1e-15) {
    throw Error(ErrorCode::SingularSystem, "collocation matrix is numerically singular");
  }
  Eigen::VectorXd sol = lu.solve(b);
  for (int it = 0; it < 2; ++it) {
    Eigen::VectorXd resid = b - S * sol;
    sol += lu.solve(resid);
  }
  if (!sol.allFinite()) {
    throw Error(ErrorCode::SingularSystem, "collocation solve produced non-finite values");
  }
  return {sol.head(N), sol(N)};
}

// Periodic antiderivative with F(x_0) = 0 via the trigonometric interpolant;
// the mean of f is dropped (the closure row makes it solver-noise small).
std::vector<double> periodic_antiderivative(const std::vector<double>& f) {
  const int N = static_cast<int>(f.size());
  std::vector<std::complex<double>> c(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    std::complex<double> acc(0, 0);
    for (int i = 0; i < N; ++i) {
      const double ang = -2.0 * kPi * k * i / N;
      acc += f[static_cast<std::size_t>(i)] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    c[static_cast<std::size_t>(k)] = acc / static_cast<double>(N);
  }
  std::vector<double> F(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < N; ++i) {
    std::complex<double> acc(0, 0);
    for (int k = 1; k < N; ++k) {
      const int kk = (k <= N / 2) ? k : k - N;  // signed wavenumber
      if (kk == -N / 2) continue;               // Nyquist has no antiderivative partner
      const std::complex<double> ik(0, 2.0 * kPi * kk);
      const double ang = 2.0 * kPi * k * i / N;
      const std::complex<double> e(std::cos(ang), std::sin(ang));
      acc += c[static_cast<std::size_t>(k)] / ik * e;
    }
    F[static_cast<std::size_t>(i)] = acc.real();
  }
  const double F0 = F[0];
  for (auto& v : F) v -= F0;
  return F;
}

}  // namespace

ReferenceSolution solve_stokes(const SolverConfig& config) {
  if (config.Nx < 16 || config.Nx % 2 != 0 || config.Ny < 12) {
    throw Error(ErrorCode::UnresolvedSolution, "solver needs even Nx >= 16 and Ny >= 12");
  }
  SpectralWorkspace ws(config.shape, config.Nx, config.Ny);
  AssembledSolve main = solve_grid(config, ws);

  ReferenceSolution out;
  out.mesh = ws.mesh();
  out.eps = config.eps;
  out.Q = main.Q;

  const int N = config.Nx * config.Ny;
  const double eps = config.eps;
  Eigen::VectorXd psi = main.psi;
  Eigen::VectorXd psi_x = ws.ddx(psi);
  Eigen::VectorXd psi_y = ws.ddy(psi);
  Eigen::VectorXd psi_xx = ws.ddx(psi_x);
  Eigen::VectorXd psi_yy = ws.ddy(psi_y);
  Eigen::VectorXd omega = -(eps * eps * psi_xx + psi_yy);

  out.psi.assign(psi.data(), psi.data() + N);
  out.u.assign(psi_y.data(), psi_y.data() + N);
  Eigen::VectorXd v = -psi_x;
  out.v.assign(v.data(), v.data() + N);
  out.omega.assign(omega.data(), omega.data() + N);

  // Pressure by the line integral: p_x(x,0) = eps^2 psi_xxy + psi_yyy along
  // the floor, then the y-part integrated spectrally in eta per column.
  Eigen::VectorXd psi_xxy = ws.ddy(psi_xx);
  Eigen::VectorXd psi_yyy = ws.ddy(psi_yy);
  std::vector<double> floor_px(static_cast<std::size_t>(config.Nx));
  for (int i = 0; i < config.Nx; ++i) {
    floor_px[static_cast<std::size_t>(i)] =
        eps * eps * psi_xxy(i * config.Ny + 0) + psi_yyy(i * config.Ny + 0);
  }
  std::vector<double> floor_p = periodic_antiderivative(floor_px);
  {
    double mean = 0;
    for (double v : floor_px) mean += v;
    out.pressure_periodicity_defect = mean / config.Nx;
  }

  Eigen::VectorXd psi_xyy = ws.ddy(ws.ddy(psi_x));
  Eigen::VectorXd psi_xxx = ws.ddx(psi_xx);
  Eigen::VectorXd p_y = -(eps * eps * psi_xyy + eps * eps * eps * eps * psi_xxx);

  // Spectral antiderivative in eta: solve De g = f with g(0) = 0.
  Eigen::MatrixXd De0 = ws.De();
  De0.row(0).setZero();
  De0(0, 0) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_eta(De0);
  out.p.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < config.Nx; ++i) {
    Eigen::VectorXd col(config.Ny);
    for (int j = 0; j < config.Ny; ++j) col(j) = p_y(i * config.Ny + j);
    // integral over physical y: dy = h d eta
    col *= ws.h()[static_cast<std::size_t>(i)];
    col(0) = 0.0;
    Eigen::VectorXd g = lu_eta.solve(col);
    for (int j = 0; j < config.Ny; ++j) {
      out.p[static_cast<std::size_t>(i * config.Ny + j)] =
          floor_p[static_cast<std::size_t>(i)] + g(j);
    }
  }

  if (config.check_resolution) {
    SolverConfig fine = config;
    fine.check_resolution = false;
    fine.Nx = config.Nx + config.Nx / 2;
    if (fine.Nx % 2 != 0) ++fine.Nx;
    fine.Ny = config.Ny + 8;
    SpectralWorkspace ws_fine(fine.shape, fine.Nx, fine.Ny);
    AssembledSolve ref = solve_grid(fine, ws_fine);
    out.est_accuracy = std::abs(out.Q - ref.Q) / std::max(1e-300, std::abs(ref.Q));
    if (out.est_accuracy > 1e-8) {
      throw Error(ErrorCode::UnresolvedSolution,
                  "flux moved by " + std::to_string(out.est_accuracy) +
                      " under refinement; increase Nx/Ny");
    }
  }
  return out;
}

namespace {

std::vector<double> truncate(const std::vector<std::vector<double>>& per_order, double eps,
                             int k) {
  std::vector<double> out(per_order[0].size(), 0.0);
  double w = 1.0;
  for (int l = 0; l <= k; ++l) {
    const auto& f = per_order[static_cast<std::size_t>(l)];
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += w * f[n];
    w *= eps * eps;
  }
  return out;
}

}  // namespace

NormReport error_norms(const ReferenceSolution& ref, const FieldGrid& approx, int order2k,
                       const SpectralWorkspace& ws) {
  const int k = order2k / 2;
  if (ref.mesh.x.size() != approx.mesh.x.size() || ref.mesh.eta.size() != approx.mesh.eta.size()) {
    throw Error(ErrorCode::GridMismatch, "reference and approximation grids differ in size");
  }
  for (std::size_t i = 0; i < ref.mesh.x.size(); ++i) {
    if (std::abs(ref.mesh.x[i] - approx.mesh.x[i]) > 1e-12) {
      throw Error(ErrorCode::GridMismatch, "x nodes differ");
    }
  }
  for (std::size_t j = 0; j < ref.mesh.eta.size(); ++j) {
    if (std::abs(ref.mesh.eta[j] - approx.mesh.eta[j]) > 1e-12) {
      throw Error(ErrorCode::GridMismatch, "eta nodes differ");
    }
  }
  if (order2k > approx.order) {
    throw Error(ErrorCode::MissingPredecessor, "approximation grid lacks the requested order");
  }
  const int N = static_cast<int>(ref.psi.size());
  const double eps = ref.eps;

  auto to_vec = [&](const std::vector<double>& a, const std::vector<double>& b) {
    Eigen::VectorXd e(N);
    for (int n = 0; n < N; ++n) e(n) = a[static_cast<std::size_t>(n)] - b[static_cast<std::size_t>(n)];
    return e;
  };

  const std::vector<double> psi_a = truncate(approx.psi, eps, k);
  const std::vector<double> u_a = truncate(approx.u, eps, k);
  const std::vector<double> v_a = truncate(approx.v, eps, k);
  const std::vector<double> w_a = truncate(approx.omega, eps, k);
  const std::vector<double> p_a = truncate(approx.p, eps, k);

  Eigen::VectorXd e_psi = to_vec(ref.psi, psi_a);
  Eigen::VectorXd e_u = to_vec(ref.u, u_a);
  Eigen::VectorXd e_v = to_vec(ref.v, v_a);
  Eigen::VectorXd e_w = to_vec(ref.omega, w_a);
  Eigen::VectorXd e_p = to_vec(ref.p, p_a);

  NormReport r;
  // || psi ||_{2,eps}
  {
    Eigen::VectorXd px = ws.ddx(e_psi), py = ws.ddy(e_psi);
    Eigen::VectorXd pxx = ws.ddx(px), pxy = ws.ddy(px), pyy = ws.ddy(py);
    const double n0 = ws.integrate(e_psi.cwiseProduct(e_psi));
    const double n1 = ws.integrate(py.cwiseProduct(py)) +
                      eps * eps * ws.integrate(px.cwiseProduct(px));
    const double n2 = ws.integrate(pyy.cwiseProduct(pyy)) +
                      2 * eps * eps * ws.integrate(pxy.cwiseProduct(pxy)) +
                      std::pow(eps, 4) * ws.integrate(pxx.cwiseProduct(pxx));
    r.psi_2eps = std::sqrt(n0 + n1 + n2);
  }
  // sqrt(||u||_{1,eps}^2 + ||eps v||_{1,eps}^2)
  {
    Eigen::VectorXd ux = ws.ddx(e_u), uy = ws.ddy(e_u);
    Eigen::VectorXd vx = ws.ddx(e_v), vy = ws.ddy(e_v);
    const double nu = ws.integrate(e_u.cwiseProduct(e_u)) + ws.integrate(uy.cwiseProduct(uy)) +
                      eps * eps * ws.integrate(ux.cwiseProduct(ux));
    const double nv = ws.integrate(e_v.cwiseProduct(e_v)) + ws.integrate(vy.cwiseProduct(vy)) +
                      eps * eps * ws.integrate(vx.cwiseProduct(vx));
    r.uv_1eps = std::sqrt(nu + eps * eps * nv);
  }
  r.omega_0 = std::sqrt(ws.integrate(e_w.cwiseProduct(e_w)));
  {
    const double area = ws.integrate(Eigen::VectorXd::Ones(N));
    const double mean = ws.integrate(e_p) / area;
    Eigen::VectorXd centered = e_p.array() - mean;
    r.p_0 = std::sqrt(ws.integrate(centered.cwiseProduct(centered)));
  }
  // Q of the truncated expansion equals psi_trunc on the lid by construction.
  const int Ny = static_cast<int>(ref.mesh.eta.size());
  r.q_err = std::abs(ref.Q - psi_a[static_cast<std::size_t>(Ny - 1)]);
  return r;
}

ConvergenceStudy convergence_study(const ShapeSpec& shape, const BoundaryData& bc,
                                   const std::vector<int>& orders,
                                   const std::vector<double>& eps_list, int Nx, int Ny,
                                   const ConstantsTables& constants) {
  int max_order = 0;
  for (int o : orders) max_order = std::max(max_order, o);
  const int k_max = max_order / 2;

  // Shared expansion machinery (exact matrices, demoted to double).
  BasisSet bases(2 * k_max + 6);
  OperatorTable ops(bases, 2 * k_max + 5);
  auto stack_exact = build_stack<Rational>(ops, k_max);
  std::vector<OrderMatrices<double>> stack(stack_exact.size());
  for (std::size_t i = 0; i < stack_exact.size(); ++i) {
    const auto& s = stack_exact[i];
    auto& d = stack[i];
    d.order = s.order;
    auto conv = [](const Matrix<Rational>& m) {
      Matrix<double> out(m.rows(), m.cols());
      for (std::int64_t r = 0; r < m.rows(); ++r) {
        for (std::int64_t c = 0; c < m.cols(); ++c) out(r, c) = to_double(m(r, c));
      }
      return out;
    };
    d.A0 = conv(s.A0);
    d.A1 = conv(s.A1);
    d.B = conv(s.B);
  }
  GeometryMoments mom = moments(shape, bases, k_max, 2048);

  ConvergenceStudy study;
  study.orders = orders;
  SpectralWorkspace ws(shape, Nx, Ny);
  for (double eps : eps_list) {
    SolverConfig cfg;
    cfg.Nx = Nx;
    cfg.Ny = Ny;
    cfg.eps = eps;
    cfg.shape = shape;
    cfg.boundary = bc;
    ReferenceSolution ref = solve_stokes(cfg);
    EvalContext ctx = make_context(shape, bases, ops, mom, stack, bc, eps);
    FieldGrid grid = truncated_fields(ctx, max_order, ref.mesh);
    for (int o : orders) {
      ConvergenceRow row;
      row.eps = eps;
      row.order = o;
      row.norms = error_norms(ref, grid, o, ws);
      row.budget = star_bound(mom, constants, bc, o / 2, eps);
      row.ratio_uv = (row.norms.uv_1eps > 0) ? row.budget.star / row.norms.uv_1eps : 0.0;
      study.rows.push_back(row);
    }
  }
  // Least-squares slope of log(uv) against log(eps) per order.
  for (int o : orders) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : study.rows) {
      if (row.order != o || row.norms.uv_1eps <= 0) continue;
      const double lx = std::log(row.eps), ly = std::log(row.norms.uv_1eps);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    const double denom = n * sxx - sx * sx;
    study.slopes.push_back((denom != 0) ? (n * sxy - sx * sy) / denom : 0.0);
    study.slope_targets.push_back(o + 2.0);
  }
  return study;
}

}  // namespace lubrex
