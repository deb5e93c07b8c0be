#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lubrex/error_bounds.hpp"
#include "lubrex/errors.hpp"
#include "lubrex/expansion_matrices.hpp"
#include "lubrex/field_eval.hpp"
#include "lubrex/geometry.hpp"
#include "lubrex/partition_basis.hpp"
#include "lubrex/reference_solver.hpp"
#include "lubrex/universal_constants.hpp"

namespace lubrex::cli {

namespace {

using nlohmann::json;

std::string sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "lubrex";
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

class OutFile {
 public:
  OutFile(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::ParseError, "cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

std::vector<double> parse_eps_range(const std::string& s) {
  double lo = 0, hi = 0;
  int count = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2 || lo <= 0 ||
      hi <= lo) {
    throw Error(ErrorCode::ParseError, "expected --eps-range <lo>:<hi>:<count> with count >= 2");
  }
  std::vector<double> eps(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    eps[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return eps;
}

int cmd_basis(int k, const std::string& out_path, const std::string& echo, std::ostream& out_s) {
  BasisSet bases(k);
  OutFile out(out_path, out_s);
  out.stream() << "# " << echo << "\n";
  const Basis& b = bases.at(k);
  for (std::int64_t c = 0; c < b.dim(); ++c) {
    auto t = b.tuple(c);
    for (std::size_t s = 0; s < t.size(); ++s) {
      out.stream() << (s ? "," : "") << static_cast<int>(t[s]);
    }
    out.stream() << "\n";
  }
  return kExitOk;
}

template <class T>
json matrix_to_json(const Matrix<T>& m) {
  json rows = json::array();
  for (std::int64_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::int64_t j = 0; j < m.cols(); ++j) {
      if constexpr (ScalarTraits<T>::exact) {
        row.push_back(to_fraction_string(m(i, j)));
      } else {
        row.push_back(m(i, j));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
int cmd_expand(int order, const std::string& out_path, const std::string& echo,
               std::ostream& out_s) {
  if (order % 2 != 0 || order < 0) {
    throw Error(ErrorCode::ParseError, "--order must be a nonnegative even integer");
  }
  const int k = order / 2;
  BasisSet bases(order);
  OperatorTable ops(bases, order);
  auto stack = build_stack<T>(ops, k);
  const auto& m = stack.back();
  json doc;
  doc["config"] = echo;
  doc["order"] = order;
  doc["dimension"] = bases.at(order).dim();
  doc["A0"] = matrix_to_json(m.A0);
  doc["A1"] = matrix_to_json(m.A1);
  doc["B"] = matrix_to_json(m.B);
  OutFile out(out_path, out_s);
  out.stream() << doc.dump(1) << "\n";
  return kExitOk;
}

void constants_csv(std::ostream& os, const ConstantsTables& t, const std::string& echo) {
  os << "# " << echo << "\n";
  os << "table,k,stage,c0,c1,c2\n";
  for (std::size_t k = 0; k < t.kappa.size(); ++k) {
    const auto& r = t.kappa[k];
    os << "kappa," << k << ",before," << sci3(r.k0_before) << ',' << sci3(r.k1_before) << ','
       << sci3(r.k2) << "\n";
    os << "kappa," << k << ",after," << sci3(r.k0_after) << ',' << sci3(r.k1_after) << ','
       << sci3(r.k2) << "\n";
  }
  auto k_table = [&](const char* name, const std::vector<KRow>& rows) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      os << name << ',' << k << ",before," << sci3(r.K0_before) << ',' << sci3(r.K1_before)
         << ',' << sci3(r.K2) << "\n";
      os << name << ',' << k << ",after," << sci3(r.K0_after) << ',' << sci3(r.K1_after) << ','
         << sci3(r.K2) << "\n";
    }
  };
  k_table("K", t.K);
  k_table("Ktilde", t.Ktilde);
  for (std::size_t k = 0; k < t.rho_theta.size(); ++k) {
    char rho[16];
    std::snprintf(rho, sizeof rho, "%.3f", t.rho_theta[k].rho);
    os << "rho_theta," << k << ",final," << rho << ',' << sci3(t.rho_theta[k].theta) << ",\n";
  }
}

json constants_json(const ConstantsTables& t, const std::string& echo) {
  json doc;
  doc["config"] = echo;
  for (std::size_t k = 0; k < t.kappa.size(); ++k) {
    const auto& r = t.kappa[k];
    doc["kappa"].push_back({{"k", k},
                            {"kappa0_before", r.k0_before},
                            {"kappa1_before", r.k1_before},
                            {"kappa2", r.k2},
                            {"kappa0_after", r.k0_after},
                            {"kappa1_after", r.k1_after}});
  }
  auto k_table = [&](const char* name, const std::vector<KRow>& rows) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      doc[name].push_back({{"k", k},
                           {"K0_before", r.K0_before},
                           {"K1_before", r.K1_before},
                           {"K2", r.K2},
                           {"K0_after", r.K0_after},
                           {"K1_after", r.K1_after}});
    }
  };
  k_table("K", t.K);
  k_table("Ktilde", t.Ktilde);
  for (std::size_t k = 0; k < t.rho_theta.size(); ++k) {
    doc["rho_theta"].push_back(
        {{"k", k}, {"rho", t.rho_theta[k].rho}, {"theta", t.rho_theta[k].theta}});
  }
  return doc;
}

int cmd_constants(int max_k, const std::string& format, bool exact, const std::string& out_path,
                  const std::string& echo, std::ostream& out_s) {
  ConstantsTables tables = exact ? compute_constants<Rational>(max_k)
                                 : compute_constants<double>(max_k);
  OutFile out(out_path, out_s);
  if (format == "csv") {
    constants_csv(out.stream(), tables, echo);
  } else {
    out.stream() << constants_json(tables, echo).dump(1) << "\n";
  }
  return kExitOk;
}

int cmd_moments(const std::string& shape_spec, int max_order, int quad_n,
                const std::string& out_path, const std::string& echo, std::ostream& out_s) {
  if (max_order % 2 != 0) throw Error(ErrorCode::ParseError, "--max-order must be even");
  const int k_max = max_order / 2;
  ShapeSpec shape = parse_shape(shape_spec);
  BasisSet bases(max_order);
  GeometryMoments mom = moments(shape, bases, k_max, quad_n);
  json doc;
  doc["config"] = echo;
  doc["I1"] = mom.I1;
  doc["I2"] = mom.I2;
  doc["I3"] = mom.I3;
  doc["h0"] = mom.h0;
  doc["N"] = mom.N;
  for (int k = 0; k <= k_max; ++k) {
    const double r = mom.r[static_cast<std::size_t>(k)];
    doc["r"].push_back(std::isinf(r) ? json("inf") : json(r));
    doc["E2"].push_back(mom.E2[static_cast<std::size_t>(k)]);
    doc["E3"].push_back(mom.E3[static_cast<std::size_t>(k)]);
    doc["Etilde1"].push_back(mom.Et1[static_cast<std::size_t>(k)]);
    doc["Etilde3"].push_back(mom.Et3[static_cast<std::size_t>(k)]);
  }
  OutFile out(out_path, out_s);
  out.stream() << doc.dump(1) << "\n";
  return kExitOk;
}

int cmd_bound(const std::string& shape_spec, int order, double eps, double V0, double V1,
              const std::string& out_path, const std::string& echo, std::ostream& out_s,
              std::ostream& err_s) {
  if (order % 2 != 0) throw Error(ErrorCode::ParseError, "--order must be even");
  const int k = order / 2;
  ShapeSpec shape = parse_shape(shape_spec);
  BasisSet bases(order);
  GeometryMoments mom = moments(shape, bases, k, 2048);
  ConstantsTables constants = compute_constants<Rational>(k);
  ErrorBudget b = star_bound(mom, constants, BoundaryData{V0, V1}, k, eps);
  if (!b.validity) {
    err_s << "warning: eps = " << eps << " exceeds r_0/3 = " << mom.r[0] / 3.0
          << "; a priori guarantee lapses (bounds still reported)\n";
  }
  json doc;
  doc["config"] = echo;
  doc["k"] = b.k;
  doc["eps"] = b.eps;
  doc["star"] = b.star;
  doc["bound_psi"] = b.bound_psi;
  doc["bound_Q"] = b.bound_Q;
  doc["bound_uv"] = b.bound_uv;
  doc["bound_omega"] = b.bound_omega;
  doc["bound_p"] = b.bound_p;
  doc["beta_lbb_inverse_bound"] = b.beta_lbb_inverse_bound;
  doc["validity"] = b.validity;
  doc["r_k"] = std::isinf(b.r_k) ? json("inf") : json(b.r_k);
  doc["I1"] = b.I1;
  doc["I3"] = b.I3;
  doc["rho_k"] = b.rho_k;
  doc["theta_k"] = b.theta_k;
  doc["h0"] = b.h0;
  doc["V0"] = b.V0;
  doc["V1"] = b.V1;
  OutFile out(out_path, out_s);
  out.stream() << doc.dump(1) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& shape_spec, int order, double eps, const std::string& grid_spec,
             const std::string& fields_csv, double V0, double V1, const std::string& out_path,
             const std::string& echo, std::ostream& out_s, std::ostream& err_s) {
  if (order % 2 != 0) throw Error(ErrorCode::ParseError, "--order must be even");
  int nx = 0, ny = 0;
  if (std::sscanf(grid_spec.c_str(), "%dx%d", &nx, &ny) != 2 || nx < 2 || ny < 2) {
    throw Error(ErrorCode::ParseError, "expected --grid <NX>x<NY>");
  }
  std::vector<std::string> fields;
  {
    std::stringstream ss(fields_csv);
    std::string f;
    while (std::getline(ss, f, ',')) {
      if (f != "psi" && f != "u" && f != "v" && f != "omega" && f != "p") {
        throw Error(ErrorCode::ParseError, "unknown field '" + f + "'");
      }
      fields.push_back(f);
    }
  }
  if (fields.empty()) throw Error(ErrorCode::ParseError, "--fields is empty");

  const int k = order / 2;
  ShapeSpec shape = parse_shape(shape_spec);
  BasisSet bases(order + 6);
  OperatorTable ops(bases, order + 5);
  auto stack_exact = build_stack<Rational>(ops, k);
  std::vector<OrderMatrices<double>> stack;
  for (const auto& s : stack_exact) {
    OrderMatrices<double> d;
    d.order = s.order;
    auto conv = [](const Matrix<Rational>& m) {
      Matrix<double> out(m.rows(), m.cols());
      for (std::int64_t r = 0; r < m.rows(); ++r)
        for (std::int64_t c = 0; c < m.cols(); ++c) out(r, c) = to_double(m(r, c));
      return out;
    };
    d.A0 = conv(s.A0);
    d.A1 = conv(s.A1);
    d.B = conv(s.B);
    stack.push_back(std::move(d));
  }
  GeometryMoments mom = moments(shape, bases, k, 2048);
  EvalContext ctx = make_context(shape, bases, ops, mom, stack, BoundaryData{V0, V1}, eps);
  if (!ctx.validity) {
    err_s << "warning: eps exceeds r_0/3; expansion evaluated outside the bound's hypothesis\n";
  }
  EvalMesh mesh;
  mesh.x.resize(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) mesh.x[static_cast<std::size_t>(i)] = static_cast<double>(i) / nx;
  mesh.eta.resize(static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    mesh.eta[static_cast<std::size_t>(j)] = static_cast<double>(j) / (ny - 1);
  }
  const bool want_p =
      std::find(fields.begin(), fields.end(), "p") != fields.end();
  FieldGrid grid = truncated_fields(ctx, order, mesh, want_p);

  OutFile out(out_path, out_s);
  auto& os = out.stream();
  os << "# " << echo << "\n";
  os << "x,y";
  for (const auto& f : fields) {
    for (int l = 0; l <= k; ++l) os << ',' << f << '_' << 2 * l;
    os << ',' << f << "_trunc";
  }
  os << "\n";
  auto field_arrays = [&](const std::string& f)
      -> std::pair<const std::vector<std::vector<double>>*, const std::vector<double>*> {
    if (f == "psi") return {&grid.psi, &grid.psi_trunc};
    if (f == "u") return {&grid.u, &grid.u_trunc};
    if (f == "v") return {&grid.v, &grid.v_trunc};
    if (f == "omega") return {&grid.omega, &grid.omega_trunc};
    return {&grid.p, &grid.p_trunc};
  };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const std::size_t node = static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
                               static_cast<std::size_t>(j);
      os << full(mesh.x[static_cast<std::size_t>(i)]) << ',' << full(grid.y[node]);
      for (const auto& f : fields) {
        auto [per_order, trunc] = field_arrays(f);
        for (int l = 0; l <= k; ++l) os << ',' << full((*per_order)[static_cast<std::size_t>(l)][node]);
        os << ',' << full((*trunc)[node]);
      }
      os << "\n";
    }
  }
  return kExitOk;
}

int cmd_validate(const std::string& shape_spec, const std::string& orders_csv,
                 const std::string& eps_range, int nx, int ny, double V0, double V1,
                 const std::string& out_path, const std::string& echo, std::ostream& out_s,
                 std::ostream& err_s) {
  std::vector<int> orders;
  {
    std::stringstream ss(orders_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const int o = std::stoi(item);
      if (o < 0 || o % 2 != 0) throw Error(ErrorCode::ParseError, "orders must be even and >= 0");
      orders.push_back(o);
    }
  }
  if (orders.empty()) throw Error(ErrorCode::ParseError, "--orders is empty");
  std::vector<double> eps_list = parse_eps_range(eps_range);
  ShapeSpec shape = parse_shape(shape_spec);
  int max_k = 0;
  for (int o : orders) max_k = std::max(max_k, o / 2);
  ConstantsTables constants = compute_constants<Rational>(max_k);
  BoundaryData bc{V0, V1};

  ConvergenceStudy study;
  try {
    study = convergence_study(shape, bc, orders, eps_list, nx, ny, constants);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BoundViolation) {
      err_s << "validation failure: " << e.what() << "\n";
      return kExitValidation;
    }
    throw;
  }

  OutFile out(out_path, out_s);
  auto& os = out.stream();
  os << "# " << echo << "\n";
  os << "eps,order,norm_psi,norm_uv,norm_omega,norm_p,q_err,bound_star,bound_p,ratio\n";
  for (const auto& row : study.rows) {
    os << full(row.eps) << ',' << row.order << ',' << full(row.norms.psi_2eps) << ','
       << full(row.norms.uv_1eps) << ',' << full(row.norms.omega_0) << ','
       << full(row.norms.p_0) << ',' << full(row.norms.q_err) << ','
       << full(row.budget.star) << ',' << full(row.budget.bound_p) << ','
       << full(row.ratio_uv) << "\n";
  }
  bool ok = true;
  const bool flat = shape.is_constant();
  for (std::size_t i = 0; i < study.orders.size(); ++i) {
    if (flat) {
      os << "# slope order " << study.orders[i] << ": n/a (constant shape, solver noise floor)\n";
      continue;
    }
    const double slope = study.slopes[i];
    const double target = study.slope_targets[i];
    const double band = (study.orders[i] <= 2) ? 0.15 : (study.orders[i] == 4 ? 0.25 : 0.35);
    const bool pass = std::abs(slope - target) <= band;
    ok = ok && pass;
    char line[160];
    std::snprintf(line, sizeof line, "# slope order %d: %.3f (target %.0f +/- %.2f) %s\n",
                  study.orders[i], slope, target, band, pass ? "ok" : "FAIL");
    os << line;
  }
  // Bound domination of every norm entry whenever eps <= r_0/3 holds.
  if (!flat) {
    for (const auto& row : study.rows) {
      if (!row.budget.validity) continue;
      try {
        compare_bound_to_error(row.budget, row.norms);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundViolation) throw;
        os << "# domination FAIL at eps=" << row.eps << " order=" << row.order << "\n";
        ok = false;
      }
    }
  }
  if (!ok) {
    err_s << "validation failure: convergence slopes or bound domination out of band\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"higher-order corrections to Reynolds' lubrication approximation"};
  // `--h <shape>` is part of the interface, so the help flag loses its short
  // form (subcommands inherit this).
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  const std::string echo = join_args(args);

  // basis
  auto* basis = app.add_subcommand("basis", "emit the canonical basis tuples for one superdegree");
  int basis_k = 0;
  std::string basis_out;
  basis->add_option("--k", basis_k, "superdegree")->required()->check(CLI::NonNegativeNumber);
  basis->add_option("--out", basis_out, "output path (default stdout)");

  // constants
  auto* constants = app.add_subcommand("constants", "universal constants tables");
  int const_k = 10;
  std::string const_format = "csv", const_out, const_prec = "exact";
  constants->add_option("--max-order", const_k, "largest k in the tables")->required();
  constants->add_option("--format", const_format)->check(CLI::IsMember({"csv", "json"}));
  constants->add_option("--precision", const_prec)->check(CLI::IsMember({"exact", "float"}));
  constants->add_option("--out", const_out);

  // expand
  auto* expand = app.add_subcommand("expand", "expansion matrices of one order as JSON");
  int expand_order = 0;
  std::string expand_out, expand_prec = "exact";
  expand->add_option("--order", expand_order, "expansion order 2k")->required();
  expand->add_option("--out", expand_out)->required();
  expand->add_option("--precision", expand_prec)->check(CLI::IsMember({"exact", "float"}));

  // moments
  auto* mom = app.add_subcommand("moments", "geometry moments as JSON");
  std::string mom_shape, mom_out;
  int mom_order = 0, mom_quad = 2048;
  mom->add_option("--h", mom_shape, "shape spec")->required();
  mom->add_option("--max-order", mom_order, "largest expansion order 2k")->required();
  mom->add_option("--quad-n", mom_quad, "trapezoid points");
  mom->add_option("--out", mom_out);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate truncated fields on a tensor grid");
  std::string eval_shape, eval_grid = "64x17", eval_fields = "psi,u,v,omega,p", eval_out;
  int eval_order = 0;
  double eval_eps = 0.1, eval_v0 = -0.5, eval_v1 = 1.0;
  eval->add_option("--h", eval_shape)->required();
  eval->add_option("--order", eval_order)->required();
  eval->add_option("--eps", eval_eps)->required();
  eval->add_option("--grid", eval_grid);
  eval->add_option("--fields", eval_fields);
  eval->add_option("--V0", eval_v0);
  eval->add_option("--V1", eval_v1);
  eval->add_option("--out", eval_out);

  // bound
  auto* bound = app.add_subcommand("bound", "a priori error budget as JSON");
  std::string bound_shape, bound_out;
  int bound_order = 0;
  double bound_eps = 0.1, bound_v0 = -0.5, bound_v1 = 1.0;
  bound->add_option("--h", bound_shape)->required();
  bound->add_option("--order", bound_order)->required();
  bound->add_option("--eps", bound_eps)->required();
  bound->add_option("--V0", bound_v0);
  bound->add_option("--V1", bound_v1);
  bound->add_option("--out", bound_out);

  // validate
  auto* validate = app.add_subcommand("validate", "convergence study against the spectral solver");
  std::string val_shape, val_orders = "0,2,4", val_range = "0.06:0.2:8", val_out;
  int val_nx = 64, val_ny = 24;
  double val_v0 = -0.5, val_v1 = 1.0;
  validate->add_option("--h", val_shape)->required();
  validate->add_option("--orders", val_orders);
  validate->add_option("--eps-range", val_range);
  validate->add_option("--nx", val_nx);
  validate->add_option("--ny", val_ny);
  validate->add_option("--V0", val_v0);
  validate->add_option("--V1", val_v1);
  validate->add_option("--out", val_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (basis->parsed()) return cmd_basis(basis_k, basis_out, echo, out);
    if (constants->parsed()) {
      return cmd_constants(const_k, const_format, const_prec == "exact", const_out, echo, out);
    }
    if (expand->parsed()) {
      return expand_prec == "exact" ? cmd_expand<Rational>(expand_order, expand_out, echo, out)
                                    : cmd_expand<double>(expand_order, expand_out, echo, out);
    }
    if (mom->parsed()) return cmd_moments(mom_shape, mom_order, mom_quad, mom_out, echo, out);
    if (eval->parsed()) {
      return cmd_eval(eval_shape, eval_order, eval_eps, eval_grid, eval_fields, eval_v0, eval_v1,
                      eval_out, echo, out, err);
    }
    if (bound->parsed()) {
      return cmd_bound(bound_shape, bound_order, bound_eps, bound_v0, bound_v1, bound_out, echo,
                       out, err);
    }
    if (validate->parsed()) {
      return cmd_validate(val_shape, val_orders, val_range, val_nx, val_ny, val_v0, val_v1,
                          val_out, echo, out, err);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace lubrex::cli
