#include <benchmark/benchmark.h>

#include "lubrex/expansion_matrices.hpp"
#include "lubrex/field_eval.hpp"
#include "lubrex/partition_basis.hpp"
#include "lubrex/reference_solver.hpp"
#include "lubrex/universal_constants.hpp"

using namespace lubrex;

static void BM_PartitionCount50(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_count(50));
  }
}
BENCHMARK(BM_PartitionCount50);

static void BM_GenerateBases(benchmark::State& state) {
  const int k_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    BasisSet bases(k_max);
    benchmark::DoNotOptimize(bases.at(k_max).dim());
  }
}
BENCHMARK(BM_GenerateBases)->Arg(20)->Arg(30)->Arg(40);

static void BM_MatrixStackShadow(benchmark::State& state) {
  const int k_max = static_cast<int>(state.range(0));
  BasisSet bases(2 * k_max);
  OperatorTable ops(bases, 2 * k_max);
  for (auto _ : state) {
    auto stack = build_stack<double>(ops, k_max);
    benchmark::DoNotOptimize(stack.back().B(3, 0));
  }
}
BENCHMARK(BM_MatrixStackShadow)->Arg(5)->Arg(10);

static void BM_MatrixStackExact(benchmark::State& state) {
  const int k_max = static_cast<int>(state.range(0));
  BasisSet bases(2 * k_max);
  OperatorTable ops(bases, 2 * k_max);
  for (auto _ : state) {
    auto stack = build_stack<Rational>(ops, k_max);
    benchmark::DoNotOptimize(to_double(stack.back().B(3, 0)));
  }
}
BENCHMARK(BM_MatrixStackExact)->Arg(5)->Arg(8);

static void BM_ConstantsShadow(benchmark::State& state) {
  const int k_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto tables = compute_constants<double>(k_max);
    benchmark::DoNotOptimize(tables.rho_theta.back().rho);
  }
}
BENCHMARK(BM_ConstantsShadow)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SolveStokes(benchmark::State& state) {
  SolverConfig cfg;
  cfg.shape = parse_shape("sine:a=0.2");
  cfg.eps = 0.1;
  cfg.Nx = static_cast<int>(state.range(0));
  cfg.Ny = static_cast<int>(state.range(1));
  cfg.boundary = {-0.5, 1.0};
  for (auto _ : state) {
    ReferenceSolution sol = solve_stokes(cfg);
    benchmark::DoNotOptimize(sol.Q);
  }
}
BENCHMARK(BM_SolveStokes)->Args({32, 16})->Args({48, 20})->Unit(benchmark::kMillisecond);

static void BM_TruncatedFields(benchmark::State& state) {
  const int k_max = 3;
  ShapeSpec shape = parse_shape("sine:a=0.2");
  BasisSet bases(2 * k_max + 6);
  OperatorTable ops(bases, 2 * k_max + 5);
  auto exact = build_stack<Rational>(ops, k_max);
  std::vector<OrderMatrices<double>> stack;
  for (const auto& s : exact) {
    OrderMatrices<double> d;
    d.order = s.order;
    auto conv = [](const Matrix<Rational>& m) {
      Matrix<double> r(m.rows(), m.cols());
      for (std::int64_t i = 0; i < m.rows(); ++i)
        for (std::int64_t j = 0; j < m.cols(); ++j) r(i, j) = to_double(m(i, j));
      return r;
    };
    d.A0 = conv(s.A0);
    d.A1 = conv(s.A1);
    d.B = conv(s.B);
    stack.push_back(std::move(d));
  }
  GeometryMoments mom = moments(shape, bases, k_max, 1024);
  EvalContext ctx = make_context(shape, bases, ops, mom, stack, {-0.5, 1.0}, 0.1);
  EvalMesh mesh;
  for (int i = 0; i < 64; ++i) mesh.x.push_back(i / 64.0);
  for (int j = 0; j <= 16; ++j) mesh.eta.push_back(j / 16.0);
  for (auto _ : state) {
    FieldGrid grid = truncated_fields(ctx, 2 * k_max, mesh);
    benchmark::DoNotOptimize(grid.u_trunc[0]);
  }
}
BENCHMARK(BM_TruncatedFields)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
