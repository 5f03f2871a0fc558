#include <benchmark/benchmark.h>

#include "warmgp/analysis.hpp"
#include "warmgp/bench/verify.hpp"
#include "warmgp/kernel.hpp"
#include "warmgp/solvers.hpp"

namespace {

using namespace warmgp;

struct Fixture {
  Matrix H;
  Vector b;
  Vector u1;
  Index n1;
};

// A blocked Matern system sized n with a 10:1 old-to-new split and the exact
// sub-solution available for warm starts.
Fixture make_fixture(Index n) {
  const Index n2 = n / 11;
  const Index n1 = n - n2;
  Rng rng(17);
  const KernelHyperparams hyp{0.4, 1.0, 0.3};
  const Matrix X1 = bench::random_inputs(rng, n1, 3);
  const Matrix X2 = bench::random_inputs(rng, n2, 3);
  Vector b1(n1), b2(n2);
  for (Index i = 0; i < n1; ++i) b1(i) = rng.normal();
  for (Index i = 0; i < n2; ++i) b2(i) = rng.normal();
  const BlockedSystem sys = extend_system(gram_matrix(X1, hyp), X2, b1, b2);
  return Fixture{sys.assembled(), sys.rhs(), exact_solve(sys.H11, sys.b1), n1};
}

SolverConfig config_for(Method m) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.tolerance = 0.01;
  cfg.max_iters = 50000;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 100;
  cfg.block_size = 100;
  cfg.precond_rank = 100;
  cfg.precond_shift = 0.09;
  return cfg;
}

void BM_SolveToTolerance(benchmark::State& state) {
  const Fixture fx = make_fixture(state.range(0));
  const Method m = static_cast<Method>(state.range(1));
  const bool warm = state.range(2) != 0;
  const SolverConfig cfg = config_for(m);
  const Initialization init =
      warm ? Initialization::warm(fx.u1) : Initialization::cold();
  long iters = 0;
  for (auto _ : state) {
    const SolveResult res = solve(fx.H, fx.b, init, cfg);
    benchmark::DoNotOptimize(res.v.data());
    iters = res.iterations;
  }
  state.counters["iterations"] = static_cast<double>(iters);
}

void BM_GramAssembly(benchmark::State& state) {
  Rng rng(7);
  const Matrix X = bench::random_inputs(rng, state.range(0), 8);
  const KernelHyperparams hyp{0.5, 1.0, 0.1};
  for (auto _ : state) {
    const CovarianceMatrix cov = gram_matrix(X, hyp);
    benchmark::DoNotOptimize(cov.H.data());
  }
}

void BM_PivotedCholesky(benchmark::State& state) {
  Rng rng(9);
  const KernelHyperparams hyp{0.5, 1.0, 0.1};
  const Matrix H = gram_matrix(bench::random_inputs(rng, state.range(0), 3), hyp).H;
  for (auto _ : state) {
    const Matrix L = pivoted_cholesky(H, 100);
    benchmark::DoNotOptimize(L.data());
  }
}

}  // namespace

BENCHMARK(BM_SolveToTolerance)
    ->ArgsProduct({{550, 1100}, {0, 1, 2}, {0, 1}})
    ->ArgNames({"n", "method", "warm"})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramAssembly)->Arg(500)->Arg(1100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PivotedCholesky)->Arg(500)->Arg(1100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
