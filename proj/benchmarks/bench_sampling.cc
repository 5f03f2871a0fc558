#include <benchmark/benchmark.h>

#include "warmgp/bench/verify.hpp"
#include "warmgp/sampling.hpp"

namespace {

using namespace warmgp;

void BM_SamplePrior(benchmark::State& state) {
  const KernelHyperparams hyp{0.3, 1.0, 1e-3};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const RffPrior p = sample_prior(hyp, 8, state.range(0), ++seed);
    benchmark::DoNotOptimize(p.frequencies.data());
  }
}

void BM_EvalPosterior(benchmark::State& state) {
  const KernelHyperparams hyp{0.3, 1.0, 1e-3};
  Rng rng(3);
  const Index n_train = state.range(0);
  const PosteriorSample s{sample_prior(hyp, 3, 2000, 1), bench::random_inputs(rng, n_train, 3),
                          Vector::Ones(n_train), hyp};
  const Matrix probes = bench::random_inputs(rng, 1250, 3);
  for (auto _ : state) {
    const Vector vals = eval_posterior(s, probes);
    benchmark::DoNotOptimize(vals.data());
  }
}

}  // namespace

BENCHMARK(BM_SamplePrior)->Arg(512)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalPosterior)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
