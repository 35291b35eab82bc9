// OpenMP kernels against their serial twins. Run with OMP_NUM_THREADS set to
// the core count; on a single core the two columns should roughly agree.

#include <benchmark/benchmark.h>

#include "ncmart/counterexample.hpp"
#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"

using namespace ncmart;

namespace {

void BM_mu_eval(benchmark::State& state, bool parallel) {
  const Index N = state.range(0);
  const MartingaleSequence seq = martingale_of_XN(N);
  Rng rng(1);
  const Projection e = random_projection(seq.ambient(), N / 10, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? mu_eval(seq, e) : serial::mu_eval(seq, e));
}

void BM_diag_exhaustive(benchmark::State& state, bool parallel) {
  const Index N = state.range(0);
  const MartingaleSequence seq = martingale_of_XN(N);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? mu_diag_exhaustive(seq, 0.25).value
                                      : serial::mu_diag_exhaustive(seq, 0.25).value);
}

void BM_search(benchmark::State& state, bool parallel) {
  const Index N = state.range(0);
  const MartingaleSequence seq = martingale_of_XN(N);
  const SearchOptions opts{500, 7};
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? mu_search(seq, 0.1, opts).value
                                      : serial::mu_search(seq, 0.1, opts).value);
}

void BM_chain_grid(benchmark::State& state, bool parallel) {
  const Index N = state.range(0);
  std::vector<Projection> es;
  for (int k = 0; k < 16; ++k) {
    Rng rng(derive_seed(3, static_cast<std::uint64_t>(k)));
    es.push_back(random_projection(TracialAlgebra::normalized(N), N / 8, rng));
  }
  for (auto _ : state) {
    std::vector<char> ok(es.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long k = 0; k < static_cast<long>(es.size()); ++k)
      ok[static_cast<std::size_t>(k)] = chain_verify(N, 0.25, 0.125, es[static_cast<std::size_t>(k)]).passed();
    benchmark::DoNotOptimize(ok.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_mu_eval, serial, false)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_mu_eval, openmp, true)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_diag_exhaustive, serial, false)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_diag_exhaustive, openmp, true)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_search, serial, false)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_search, openmp, true)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_chain_grid, serial, false)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_chain_grid, openmp, true)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
