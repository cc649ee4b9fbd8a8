#include <benchmark/benchmark.h>

#include "borderlab/apolarity.hpp"
#include "borderlab/koszul.hpp"
#include "borderlab/linalg.hpp"
#include "borderlab/solve.hpp"

using namespace borderlab;

namespace {

// Koszul matrix of skewcw(4)^2 at p = 3 restricted to 7 coordinates (875 x 875 over F_p, rank 778).
const ModMatrix& koszul_matrix() {
  static const ModMatrix m = [] {
    QTensor t = restrict_generic(catalog("skewcw:4^2"), Factor::A, 7, 0);
    return koszul_map_modp(t, Factor::A, 3, prime_for_seed(0));
  }();
  return m;
}

const std::vector<QMatrix>& cw2sq_slices() {
  static const std::vector<QMatrix> s = [] {
    auto sp = slice_space(catalog("cw:2^2"), Factor::A);
    return sp.basis;
  }();
  return s;
}

const TightProblem& planted_problem() {
  static const TightProblem p = full_problem(random_tensor(3, 3, 3, 7, 3), 3);
  return p;
}

void rank_parallel(benchmark::State& st) {
  set_thread_count(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(rank_modp(koszul_matrix()));
  set_thread_count(0);
}

void rank_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(rank_modp_serial(koszul_matrix()));
}

void minrank_parallel(benchmark::State& st) {
  set_thread_count(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(min_rank_certificate(cw2sq_slices(), 3, 100000000).rho);
  set_thread_count(0);
}

void minrank_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(min_rank_certificate_serial(cw2sq_slices(), 3, 100000000).rho);
}

void multistart_parallel(benchmark::State& st) {
  set_thread_count(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(multi_start(planted_problem(), {}, 0, 8).residual);
  set_thread_count(0);
}

void multistart_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(multi_start_serial(planted_problem(), {}, 0, 8).residual);
}

}  // namespace

BENCHMARK(rank_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(rank_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(minrank_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(minrank_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(multistart_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(multistart_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
