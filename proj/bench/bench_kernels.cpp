#include <benchmark/benchmark.h>

#include "qwlift/bridge.hpp"
#include "qwlift/kernels.hpp"
#include "qwlift/quantum_walk.hpp"

using namespace qwlift;

namespace {

struct CycleLift {
  explicit CycleLift(std::size_t n)
      : g(std::make_shared<const Graph>(generators::cycle(n))),
        u(Distribution::uniform(n)),
        lift(assemble_d_lift(g, u, metropolis_chain(g, u))) {}
  std::shared_ptr<const Graph> g;
  Distribution u;
  LiftedChain lift;
};

template <bool Parallel>
void BM_MarginalCurve(benchmark::State& state) {
  const CycleLift c(static_cast<std::size_t>(state.range(0)));
  const std::size_t horizon = 4 * diameter(*c.g);
  for (auto _ : state) {
    auto curve = Parallel ? kernels::omp::marginal_tv_curve(c.lift.transition, c.lift.init,
                                                            c.lift.coarse_of, c.u.values(), horizon)
                          : kernels::serial::marginal_tv_curve(c.lift.transition, c.lift.init,
                                                               c.lift.coarse_of, c.u.values(), horizon);
    benchmark::DoNotOptimize(curve.data());
  }
}

template <bool Parallel>
void BM_TvCurve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = std::make_shared<const Graph>(generators::cycle(n));
  const Eigen::MatrixXd P = lazy(simple_walk(g)).entries();
  const auto N = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd starts = Eigen::MatrixXd::Identity(N, N);
  const Eigen::VectorXd target = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(n));
  for (auto _ : state) {
    auto curve = Parallel ? kernels::omp::tv_curve(P, starts, target, 2 * n * n)
                          : kernels::serial::tv_curve(P, starts, target, 2 * n * n);
    benchmark::DoNotOptimize(curve.data());
  }
}

template <bool Parallel>
void BM_Cesaro(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = std::make_shared<const Graph>(generators::cycle(n));
  const auto w = coined_walk(g, fourier_coin(2));
  const auto dim = static_cast<Eigen::Index>(w.dimension());
  const Eigen::MatrixXcd states = Eigen::MatrixXcd::Identity(dim, dim);
  for (auto _ : state) {
    auto avg = Parallel ? kernels::omp::cesaro_average(w.matrix(), states, n, 1000)
                        : kernels::serial::cesaro_average(w.matrix(), states, n, 1000);
    benchmark::DoNotOptimize(avg.data());
  }
}

void BM_AssembleLift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = std::make_shared<const Graph>(generators::cycle(n));
  const auto u = Distribution::uniform(n);
  const auto coarse = metropolis_chain(g, u);
  const Execution policy = state.range(1) ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) {
    auto lift = assemble_d_lift(g, u, coarse, BridgeKind::MaxFlow, policy);
    benchmark::DoNotOptimize(lift.transition.nonZeros());
  }
}

}  // namespace

BENCHMARK(BM_MarginalCurve<false>)->Arg(9)->Arg(17)->Arg(33);
BENCHMARK(BM_MarginalCurve<true>)->Arg(9)->Arg(17)->Arg(33);
BENCHMARK(BM_TvCurve<false>)->Arg(17)->Arg(33);
BENCHMARK(BM_TvCurve<true>)->Arg(17)->Arg(33);
BENCHMARK(BM_Cesaro<false>)->Arg(9)->Arg(17);
BENCHMARK(BM_Cesaro<true>)->Arg(9)->Arg(17);
BENCHMARK(BM_AssembleLift)->Args({17, 0})->Args({17, 1})->Args({33, 0})->Args({33, 1});

BENCHMARK_MAIN();
