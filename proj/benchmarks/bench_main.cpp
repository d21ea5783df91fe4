#include <benchmark/benchmark.h>

#include "gglab/estimators.hpp"
#include "gglab/gibbs.hpp"
#include "gglab/green.hpp"

using namespace gglab;

static void BM_LangevinStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  auto dom = std::make_shared<const Domain>(std::make_shared<const LatticeBox>(d, n));
  PotentialSpec p;
  p.kind = PotentialKind::PerturbedConvex;
  p.eps = 0.5;
  const GibbsModel m = make_model(dom, Potential(p), BoundarySpec::zero());
  LangevinIntegrator integ(m, default_step(m));
  HeightField phi = initial_field(m);
  NoiseStream noise(1);
  for (auto _ : state) integ.step(phi, noise);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(dom->free_count()));
}
BENCHMARK(BM_LangevinStep)->Args({2, 8})->Args({2, 32})->Args({3, 8});

static void BM_GreenColumn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto method = state.range(1) ? SpdSolver::Method::Iterative : SpdSolver::Method::Direct;
  auto box = std::make_shared<const LatticeBox>(3, n);
  auto dom = std::make_shared<const Domain>(box);
  const std::vector<double> kappa(box->edges().size(), 1.0);
  const auto o = box->index_or_throw(Site{});
  for (auto _ : state) {
    const GreenTable g(dom, kappa, GreenNormalization::PrecisionInverse, method);
    benchmark::DoNotOptimize(g.column(o));
  }
}
BENCHMARK(BM_GreenColumn)->Args({8, 0})->Args({8, 1})->Args({16, 1})->Unit(benchmark::kMillisecond);

static void BM_WalkersStatic(benchmark::State& state) {
  auto dom = std::make_shared<const Domain>(std::make_shared<const LatticeBox>(2, 8));
  const auto env = DynamicEnvironment::static_rates(dom, std::vector<double>(dom->box().edges().size(), 1.0));
  const auto walkers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hs_walk_green(env, Site{}, Site{}, walkers, 3, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WalkersStatic)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ConvolutionSum(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const double r = static_cast<double>(state.range(1));
  std::vector<int> seps;
  for (int s = 1; s <= 16; ++s) seps.push_back(s);
  for (auto _ : state) benchmark::DoNotOptimize(convolution_bound_check(d, ConvolutionKind::Second, {r / 2, r}, seps));
}
BENCHMARK(BM_ConvolutionSum)->Args({2, 128})->Args({3, 32})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
