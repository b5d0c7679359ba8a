#include <benchmark/benchmark.h>

#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/kernels.hpp"
#include "mfchaos/noise.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/torus.hpp"
#include "mfchaos/vp_tree.hpp"

using namespace mfchaos;

namespace {

SimConfig smooth_config(std::size_t n) {
  SimConfig c;
  c.n_particles = n;
  c.interaction.name = "smooth_divfree";
  c.interaction.params["m"] = {1};
  return c;
}

std::vector<double> uniform_points(std::size_t count, std::uint64_t seed) {
  std::vector<double> v(count);
  RngStream rng(seed, 0, 0);
  for (double& x : v) x = rng.uniform() - 0.5;
  return v;
}

// Pairwise drift through the O(n^2) base-class loop.
void BM_DriftGeneric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto term = make_interaction(smooth_config(n));
  const auto states = uniform_points(n * 2, 1);
  const Population pop{states.data(), n, 2, 0, 0, 0.0};
  std::vector<double> out(n * 2);
  for (auto _ : state) {
    term->InteractionTerm::population_average(pop, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DriftGeneric)->RangeMultiplier(2)->Range(16, 256)->Complexity();

// The same average through the term's own fast path.
void BM_DriftFastPath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto term = make_interaction(smooth_config(n));
  const auto states = uniform_points(n * 2, 1);
  const Population pop{states.data(), n, 2, 0, 0, 0.0};
  std::vector<double> out(n * 2);
  for (auto _ : state) {
    term->population_average(pop, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DriftFastPath)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_FbmCirculant(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const FbmGenerator gen(steps, 1.0 / static_cast<double>(steps), 0.7, FbmGenerator::Method::circulant);
  RngStream rng(2, 0, 0);
  std::vector<double> out(steps);
  for (auto _ : state) {
    gen.increments(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FbmCirculant)->RangeMultiplier(4)->Range(64, 4096);

void BM_FbmCholesky(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const FbmGenerator gen(steps, 1.0 / static_cast<double>(steps), 0.7, FbmGenerator::Method::cholesky);
  RngStream rng(2, 0, 0);
  std::vector<double> out(steps);
  for (auto _ : state) {
    gen.increments(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FbmCholesky)->RangeMultiplier(4)->Range(64, 1024);

void BM_VpTreeKnn(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 2;
  const VpTree tree(uniform_points(count * dim, 3), dim, Metric::torus);
  const auto queries = uniform_points(256 * dim, 4);
  for (auto _ : state) {
    for (std::size_t q = 0; q < 256; ++q) {
      benchmark::DoNotOptimize(tree.nearest({queries.data() + q * dim, dim}, 4));
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 256);
}
BENCHMARK(BM_VpTreeKnn)->RangeMultiplier(4)->Range(1024, 65536);

void BM_BiotSavartPeriodic(benchmark::State& state) {
  const int radius = static_cast<int>(state.range(0));
  const TorusPoint x(std::vector<double>{0.2, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(biot_savart_periodic(x, radius, 0.0));
}
BENCHMARK(BM_BiotSavartPeriodic)->DenseRange(2, 16, 2);

}  // namespace

BENCHMARK_MAIN();
