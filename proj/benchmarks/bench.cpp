#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tcrobust/cps.hpp"
#include "tcrobust/integration.hpp"
#include "tcrobust/market.hpp"
#include "tcrobust/optimize.hpp"

namespace {

using namespace tcr;

LadlagPath random_increasing(std::mt19937_64& rng, int events) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PathEvent> ev;
  std::vector<double> slopes;
  for (int i = 1; i <= events; ++i) {
    ev.push_back({static_cast<double>(i) / (events + 1), u(rng), u(rng)});
  }
  for (int i = 0; i <= events; ++i) slopes.push_back(u(rng));
  return LadlagPath(1.0, 0.0, 0.0, std::move(ev), std::move(slopes));
}

LadlagPath random_cadlag(std::mt19937_64& rng, int events) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<PathEvent> ev;
  std::vector<double> slopes;
  for (int i = 1; i <= events; ++i) {
    ev.push_back({(i - 0.5) / (events + 1), u(rng), 0.0});
  }
  for (int i = 0; i <= events; ++i) slopes.push_back(u(rng));
  return LadlagPath(1.0, 5.0, 0.0, std::move(ev), std::move(slopes));
}

void BM_Integrate(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const auto S = random_cadlag(rng, n);
  const auto H = random_increasing(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(S, H));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Integrate)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

// Binary tree with `depth` splitting events, prices up by u or down by d.
ModelFamily binary_family(int depth) {
  const std::size_t m = std::size_t{1} << depth;
  std::vector<std::string> labels;
  std::vector<double> p(m, 1.0 / static_cast<double>(m));
  for (std::size_t w = 0; w < m; ++w) labels.push_back("w" + std::to_string(w));
  std::vector<TreeEvent> events;
  for (int k = 0; k < depth; ++k) {
    const std::size_t pre_size = m >> k, post_size = m >> (k + 1);
    Partition pre, post;
    for (std::size_t s = 0; s < m; s += pre_size) {
      pre.emplace_back();
      for (std::size_t w = s; w < s + pre_size; ++w) pre.back().push_back(w);
    }
    for (std::size_t s = 0; s < m; s += post_size) {
      post.emplace_back();
      for (std::size_t w = s; w < s + post_size; ++w) post.back().push_back(w);
    }
    events.push_back({static_cast<double>(k + 1) / depth, pre, post});
  }
  const auto tree = ScenarioTree::with_trivial_root(labels, p, 1.0, events);
  PriceModel model;
  model.label = "binary";
  for (std::size_t w = 0; w < m; ++w) {
    double s = 1.0;
    std::vector<PathEvent> ev;
    for (int k = 0; k < depth; ++k) {
      const bool up = (w >> (depth - 1 - k)) & 1u;
      const double next = s * (up ? 1.2 : 0.85);
      ev.push_back({static_cast<double>(k + 1) / depth, next - s, 0.0});
      s = next;
    }
    model.paths.emplace_back(1.0, 1.0, 0.0, std::move(ev),
                             std::vector<double>(static_cast<std::size_t>(depth) + 1, 0.0));
  }
  return ModelFamily(tree, {model}, 0.1, 0.05);
}

void BM_FindCps(benchmark::State& state) {
  const auto fam = binary_family(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_cps(fam, 0, 0.05));
}
BENCHMARK(BM_FindCps)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_SolveRobust(benchmark::State& state) {
  const auto fam = binary_family(static_cast<int>(state.range(0)));
  const auto U = Utility::log();
  for (auto _ : state) benchmark::DoNotOptimize(solve_robust(fam, U, 1.0));
}
BENCHMARK(BM_SolveRobust)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
