// Timing of the numerical kernels and of each method on one generated graph.
//   ./sbmlab_bench --benchmark_filter=Method

#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "sbmlab/generator.hpp"
#include "sbmlab/harness.hpp"
#include "sbmlab/numkit.hpp"

using namespace sbmlab;

namespace {

const GeneratedInstance& instance(int n) {
  static std::map<int, GeneratedInstance> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, generate({n, 5, 0.0, 0.5, 11})).first;
  return it->second;
}

void BM_TopkEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = instance(n).adjacency.dense();
  for (auto _ : state) benchmark::DoNotOptimize(topk_eigen(a, 5));
}
BENCHMARK(BM_TopkEigen)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngHandle rng = seeded_rng(1, 0);
  Matrix pts(n, 5);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform();
  for (auto _ : state) {
    RngHandle krng = seeded_rng(2, 0);
    benchmark::DoNotOptimize(kmeans(pts, 5, krng));
  }
}
BENCHMARK(BM_KMeans)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Method(benchmark::State& state) {
  const auto method = static_cast<Method>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const GeneratedInstance& g = instance(n);
  MethodOptions options;
  options.gibbs.n_iter = 200;
  options.gibbs.burn_in = 100;
  state.SetLabel(std::string(to_string(method)));
  for (auto _ : state) {
    RngHandle rng = seeded_rng(3, method_stream(method));
    benchmark::DoNotOptimize(run_method(g.adjacency, 5, method, options, rng));
  }
}
BENCHMARK(BM_Method)
    ->ArgsProduct({{static_cast<int>(Method::SC), static_cast<int>(Method::SCORE), static_cast<int>(Method::L2),
                    static_cast<int>(Method::RSC), static_cast<int>(Method::GIBBS), static_cast<int>(Method::VB),
                    static_cast<int>(Method::VEMB), static_cast<int>(Method::VEMG)},
                   {250, 500}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
