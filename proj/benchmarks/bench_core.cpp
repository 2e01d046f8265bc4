#include <benchmark/benchmark.h>

#include "bergman/bounds.hpp"
#include "bergman/grassmann.hpp"
#include "bergman/group.hpp"
#include "bergman/kernel.hpp"

using namespace bergman;

namespace {

const HPoint kCenter(0.0, 1.0);

const ElementSet& ball_for(double cutoff) {
  static std::map<double, ElementSet> cache;
  auto it = cache.find(cutoff);
  if (it == cache.end())
    it = cache.emplace(cutoff, enumerate_elements(bolza_group(), 12,
                                                  PruneSpec{kCenter, cutoff}))
             .first;
  return it->second;
}

void BM_HypDistance(benchmark::State& state) {
  const HPoint z(0.3, 1.2), w(-0.7, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(hyp_distance(z, w));
}
BENCHMARK(BM_HypDistance);

void BM_Enumerate(benchmark::State& state) {
  const GroupSpec g = bolza_group();
  const double cutoff = static_cast<double>(state.range(0));
  std::size_t n = 0;
  for (auto _ : state) {
    const ElementSet set =
        enumerate_elements(g, 12, PruneSpec{kCenter, cutoff});
    n = set.size();
    benchmark::DoNotOptimize(set.size());
  }
  state.counters["elements"] = static_cast<double>(n);
}
BENCHMARK(BM_Enumerate)->Arg(6)->Arg(9)->Arg(12);

void BM_SeriesB(benchmark::State& state) {
  const ElementSet& set = ball_for(10.0);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(series_B(kCenter, k, set).value);
  state.counters["elements"] = static_cast<double>(set.size());
}
BENCHMARK(BM_SeriesB)->Arg(3)->Arg(8)->Arg(24);

void BM_Derivatives(benchmark::State& state) {
  const ElementSet& set = ball_for(10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(series_derivatives(kCenter, 6, set).dzdzbar);
}
BENCHMARK(BM_Derivatives);

void BM_Theorem1Check(benchmark::State& state) {
  const ElementSet& set = ball_for(8.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        check_theorem1(kCenter, 6, set, 3.0571418389619963).passed);
}
BENCHMARK(BM_Theorem1Check);

void BM_FsLogDet(benchmark::State& state) {
  Eigen::MatrixXcd m(6, 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j)
      m(i, j) = Complex(0.1 * (i + 1), -0.05 * (j + 1));
  const ChartMatrix chart(m);
  for (auto _ : state) benchmark::DoNotOptimize(fs_log_det(chart));
}
BENCHMARK(BM_FsLogDet);

}  // namespace

BENCHMARK_MAIN();
