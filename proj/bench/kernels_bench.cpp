// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "cylpc/ingest.hpp"
#include "cylpc/kernels.hpp"
#include "cylpc/raht.hpp"

namespace {

using namespace cylpc;

const PointCloud& sweep() {
  static const PointCloud pc = synth_sweep(SweepSpec{}, 1);
  return pc;
}

const VoxelGridConfig& cylinder_grid() {
  static const VoxelGridConfig cfg = make_config(sweep(), CoordinateSystem::Cylindrical, 13);
  return cfg;
}

const std::vector<WeightedLeaf>& leaves() {
  static const std::vector<WeightedLeaf> out = [] {
    const auto codes = kernels::parallel::voxel_codes(sweep().points(), cylinder_grid());
    std::vector<WeightedLeaf> l;
    for (auto c : codes) l.push_back({c, 0.0, 1});
    std::sort(l.begin(), l.end(), [](const auto& a, const auto& b) { return a.code < b.code; });
    l.erase(std::unique(l.begin(), l.end(), [](const auto& a, const auto& b) { return a.code == b.code; }),
            l.end());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 255);
    for (auto& x : l) x.attribute = u(rng);
    return l;
  }();
  return out;
}

template <auto Fn>
void BM_VoxelCodes(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Fn(sweep().points(), cylinder_grid()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sweep().size()));
}
BENCHMARK(BM_VoxelCodes<&kernels::serial::voxel_codes>)->Name("voxel_codes/serial");
BENCHMARK(BM_VoxelCodes<&kernels::parallel::voxel_codes>)->Name("voxel_codes/parallel");

void BM_KnnSerial(benchmark::State& state) {
  // The exhaustive reference is quadratic; time it on a prefix of the sweep.
  const auto pts = sweep().points().first(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::knn_mean_distance(pts, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
void BM_KnnParallel(benchmark::State& state) {
  const auto pts = sweep().points().first(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::knn_mean_distance(pts, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnnSerial)->Name("knn5/serial")->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnParallel)->Name("knn5/parallel")->Arg(5000)->Arg(100000)->Unit(benchmark::kMillisecond);

template <auto Fn>
void BM_MonteCarlo(benchmark::State& state) {
  const kernels::UniformErrorBox box{{0.0866, 0.00866, 0.0866}};
  for (auto _ : state) benchmark::DoNotOptimize(Fn(10.0, box, 1000000, 7));
  state.SetItemsProcessed(state.iterations() * 1000000);
}
BENCHMARK(BM_MonteCarlo<&kernels::serial::mc_mean_error_cylindrical>)
    ->Name("mc_cylindrical/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo<&kernels::parallel::mc_mean_error_cylindrical>)
    ->Name("mc_cylindrical/parallel")
    ->Unit(benchmark::kMillisecond);

void BM_RahtSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::raht_forward(leaves(), 13));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(leaves().size()));
}
void BM_RahtParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(raht_forward(leaves(), 13));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(leaves().size()));
}
BENCHMARK(BM_RahtSerial)->Name("raht_forward/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RahtParallel)->Name("raht_forward/parallel")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
