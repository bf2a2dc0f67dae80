#include <benchmark/benchmark.h>

#include "scriptorium/skeleton.hpp"

using namespace scriptorium;

namespace {

// Thick ring, the shape of a heavy "o".
BinaryImage ring(int size, int stroke) {
  BinaryImage img(size, size);
  const double c = (size - 1) / 2.0;
  const double outer = size / 2.0 - 2;
  const double inner = outer - stroke;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double d2 = (x - c) * (x - c) + (y - c) * (y - c);
      img.set(x, y, d2 <= outer * outer && d2 >= inner * inner);
    }
  }
  return img;
}

void BM_Skeletonize(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const BinaryImage img = ring(size, size / 5);
  for (auto _ : state) benchmark::DoNotOptimize(skeletonize(img).mask.count());
}
BENCHMARK(BM_Skeletonize)->Arg(32)->Arg(128)->Arg(256);

void BM_ToGraph(benchmark::State& state) {
  const Skeleton s = skeletonize(ring(128, 20));
  for (auto _ : state) benchmark::DoNotOptimize(to_graph(s).edges.size());
}
BENCHMARK(BM_ToGraph);

}  // namespace
