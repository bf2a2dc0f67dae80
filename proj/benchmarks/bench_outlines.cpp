#include <benchmark/benchmark.h>

#include <random>

#include "scriptorium/outlines.hpp"
#include "scriptorium/segmentation.hpp"

using namespace scriptorium;

namespace {

// A filled disc with a grid of square holes: long outer cycle, many inner ones.
Blob holed_disc(int radius) {
  const int size = 2 * radius + 3;
  BinaryImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const int dx = x - radius - 1;
      const int dy = y - radius - 1;
      const bool hole = x % 6 == 3 && y % 6 == 3;
      img.set(x, y, dx * dx + dy * dy <= radius * radius && !hole);
    }
  }
  return extract_blobs(img, 8).front();
}

void BM_TraceGraph(benchmark::State& state) {
  const Blob blob = holed_disc(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trace_graph(blob).cycles.size());
  state.counters["pixels"] = static_cast<double>(blob.pixels.size());
}
BENCHMARK(BM_TraceGraph)->Arg(16)->Arg(64)->Arg(256);

void BM_TraceSweep(benchmark::State& state) {
  const Blob blob = holed_disc(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trace_sweep(blob).cycles.size());
  state.counters["pixels"] = static_cast<double>(blob.pixels.size());
}
BENCHMARK(BM_TraceSweep)->Arg(16)->Arg(64)->Arg(256);

void BM_EncodeChainCode(benchmark::State& state) {
  const Blob blob = holed_disc(static_cast<int>(state.range(0)));
  const std::vector<BlobOutline> outlines{trace_graph(blob)};
  const int size = blob.bbox.x1 + 2;
  for (auto _ : state) benchmark::DoNotOptimize(encode_chain_code(size, size, outlines).size());
}
BENCHMARK(BM_EncodeChainCode)->Arg(64)->Arg(256);

}  // namespace
