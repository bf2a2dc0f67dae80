#include <benchmark/benchmark.h>

#include <random>

#include "scriptorium/ctc.hpp"

using namespace scriptorium;

namespace {

LogProbMatrix random_input(std::size_t frames, std::size_t classes) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  LogProbMatrix logits(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < classes; ++k) logits(t, k) = n(rng);
  }
  return log_softmax(logits);
}

LabelSequence random_labels(std::size_t length, int alphabet) {
  std::mt19937_64 rng(2);
  LabelSequence y(length);
  for (int& v : y) v = 1 + static_cast<int>(rng() % static_cast<unsigned>(alphabet));
  return y;
}

void BM_CtcLoss(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const auto p = random_input(frames, 71);
  const auto y = random_labels(frames / 4, 70);
  for (auto _ : state) benchmark::DoNotOptimize(ctc_loss(p, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CtcLoss)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_CtcLossAndGrad(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const auto p = random_input(frames, 71);
  const auto y = random_labels(frames / 4, 70);
  for (auto _ : state) benchmark::DoNotOptimize(ctc_loss_and_grad(p, y).loss);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CtcLossAndGrad)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

}  // namespace
