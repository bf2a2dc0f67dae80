#include <benchmark/benchmark.h>

#include <cmath>

#include "scriptorium/matching.hpp"

using namespace scriptorium;

namespace {

OutlineCycle staircase_circle(int radius, int wobble) {
  // Axis-aligned polygon approximating a circle, counter-clockwise.
  std::vector<Point> v;
  const int steps = 8 * radius;
  for (int i = 0; i < steps; ++i) {
    const double a = 2.0 * M_PI * i / steps;
    const double r = radius + wobble * std::sin(5 * a);
    const Point p{static_cast<int>(std::lround(r * std::cos(a))), static_cast<int>(std::lround(r * std::sin(a)))};
    if (!v.empty() && v.back() == p) continue;
    if (!v.empty() && v.back().x != p.x && v.back().y != p.y) v.push_back({p.x, v.back().y});
    v.push_back(p);
  }
  if (v.back().x != v.front().x && v.back().y != v.front().y) v.push_back({v.front().x, v.back().y});
  OutlineCycle c;
  c.vertices = v;
  c.signed_area = shoelace_area(v);
  c.orientation = c.signed_area > 0 ? 1 : -1;
  return c;
}

void BM_DtwDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normalize(staircase_circle(20, 0), n);
  const auto b = normalize(staircase_circle(20, 3), n);
  for (auto _ : state) benchmark::DoNotOptimize(dtw_distance(a, b, 16));
}
BENCHMARK(BM_DtwDistance)->Arg(32)->Arg(64)->Arg(128);

void BM_DtwExhaustive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normalize(staircase_circle(20, 0), n);
  const auto b = normalize(staircase_circle(20, 3), n);
  for (auto _ : state) benchmark::DoNotOptimize(dtw_distance(a, b, n));
}
BENCHMARK(BM_DtwExhaustive)->Arg(32)->Arg(64);

void BM_MatchBroken(benchmark::State& state) {
  const auto whole = normalize(staircase_circle(20, 0), 64);
  const std::vector<NormalizedCycle> parts{normalize(staircase_circle(10, 0), 64), normalize(staircase_circle(8, 1), 64)};
  for (auto _ : state) benchmark::DoNotOptimize(match_broken(parts, whole));
}
BENCHMARK(BM_MatchBroken);

}  // namespace
