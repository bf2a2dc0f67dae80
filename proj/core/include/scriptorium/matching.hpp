#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scriptorium/geometry.hpp"
#include "scriptorium/outlines.hpp"

namespace scriptorium {

/// Outline resampled to N points spaced uniformly by arc length, starting at
/// the cycle's first vertex, translated to zero mean and scaled to unit RMS
/// radius.
struct NormalizedCycle {
  std::vector<Vec2> points;

  std::size_t size() const { return points.size(); }
};

/// Points at arc lengths k * perimeter / n, k = 0..n-1, along the closed
/// polygon. No translation or scaling.
std::vector<Vec2> resample_closed(std::span<const Point> vertices, std::size_t n);

/// Throws Error{Degenerate} for cycles with fewer than 3 vertices or zero
/// perimeter, Error{InvalidArgument} for n < 4.
NormalizedCycle normalize(const OutlineCycle& cycle, std::size_t n);

/// Resamples every cycle to n points, then applies ONE translation and scale
/// computed over the union so that relative placement survives. Used for
/// characters made of several blobs.
std::vector<NormalizedCycle> normalize_group(std::span<const OutlineCycle> cycles, std::size_t n);

struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
  /// Rotation applied to the second sequence: pair (i, j) matched a[i] with
  /// b[(j + offset) % N].
  std::size_t offset = 0;
};

/// Classic DTW over an n x m grid with steps (1,0), (0,1), (1,1); the path
/// runs from (0,0) to (n-1,m-1) and cost is the sum of visited cell costs.
Alignment dtw(std::size_t n, std::size_t m,
              const std::function<double(std::size_t, std::size_t)>& cost);

/// DTW with Euclidean point cost, trying `starts` evenly spaced rotations of
/// b (all rotations when starts >= N) and keeping the cheapest.
Alignment dtw_align(const NormalizedCycle& a, const NormalizedCycle& b, std::size_t starts);

/// min(dtw(a,b), dtw(b,a)) divided by N.
double dtw_distance(const NormalizedCycle& a, const NormalizedCycle& b, std::size_t starts);

struct Polyline {
  std::vector<Vec2> points;
  bool closed = true;
};

Polyline as_polyline(const NormalizedCycle& c);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Mean over `points` of the distance to the nearest segment among the
/// target polylines. Asymmetric. Throws Error{EmptyInput} without targets.
double project_match(std::span<const Vec2> points, std::span<const Polyline> targets);
double project_match(const NormalizedCycle& a, std::span<const NormalizedCycle> targets);

/// max(project whole onto parts, project all part points onto whole).
double match_broken(std::span<const NormalizedCycle> parts, const NormalizedCycle& whole);

enum class Metric {
  SymmetricDtw,   // dtw_distance
  MinDtwBroken,   // min(dtw_distance, match_broken({a}, b))
};

struct ClusterOptions {
  Metric metric = Metric::SymmetricDtw;
  std::size_t starts = 16;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Dense symmetric matrix, row-major.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

DistanceMatrix distance_matrix(std::size_t n,
                               const std::function<double(std::size_t, std::size_t)>& distance,
                               unsigned threads = 0);

struct Clustering {
  std::vector<int> labels;
  double threshold = 0.0;

  int cluster_count() const;
};

/// Single-link cut: i and j share a label iff a chain of pairwise distances
/// <= threshold connects them. Labels are numbered by first appearance.
Clustering single_link(const DistanceMatrix& distances, double threshold);

Clustering cluster(std::span<const NormalizedCycle> outlines, double threshold,
                   const ClusterOptions& options = {});

/// A character as one or more jointly normalized outer cycles (see
/// normalize_group); several cycles mean the character is broken.
struct Shape {
  std::vector<NormalizedCycle> parts;
};

/// Equal part counts: mean per-part symmetric DTW (parts paired in stored
/// order). Different counts: symmetric projection score over the point sets,
/// which generalizes match_broken.
double shape_distance(const Shape& a, const Shape& b, const ClusterOptions& options);

Clustering cluster_shapes(std::span<const Shape> shapes, double threshold,
                          const ClusterOptions& options = {});

/// Fraction of items whose label's majority class equals their own class.
double cluster_purity(std::span<const int> labels, std::span<const int> classes);

/// CSV with a header row of ids, then one row per item.
std::string distance_matrix_csv(const DistanceMatrix& m, std::span<const std::string> ids);
nlohmann::json to_json(const Clustering& c);

}  // namespace scriptorium
