#include "scriptorium/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "scriptorium/error.hpp"

namespace scriptorium {

std::vector<Vec2> resample_closed(std::span<const Point> vertices, std::size_t n) {
  const std::size_t m = vertices.size();
  std::vector<double> cumulative(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Point a = vertices[i];
    const Point b = vertices[(i + 1) % m];
    cumulative[i + 1] = cumulative[i] + std::hypot(b.x - a.x, b.y - a.y);
  }
  const double perimeter = cumulative[m];
  if (m < 3 || perimeter <= 0.0) {
    throw Error(ErrorKind::Degenerate, "resample: cycle has no extent");
  }

  std::vector<Vec2> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = perimeter * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < m && cumulative[seg + 1] <= s) ++seg;
    const Point a = vertices[seg];
    const Point b = vertices[(seg + 1) % m];
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double t = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return out;
}

namespace {

void check_cycle(const OutlineCycle& cycle, std::size_t n) {
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "normalize: need at least 4 samples");
  if (cycle.vertices.size() < 3) {
    throw Error(ErrorKind::Degenerate, "normalize: cycle needs at least 3 vertices");
  }
}

void center_and_scale(std::vector<std::vector<Vec2>>& groups) {
  Vec2 mean;
  std::size_t count = 0;
  for (const auto& g : groups) {
    for (const Vec2& p : g) mean = mean + p;
    count += g.size();
  }
  mean = mean * (1.0 / static_cast<double>(count));
  double sq = 0.0;
  for (const auto& g : groups) {
    for (const Vec2& p : g) {
      const Vec2 d = p - mean;
      sq += d.x * d.x + d.y * d.y;
    }
  }
  const double rms = std::sqrt(sq / static_cast<double>(count));
  if (rms <= 0.0) throw Error(ErrorKind::Degenerate, "normalize: zero radius");
  for (auto& g : groups) {
    for (Vec2& p : g) p = (p - mean) * (1.0 / rms);
  }
}

}  // namespace

NormalizedCycle normalize(const OutlineCycle& cycle, std::size_t n) {
  check_cycle(cycle, n);
  std::vector<std::vector<Vec2>> groups{resample_closed(cycle.vertices, n)};
  center_and_scale(groups);
  return {std::move(groups.front())};
}

std::vector<NormalizedCycle> normalize_group(std::span<const OutlineCycle> cycles, std::size_t n) {
  if (cycles.empty()) throw Error(ErrorKind::EmptyInput, "normalize_group: no cycles");
  std::vector<std::vector<Vec2>> groups;
  for (const OutlineCycle& c : cycles) {
    check_cycle(c, n);
    groups.push_back(resample_closed(c.vertices, n));
  }
  center_and_scale(groups);
  std::vector<NormalizedCycle> out;
  for (auto& g : groups) out.push_back({std::move(g)});
  return out;
}

Alignment dtw(std::size_t n, std::size_t m,
              const std::function<double(std::size_t, std::size_t)>& cost) {
  if (n == 0 || m == 0) throw Error(ErrorKind::EmptyInput, "dtw: empty sequence");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(n * m, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double prev = 0.0;
      if (i > 0 || j > 0) {
        prev = kInf;
        if (i > 0 && j > 0) prev = std::min(prev, at(i - 1, j - 1));
        if (i > 0) prev = std::min(prev, at(i - 1, j));
        if (j > 0) prev = std::min(prev, at(i, j - 1));
      }
      at(i, j) = prev + cost(i, j);
    }
  }

  Alignment out;
  out.cost = at(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  out.pairs.push_back({i, j});
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    out.pairs.push_back({i, j});
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  return out;
}

namespace {

std::vector<std::size_t> start_offsets(std::size_t n, std::size_t starts) {
  std::vector<std::size_t> offsets;
  if (starts == 0 || starts >= n) {
    offsets.resize(n);
    std::iota(offsets.begin(), offsets.end(), std::size_t{0});
    return offsets;
  }
  for (std::size_t k = 0; k < starts; ++k) offsets.push_back(k * n / starts);
  return offsets;
}

// Cost-only DTW on a precomputed point distance table, two rolling rows.
double dtw_cost_rotated(const std::vector<double>& dist, std::size_t n, std::size_t offset,
                        std::vector<double>& prev, std::vector<double>& cur) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = dist.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t bj = j + offset;
      if (bj >= n) bj -= n;
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0) {
          best = std::min(best, prev[j]);
          if (j > 0) best = std::min(best, prev[j - 1]);
        }
        if (j > 0) best = std::min(best, cur[j - 1]);
      }
      cur[j] = best + row[bj];
    }
    std::swap(prev, cur);
  }
  return prev[n - 1];
}

std::vector<double> point_distances(const NormalizedCycle& a, const NormalizedCycle& b) {
  const std::size_t n = a.size();
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[i * n + j] = std::hypot(a.points[i].x - b.points[j].x, a.points[i].y - b.points[j].y);
    }
  }
  return dist;
}

std::pair<double, std::size_t> best_rotation(const NormalizedCycle& a, const NormalizedCycle& b,
                                             std::size_t starts) {
  if (a.size() != b.size() || a.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "dtw_align: cycles must have the same, non-zero size");
  }
  const std::size_t n = a.size();
  const auto dist = point_distances(a, b);
  std::vector<double> prev(n);
  std::vector<double> cur(n);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_offset = 0;
  for (std::size_t offset : start_offsets(n, starts)) {
    const double c = dtw_cost_rotated(dist, n, offset, prev, cur);
    if (c < best) {
      best = c;
      best_offset = offset;
    }
  }
  return {best, best_offset};
}

}  // namespace

Alignment dtw_align(const NormalizedCycle& a, const NormalizedCycle& b, std::size_t starts) {
  const auto [cost, offset] = best_rotation(a, b, starts);
  (void)cost;
  const std::size_t n = a.size();
  Alignment out = dtw(n, n, [&](std::size_t i, std::size_t j) {
    const Vec2 p = a.points[i];
    const Vec2 q = b.points[(j + offset) % n];
    return std::hypot(p.x - q.x, p.y - q.y);
  });
  out.offset = offset;
  return out;
}

double dtw_distance(const NormalizedCycle& a, const NormalizedCycle& b, std::size_t starts) {
  const double forward = best_rotation(a, b, starts).first;
  const double backward = best_rotation(b, a, starts).first;
  return std::min(forward, backward) / static_cast<double>(a.size());
}

Polyline as_polyline(const NormalizedCycle& c) { return {c.points, true}; }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const Vec2 q = a + ab * t;
  return std::hypot(p.x - q.x, p.y - q.y);
}

double project_match(std::span<const Vec2> points, std::span<const Polyline> targets) {
  if (targets.empty()) throw Error(ErrorKind::EmptyInput, "project_match: no targets");
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "project_match: no points");
  double total = 0.0;
  for (const Vec2& p : points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Polyline& line : targets) {
      const auto& v = line.points;
      if (v.size() == 1) best = std::min(best, std::hypot(p.x - v[0].x, p.y - v[0].y));
      const std::size_t segments = line.closed ? v.size() : (v.empty() ? 0 : v.size() - 1);
      for (std::size_t s = 0; s < segments && v.size() > 1; ++s) {
        best = std::min(best, point_segment_distance(p, v[s], v[(s + 1) % v.size()]));
      }
    }
    total += best;
  }
  return total / static_cast<double>(points.size());
}

double project_match(const NormalizedCycle& a, std::span<const NormalizedCycle> targets) {
  std::vector<Polyline> lines;
  for (const auto& t : targets) lines.push_back(as_polyline(t));
  return project_match(a.points, lines);
}

namespace {

double symmetric_projection(std::span<const NormalizedCycle> a, std::span<const NormalizedCycle> b) {
  std::vector<Vec2> a_points;
  std::vector<Vec2> b_points;
  std::vector<Polyline> a_lines;
  std::vector<Polyline> b_lines;
  for (const auto& c : a) {
    a_points.insert(a_points.end(), c.points.begin(), c.points.end());
    a_lines.push_back(as_polyline(c));
  }
  for (const auto& c : b) {
    b_points.insert(b_points.end(), c.points.begin(), c.points.end());
    b_lines.push_back(as_polyline(c));
  }
  return std::max(project_match(a_points, b_lines), project_match(b_points, a_lines));
}

}  // namespace

double match_broken(std::span<const NormalizedCycle> parts, const NormalizedCycle& whole) {
  if (parts.empty()) throw Error(ErrorKind::EmptyInput, "match_broken: no parts");
  return symmetric_projection(std::span<const NormalizedCycle>(&whole, 1), parts);
}

DistanceMatrix distance_matrix(std::size_t n,
                               const std::function<double(std::size_t, std::size_t)>& distance,
                               unsigned threads) {
  DistanceMatrix m;
  m.n = n;
  m.values.assign(n * n, 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < n; i += threads) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = distance(i, j);
        m.values[i * n + j] = d;
        m.values[j * n + i] = d;
      }
    }
  };
  if (threads <= 1) {
    work(0);
    return m;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  return m;
}

int Clustering::cluster_count() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

Clustering single_link(const DistanceMatrix& distances, double threshold) {
  const std::size_t n = distances.n;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distances.at(i, j) <= threshold) {
        const std::size_t ri = find(i);
        const std::size_t rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  Clustering out;
  out.threshold = threshold;
  out.labels.resize(n);
  std::map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.try_emplace(find(i), static_cast<int>(ids.size()));
    out.labels[i] = it->second;
  }
  return out;
}

namespace {

double cycle_distance(const NormalizedCycle& a, const NormalizedCycle& b, const ClusterOptions& o) {
  const double d = dtw_distance(a, b, o.starts);
  if (o.metric == Metric::MinDtwBroken) {
    return std::min(d, match_broken(std::span<const NormalizedCycle>(&a, 1), b));
  }
  return d;
}

}  // namespace

Clustering cluster(std::span<const NormalizedCycle> outlines, double threshold,
                   const ClusterOptions& options) {
  const auto m = distance_matrix(
      outlines.size(),
      [&](std::size_t i, std::size_t j) { return cycle_distance(outlines[i], outlines[j], options); },
      options.threads);
  return single_link(m, threshold);
}

double shape_distance(const Shape& a, const Shape& b, const ClusterOptions& options) {
  if (a.parts.empty() || b.parts.empty()) throw Error(ErrorKind::EmptyInput, "shape_distance: empty shape");
  if (a.parts.size() != b.parts.size()) return symmetric_projection(a.parts, b.parts);
  double total = 0.0;
  for (std::size_t k = 0; k < a.parts.size(); ++k) {
    total += cycle_distance(a.parts[k], b.parts[k], options);
  }
  return total / static_cast<double>(a.parts.size());
}

Clustering cluster_shapes(std::span<const Shape> shapes, double threshold,
                          const ClusterOptions& options) {
  const auto m = distance_matrix(
      shapes.size(),
      [&](std::size_t i, std::size_t j) { return shape_distance(shapes[i], shapes[j], options); },
      options.threads);
  return single_link(m, threshold);
}

double cluster_purity(std::span<const int> labels, std::span<const int> classes) {
  if (labels.size() != classes.size() || labels.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cluster_purity: label/class size mismatch");
  }
  std::map<int, std::map<int, std::size_t>> counts;
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[labels[i]][classes[i]];
  std::size_t majority = 0;
  for (const auto& [label, per_class] : counts) {
    std::size_t best = 0;
    for (const auto& [cls, c] : per_class) best = std::max(best, c);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(labels.size());
}

std::string distance_matrix_csv(const DistanceMatrix& m, std::span<const std::string> ids) {
  if (ids.size() != m.n) throw Error(ErrorKind::InvalidArgument, "csv: id count mismatch");
  std::string out = "id";
  for (const auto& id : ids) out += "," + id;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.n; ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < m.n; ++j) {
      std::snprintf(buf, sizeof buf, ",%.9g", m.at(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Clustering& c) {
  return {{"threshold", c.threshold}, {"labels", c.labels}};
}

}  // namespace scriptorium
