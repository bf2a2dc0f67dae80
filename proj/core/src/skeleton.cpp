#include "scriptorium/skeleton.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scriptorium/error.hpp"

namespace scriptorium {

namespace {

// Neighbour order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

int neighbourhood(const BinaryImage& img, int x, int y) {
  int code = 0;
  for (int k = 0; k < 8; ++k) {
    if (img.get(x + kDx[k], y + kDy[k])) code |= 1 << k;
  }
  return code;
}

// Simple-point table for (8,4) topology, computed by brute force over the
// 3x3 window: one 8-component of ink among the neighbours and exactly one
// 4-component of background touching the centre's 4-neighbours.
std::array<bool, 256> build_simple_table() {
  std::array<bool, 256> table{};
  for (int code = 0; code < 256; ++code) {
    auto on = [&](int k) { return ((code >> k) & 1) != 0; };
    auto adjacent8 = [&](int a, int b) {
      return std::abs(kDx[a] - kDx[b]) <= 1 && std::abs(kDy[a] - kDy[b]) <= 1;
    };
    auto adjacent4 = [&](int a, int b) {
      return std::abs(kDx[a] - kDx[b]) + std::abs(kDy[a] - kDy[b]) == 1;
    };
    auto components = [&](bool ink, bool four, bool touching_only) {
      std::array<int, 8> comp{};
      comp.fill(-1);
      int count = 0;
      for (int s = 0; s < 8; ++s) {
        if (on(s) != ink || comp[s] >= 0) continue;
        std::array<int, 8> stack{};
        int top = 0;
        stack[top++] = s;
        comp[s] = count;
        bool touches = false;
        while (top > 0) {
          const int c = stack[--top];
          if (kDx[c] == 0 || kDy[c] == 0) touches = true;
          for (int t = 0; t < 8; ++t) {
            if (on(t) != ink || comp[t] >= 0) continue;
            if (four ? !adjacent4(c, t) : !adjacent8(c, t)) continue;
            comp[t] = count;
            stack[top++] = t;
          }
        }
        if (!touching_only || touches) ++count;
      }
      return count;
    };
    table[code] = components(true, false, false) == 1 && components(false, true, true) == 1;
  }
  return table;
}

const std::array<bool, 256>& simple_table() {
  static const std::array<bool, 256> table = build_simple_table();
  return table;
}

bool is_simple_code(int code) { return simple_table()[static_cast<std::size_t>(code)]; }

int ink_neighbours(int code) { return __builtin_popcount(static_cast<unsigned>(code)); }

// Number of 0 -> 1 transitions in the circular sequence P2, P3, ..., P9, P2.
int transitions(int code) {
  int count = 0;
  for (int k = 0; k < 8; ++k) {
    const bool a = (code >> k) & 1;
    const bool b = (code >> ((k + 1) % 8)) & 1;
    if (!a && b) ++count;
  }
  return count;
}

bool zhang_suen_candidate(int code, int pass) {
  auto p = [&](int index) { return ((code >> (index - 2)) & 1) != 0; };
  const int b = ink_neighbours(code);
  if (b < 2 || b > 6 || transitions(code) != 1) return false;
  if (pass == 0) return !(p(2) && p(4) && p(6)) && !(p(4) && p(6) && p(8));
  return !(p(2) && p(4) && p(8)) && !(p(2) && p(6) && p(8));
}

bool deletable(const BinaryImage& img, int x, int y) {
  const int code = neighbourhood(img, x, y);
  return ink_neighbours(code) >= 2 && simple_table()[static_cast<std::size_t>(code)];
}

bool full_block(const BinaryImage& m, int x, int y) {
  return m.get(x, y) && m.get(x + 1, y) && m.get(x, y + 1) && m.get(x + 1, y + 1);
}

// Full 2x2 blocks among the windows that contain p or q.
int blocks_near(const BinaryImage& m, Point p, Point q) {
  int count = 0;
  for (int y = std::min(p.y, q.y) - 1; y <= std::max(p.y, q.y); ++y) {
    for (int x = std::min(p.x, q.x) - 1; x <= std::max(p.x, q.x); ++x) {
      const bool has_p = p.x - x >= 0 && p.x - x <= 1 && p.y - y >= 0 && p.y - y <= 1;
      const bool has_q = q.x - x >= 0 && q.x - x <= 1 && q.y - y >= 0 && q.y - y <= 1;
      if ((has_p || has_q) && full_block(m, x, y)) ++count;
    }
  }
  return count;
}

// Removes the full block at (x, y) by moving one of its pixels to a
// neighbouring source pixel q: add q, then delete the block pixel, both as
// simple-point changes so topology is kept. If the move creates a new block
// at q, up to `depth` further moves may clear it. Returns false with the mask
// unchanged when the block count cannot be lowered.
// Full 2x2 blocks whose top-left corner lies in [x0, x1] x [y0, y1].
int blocks_in(const BinaryImage& m, int x0, int y0, int x1, int y1) {
  int count = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) count += full_block(m, x, y) ? 1 : 0;
  }
  return count;
}

// Applies the flips in order if every one is a simple-point change (a
// deletion must also keep at least two ink neighbours). Leaves the mask
// unchanged and returns false otherwise.
bool apply_simple_sequence(BinaryImage& mask, std::span<const Point> flips) {
  std::size_t done = 0;
  for (; done < flips.size(); ++done) {
    const Point p = flips[done];
    const bool ok = mask.at(p.x, p.y) ? deletable(mask, p.x, p.y) : is_simple_code(neighbourhood(mask, p.x, p.y));
    if (!ok) break;
    mask.set(p.x, p.y, !mask.at(p.x, p.y));
  }
  if (done == flips.size()) return true;
  while (done-- > 0) mask.set(flips[done].x, flips[done].y, !mask.at(flips[done].x, flips[done].y));
  return false;
}

// Wider fallback for resolve_block: ordered sequences of up to three
// simple-point flips among source pixels within two pixels of the block.
bool resolve_block_window(BinaryImage& mask, const BinaryImage& source, int x, int y) {
  std::vector<Point> cand;
  for (int cy = y - 2; cy <= y + 3; ++cy) {
    for (int cx = x - 2; cx <= x + 3; ++cx) {
      if (source.get(cx, cy)) cand.push_back({cx, cy});
    }
  }
  const int before = blocks_in(mask, x - 3, y - 3, x + 3, y + 3);
  std::vector<Point> seq;
  const std::function<bool(std::size_t)> search = [&](std::size_t len) -> bool {
    if (seq.size() == len) {
      if (!apply_simple_sequence(mask, seq)) return false;
      if (blocks_in(mask, x - 3, y - 3, x + 3, y + 3) < before) return true;
      for (auto it = seq.rbegin(); it != seq.rend(); ++it) mask.set(it->x, it->y, !mask.at(it->x, it->y));
      return false;
    }
    for (const Point& c : cand) {
      if (std::find(seq.begin(), seq.end(), c) != seq.end()) continue;
      seq.push_back(c);
      if (search(len)) return true;
      seq.pop_back();
    }
    return false;
  };
  for (std::size_t len = 2; len <= 3; ++len) {
    if (search(len)) return true;
  }
  return false;
}

bool resolve_block(BinaryImage& mask, const BinaryImage& source, int x, int y, int depth) {
  const std::array<Point, 4> cell = {Point{x, y}, Point{x + 1, y}, Point{x, y + 1}, Point{x + 1, y + 1}};
  for (const Point& p : cell) {
    if (deletable(mask, p.x, p.y)) {
      mask.set(p.x, p.y, false);
      return true;
    }
  }
  for (const Point& p : cell) {
    for (int k = 0; k < 8; ++k) {
      const Point q{p.x + kDx[k], p.y + kDy[k]};
      if (!source.get(q.x, q.y) || mask.at(q.x, q.y)) continue;
      if (!is_simple_code(neighbourhood(mask, q.x, q.y))) continue;
      const int before = blocks_near(mask, p, q);
      mask.set(q.x, q.y, true);
      if (!deletable(mask, p.x, p.y)) {
        mask.set(q.x, q.y, false);
        continue;
      }
      mask.set(p.x, p.y, false);
      const int after = blocks_near(mask, p, q);
      if (after < before) return true;
      if (after == before && depth > 0) {
        const BinaryImage saved = mask;
        for (int by = q.y - 1; by <= q.y; ++by) {
          for (int bx = q.x - 1; bx <= q.x; ++bx) {
            if (full_block(mask, bx, by) && resolve_block(mask, source, bx, by, depth - 1)) return true;
          }
        }
        mask = saved;
      }
      mask.set(p.x, p.y, true);
      mask.set(q.x, q.y, false);
    }
  }
  return false;
}

std::vector<Point> graph_neighbours(const BinaryImage& m, int x, int y) {
  std::vector<Point> out;
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kDx[k];
    const int ny = y + kDy[k];
    if (!m.get(nx, ny)) continue;
    const bool diagonal = kDx[k] != 0 && kDy[k] != 0;
    if (diagonal && (m.get(x + kDx[k], y) || m.get(x, y + kDy[k]))) continue;
    out.push_back({nx, ny});
  }
  return out;
}

int graph_degree_at(const BinaryImage& m, int x, int y) {
  return static_cast<int>(graph_neighbours(m, x, y).size());
}

// Removes branches of at most kSpur pixels that run from an endpoint to a
// junction. The junction degree is checked again before each removal, so of
// two short prongs on a fork only one goes.
bool prune_spurs(BinaryImage& mask) {
  bool changed = false;
  constexpr int kSpur = 2;
  std::vector<Point> ends;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) && graph_degree_at(mask, x, y) == 1) ends.push_back({x, y});
    }
  }
  for (const Point& end : ends) {
    if (!mask.at(end.x, end.y) || graph_degree_at(mask, end.x, end.y) != 1) continue;
    std::vector<Point> spur{end};
    Point prev{-1, -1};
    Point cur = end;
    bool reaches_junction = false;
    while (static_cast<int>(spur.size()) <= kSpur) {
      Point next = cur;
      for (const Point& n : graph_neighbours(mask, cur.x, cur.y)) {
        if (n != prev) {
          next = n;
          break;
        }
      }
      if (next == cur) break;
      const int d = graph_degree_at(mask, next.x, next.y);
      if (d >= 3) {
        reaches_junction = true;
        break;
      }
      if (d != 2) break;
      prev = cur;
      cur = next;
      spur.push_back(cur);
    }
    if (!reaches_junction || static_cast<int>(spur.size()) > kSpur) continue;
    for (const Point& p : spur) {
      if (!is_simple_code(neighbourhood(mask, p.x, p.y))) break;
      mask.set(p.x, p.y, false);
      changed = true;
    }
  }
  return changed;
}

}  // namespace

bool is_simple_point(const BinaryImage& img, int x, int y) {
  return simple_table()[static_cast<std::size_t>(neighbourhood(img, x, y))];
}

std::optional<Point> find_full_block(const BinaryImage& img) {
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (img.at(x, y) && img.at(x + 1, y) && img.at(x, y + 1) && img.at(x + 1, y + 1)) {
        return Point{x, y};
      }
    }
  }
  return std::nullopt;
}

Skeleton skeletonize(const BinaryImage& img) {
  if (img.empty()) return {img};
  BinaryImage mask = img;
  std::vector<Point> candidates;

  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      candidates.clear();
      for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
          if (mask.at(x, y) && zhang_suen_candidate(neighbourhood(mask, x, y), pass)) {
            candidates.push_back({x, y});
          }
        }
      }
      for (const Point& p : candidates) {
        if (deletable(mask, p.x, p.y)) {
          mask.set(p.x, p.y, false);
          changed = true;
        }
      }
    }
  }

  // Break leftover 2x2 blocks. Pruning a spur can make a block pixel
  // simple, so both passes repeat until neither changes anything. Blocks
  // that survive resisted every simple-point move tried; some are forced,
  // e.g. four holes meeting at one 2x2 cell.
  for (bool pruned = true; pruned;) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (int y = 0; y + 1 < mask.height(); ++y) {
        for (int x = 0; x + 1 < mask.width(); ++x) {
          if (!full_block(mask, x, y)) continue;
          const bool done = resolve_block(mask, img, x, y, 3) || resolve_block_window(mask, img, x, y);
          progress = progress || done;
        }
      }
    }
    pruned = prune_spurs(mask);
  }

  return {std::move(mask)};
}


int graph_degree(const BinaryImage& mask, int x, int y) { return graph_degree_at(mask, x, y); }

SkeletonGraph to_graph(const Skeleton& s) {
  const BinaryImage& m = s.mask;
  if (auto block = find_full_block(m)) {
    throw Error(ErrorKind::NotThin, "skeleton is not thin: full 2x2 block at (" +
                                        std::to_string(block->x) + "," + std::to_string(block->y) + ")");
  }

  SkeletonGraph g;
  if (m.empty()) return g;
  const int w = m.width();
  std::vector<int> node_at(static_cast<std::size_t>(w) * m.height(), -1);
  std::vector<std::uint8_t> used(node_at.size(), 0);
  auto idx = [&](Point p) { return static_cast<std::size_t>(p.y) * w + p.x; };

  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < m.height(); ++y) {
      if (!m.at(x, y)) continue;
      const int degree = graph_degree(m, x, y);
      if (degree != 2) {
        node_at[idx({x, y})] = static_cast<int>(g.nodes.size());
        g.nodes.push_back({{x, y}, degree});
      }
    }
  }

  // Follows degree-2 pixels from `from` through `first` until a node.
  auto walk = [&](Point from, Point first, std::vector<Point>& path) {
    Point prev = from;
    Point cur = first;
    while (node_at[idx(cur)] < 0) {
      used[idx(cur)] = 1;
      path.push_back(cur);
      Point next = cur;
      for (const Point& n : graph_neighbours(m, cur.x, cur.y)) {
        if (n != prev) {
          next = n;
          break;
        }
      }
      prev = cur;
      cur = next;
    }
    path.push_back(cur);
    return node_at[idx(cur)];
  };

  std::map<std::pair<int, int>, bool> direct;
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    const Point start = g.nodes[a].at;
    for (const Point& n : graph_neighbours(m, start.x, start.y)) {
      if (node_at[idx(n)] >= 0) {
        const int b = node_at[idx(n)];
        const std::pair<int, int> key{std::min(static_cast<int>(a), b), std::max(static_cast<int>(a), b)};
        if (direct.emplace(key, true).second) {
          g.edges.push_back({key.first, key.second,
                             key.first == static_cast<int>(a) ? std::vector<Point>{start, n}
                                                             : std::vector<Point>{n, start}});
        }
        continue;
      }
      if (used[idx(n)]) continue;
      std::vector<Point> path{start};
      const int b = walk(start, n, path);
      g.edges.push_back({static_cast<int>(a), b, std::move(path)});
    }
  }

  // Closed curves without any node: anchor at the smallest pixel. The
  // column-major scan visits pixels in (x, y) order, so the first unused
  // pixel found is that minimum.
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < m.height(); ++y) {
      const Point p{x, y};
      if (!m.at(x, y) || node_at[idx(p)] >= 0 || used[idx(p)]) continue;
      const int anchor = static_cast<int>(g.nodes.size());
      node_at[idx(p)] = anchor;
      g.nodes.push_back({p, 2});
      const auto nbrs = graph_neighbours(m, x, y);
      std::vector<Point> path{p};
      walk(p, nbrs.front(), path);
      g.edges.push_back({anchor, anchor, std::move(path)});
    }
  }
  return g;
}

nlohmann::json to_json(const SkeletonGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"x", n.at.x}, {"y", n.at.y}, {"degree", n.degree}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"path_len", e.path.size()}});
  return {{"nodes", nodes}, {"edges", edges}};
}

}  // namespace scriptorium
