#include "scriptorium/outlines.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_map>

#include "scriptorium/error.hpp"

namespace scriptorium {

Point step(Point p, Direction d) {
  switch (d) {
    case Direction::East: return {p.x + 1, p.y};
    case Direction::South: return {p.x, p.y + 1};
    case Direction::West: return {p.x - 1, p.y};
    case Direction::North: return {p.x, p.y - 1};
  }
  return p;
}

long long shoelace_area(std::span<const Point> vertices) {
  long long twice = 0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices[i];
    const Point b = vertices[(i + 1) % n];
    twice += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return twice / 2;
}

namespace {

Direction turn(Direction d, int quarter_turns) {
  return static_cast<Direction>((static_cast<int>(d) + quarter_turns) & 3);
}

// Preference at a vertex: right turn, straight, left turn. Taking the right
// turn first at a diagonal pinch keeps corner-touching ink on one cycle.
constexpr std::array<int, 3> kTurnPreference = {3, 0, 1};

// Blob pixels copied into a padded window so neighbour reads never go out
// of range and foreign blobs never leak in.
class LocalMask {
 public:
  explicit LocalMask(const Blob& blob)
      : x0_(blob.bbox.x0 - 1),
        y0_(blob.bbox.y0 - 1),
        w_(blob.bbox.width() + 2),
        h_(blob.bbox.height() + 2),
        bits_(static_cast<std::size_t>(w_) * h_, 0) {
    for (const Point& p : blob.pixels) bits_[(p.y - y0_) * w_ + (p.x - x0_)] = 1;
  }

  bool ink(int x, int y) const {
    const int lx = x - x0_;
    const int ly = y - y0_;
    if (lx < 0 || ly < 0 || lx >= w_ || ly >= h_) return false;
    return bits_[ly * w_ + lx] != 0;
  }

  // Boundary edge leaving vertex v in direction d, ink on its left.
  bool has_edge(Point v, Direction d) const {
    switch (d) {
      case Direction::East: return ink(v.x, v.y) && !ink(v.x, v.y - 1);
      case Direction::South: return ink(v.x - 1, v.y) && !ink(v.x, v.y);
      case Direction::West: return ink(v.x - 1, v.y - 1) && !ink(v.x - 1, v.y);
      case Direction::North: return ink(v.x, v.y - 1) && !ink(v.x - 1, v.y - 1);
    }
    return false;
  }

  Direction successor(Point v, Direction incoming) const {
    for (int q : kTurnPreference) {
      const Direction d = turn(incoming, q);
      if (has_edge(v, d)) return d;
    }
    throw Error(ErrorKind::Degenerate, "outline: boundary edge without successor");
  }

 private:
  int x0_;
  int y0_;
  int w_;
  int h_;
  std::vector<std::uint8_t> bits_;
};

std::uint64_t vertex_key(Point p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint32_t>(p.y);
}

std::uint64_t edge_key(Point p, Direction d) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x) & 0x7fffffffu) << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y) & 0x7fffffffu) << 2) |
         static_cast<std::uint64_t>(d);
}

OutlineCycle make_cycle(std::vector<Point> vertices) {
  OutlineCycle c;
  c.signed_area = shoelace_area(vertices);
  c.orientation = c.signed_area > 0 ? 1 : -1;
  c.vertices = std::move(vertices);
  return c;
}

struct Edge {
  Point start;
  Direction dir;
};

}  // namespace

BlobOutline trace_graph(const Blob& blob) {
  if (blob.pixels.empty()) throw Error(ErrorKind::EmptyInput, "trace_graph: empty blob");
  const LocalMask mask(blob);

  // Nodes are pixel corners; arcs are boundary edges with ink on the left.
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, std::array<int, 4>> outgoing;
  auto add = [&](Point start, Direction d) {
    auto [it, inserted] = outgoing.try_emplace(vertex_key(start));
    if (inserted) it->second.fill(-1);
    it->second[static_cast<int>(d)] = static_cast<int>(edges.size());
    edges.push_back({start, d});
  };
  for (const Point& p : blob.pixels) {
    if (!mask.ink(p.x, p.y - 1)) add({p.x, p.y}, Direction::East);
    if (!mask.ink(p.x + 1, p.y)) add({p.x + 1, p.y}, Direction::South);
    if (!mask.ink(p.x, p.y + 1)) add({p.x + 1, p.y + 1}, Direction::West);
    if (!mask.ink(p.x - 1, p.y)) add({p.x, p.y + 1}, Direction::North);
  }

  BlobOutline outline;
  outline.blob_id = blob.id;
  std::vector<bool> visited(edges.size(), false);
  for (std::size_t first = 0; first < edges.size(); ++first) {
    if (visited[first]) continue;
    std::vector<Point> vertices;
    std::size_t current = first;
    do {
      visited[current] = true;
      const Edge& e = edges[current];
      vertices.push_back(e.start);
      const Point end = step(e.start, e.dir);
      const auto& out = outgoing.at(vertex_key(end));
      int next = -1;
      for (int q : kTurnPreference) {
        next = out[static_cast<int>(turn(e.dir, q))];
        if (next >= 0) break;
      }
      if (next < 0) throw Error(ErrorKind::Degenerate, "trace_graph: open boundary");
      current = static_cast<std::size_t>(next);
    } while (current != first);
    outline.cycles.push_back(make_cycle(std::move(vertices)));
  }
  canonicalize(outline);
  return outline;
}

namespace {

struct Chain {
  std::deque<Point> starts;
  std::uint64_t head_key = 0;  // waiting for an edge that ends here
  std::uint64_t tail_key = 0;  // waiting for an edge that starts here
  bool alive = true;
};

class Stitcher {
 public:
  explicit Stitcher(const LocalMask& mask) : mask_(mask) {}

  void add(Point start, Direction dir) {
    const Point end = step(start, dir);
    const Direction next = mask_.successor(end, dir);
    const std::uint64_t my_head = edge_key(start, dir);
    const std::uint64_t my_tail = edge_key(end, next);

    const int before = take(tail_wait_, my_head);
    const int after = take(head_wait_, my_tail);

    if (before >= 0 && before == after) {
      Chain& c = chains_[static_cast<std::size_t>(before)];
      c.starts.push_back(start);
      closed_.emplace_back(c.starts.begin(), c.starts.end());
      c.alive = false;
      return;
    }
    if (before >= 0 && after >= 0) {
      Chain& a = chains_[static_cast<std::size_t>(before)];
      Chain& b = chains_[static_cast<std::size_t>(after)];
      a.starts.push_back(start);
      a.starts.insert(a.starts.end(), b.starts.begin(), b.starts.end());
      a.tail_key = b.tail_key;
      tail_wait_[a.tail_key] = before;
      b.alive = false;
      b.starts.clear();
      return;
    }
    if (before >= 0) {
      Chain& a = chains_[static_cast<std::size_t>(before)];
      a.starts.push_back(start);
      a.tail_key = my_tail;
      tail_wait_[my_tail] = before;
      return;
    }
    if (after >= 0) {
      Chain& b = chains_[static_cast<std::size_t>(after)];
      b.starts.push_front(start);
      b.head_key = my_head;
      head_wait_[my_head] = after;
      return;
    }
    const int id = static_cast<int>(chains_.size());
    Chain c;
    c.starts.push_back(start);
    c.head_key = my_head;
    c.tail_key = my_tail;
    chains_.push_back(std::move(c));
    head_wait_[my_head] = id;
    tail_wait_[my_tail] = id;
  }

  bool all_closed() const { return head_wait_.empty() && tail_wait_.empty(); }
  std::vector<std::vector<Point>> take_cycles() { return std::move(closed_); }

 private:
  static int take(std::unordered_map<std::uint64_t, int>& map, std::uint64_t key) {
    auto it = map.find(key);
    if (it == map.end()) return -1;
    const int id = it->second;
    map.erase(it);
    return id;
  }

  const LocalMask& mask_;
  std::vector<Chain> chains_;
  std::unordered_map<std::uint64_t, int> head_wait_;
  std::unordered_map<std::uint64_t, int> tail_wait_;
  std::vector<std::vector<Point>> closed_;
};

}  // namespace

BlobOutline trace_sweep(const Blob& blob) {
  if (blob.pixels.empty()) throw Error(ErrorKind::EmptyInput, "trace_sweep: empty blob");
  const LocalMask mask(blob);
  const BBox& box = blob.bbox;
  Stitcher stitcher(mask);

  for (int r = box.y0; r <= box.y1 + 1; ++r) {
    // Horizontal edges on lattice line y = r.
    for (int x = box.x0; x <= box.x1; ++x) {
      const bool below = mask.ink(x, r);
      const bool above = mask.ink(x, r - 1);
      if (below && !above) stitcher.add({x, r}, Direction::East);
      if (above && !below) stitcher.add({x + 1, r}, Direction::West);
    }
    if (r > box.y1) break;
    // Vertical edges inside pixel row r.
    for (int x = box.x0; x <= box.x1 + 1; ++x) {
      const bool left = mask.ink(x - 1, r);
      const bool right = mask.ink(x, r);
      if (left && !right) stitcher.add({x, r}, Direction::South);
      if (right && !left) stitcher.add({x, r + 1}, Direction::North);
    }
  }
  if (!stitcher.all_closed()) {
    throw Error(ErrorKind::Degenerate, "trace_sweep: unclosed boundary chain");
  }

  BlobOutline outline;
  outline.blob_id = blob.id;
  for (auto& vertices : stitcher.take_cycles()) outline.cycles.push_back(make_cycle(std::move(vertices)));
  canonicalize(outline);
  return outline;
}

void canonicalize(BlobOutline& outline) {
  for (OutlineCycle& c : outline.cycles) {
    auto& v = c.vertices;
    if (v.empty()) continue;
    const Point smallest = *std::min_element(v.begin(), v.end());
    const std::size_t n = v.size();
    std::size_t best = n;
    auto less_rotation = [&](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < n; ++k) {
        const Point pa = v[(a + k) % n];
        const Point pb = v[(b + k) % n];
        if (pa != pb) return pa < pb;
      }
      return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] != smallest) continue;
      if (best == n || less_rotation(i, best)) best = i;
    }
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(best), v.end());
  }
  std::sort(outline.cycles.begin(), outline.cycles.end(),
            [](const OutlineCycle& a, const OutlineCycle& b) { return a.vertices < b.vertices; });
}

std::vector<Direction> chain_directions(const OutlineCycle& cycle) {
  const auto& v = cycle.vertices;
  std::vector<Direction> dirs;
  dirs.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    const int dx = b.x - a.x;
    const int dy = b.y - a.y;
    if (dx == 1 && dy == 0) {
      dirs.push_back(Direction::East);
    } else if (dx == 0 && dy == 1) {
      dirs.push_back(Direction::South);
    } else if (dx == -1 && dy == 0) {
      dirs.push_back(Direction::West);
    } else if (dx == 0 && dy == -1) {
      dirs.push_back(Direction::North);
    } else {
      throw Error(ErrorKind::Degenerate, "outline cycle has a non-unit step");
    }
  }
  return dirs;
}

BinaryImage rasterize(const BlobOutline& outline, int width, int height) {
  const std::size_t stride = static_cast<std::size_t>(width) + 1;
  std::vector<std::uint8_t> toggles(stride * static_cast<std::size_t>(height), 0);
  for (const OutlineCycle& c : outline.cycles) {
    for (const Point& p : c.vertices) {
      if (p.x < 0 || p.y < 0 || p.x > width || p.y > height) {
        throw Error(ErrorKind::OutOfBounds, "rasterize: vertex (" + std::to_string(p.x) + "," +
                                                std::to_string(p.y) + ") outside the canvas");
      }
    }
    const auto dirs = chain_directions(c);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const Point a = c.vertices[i];
      if (dirs[i] == Direction::South) toggles[a.y * stride + a.x] ^= 1;
      if (dirs[i] == Direction::North) toggles[(a.y - 1) * stride + a.x] ^= 1;
    }
  }
  BinaryImage out(width, height);
  for (int y = 0; y < height; ++y) {
    std::uint8_t parity = 0;
    for (int x = 0; x < width; ++x) {
      parity ^= toggles[y * stride + x];
      out.set(x, y, parity != 0);
    }
  }
  return out;
}

std::vector<BlobOutline> trace_page(const PageSegmentation& page) {
  std::vector<BlobOutline> outlines;
  outlines.reserve(page.blobs.size());
  for (const Blob& b : page.blobs) outlines.push_back(trace_graph(b));
  return outlines;
}

}  // namespace scriptorium
