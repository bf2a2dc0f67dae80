#include <doctest.h>

#include <algorithm>
#include <random>

#include "scriptorium/error.hpp"
#include "scriptorium/outlines.hpp"
#include "support/oracles.hpp"

using namespace scriptorium;
namespace oracle = scriptorium::testing;

namespace {

Blob only_blob(const BinaryImage& img) {
  auto blobs = extract_blobs(img, 8);
  REQUIRE(blobs.size() == 1);
  return blobs[0];
}

BlobOutline canonical(BlobOutline o) {
  canonicalize(o);
  return o;
}

int outer_count(const BlobOutline& o) {
  return static_cast<int>(std::count_if(o.cycles.begin(), o.cycles.end(), [](const auto& c) { return c.orientation == 1; }));
}

long long area_sum(const BlobOutline& o) {
  long long s = 0;
  for (const auto& c : o.cycles) s += c.signed_area;
  return s;
}

// Every cycle must be closed with unit axis-aligned steps and ink on its left.
void check_cycle_shape(const OutlineCycle& c, const BinaryImage& mask) {
  const std::size_t n = c.vertices.size();
  REQUIRE(n >= 4);
  CHECK(c.signed_area == shoelace_area(c.vertices));
  CHECK((c.signed_area > 0) == (c.orientation == 1));
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = c.vertices[i];
    const Point b = c.vertices[(i + 1) % n];
    const int dx = b.x - a.x;
    const int dy = b.y - a.y;
    REQUIRE(std::abs(dx) + std::abs(dy) == 1);
    // Pixel on the left of travel (-dy, dx) is ink, pixel on the right is not.
    const int lx = std::min(a.x, b.x) - (dy > 0 ? 1 : 0);
    const int ly = std::min(a.y, b.y) - (dx < 0 ? 1 : 0);
    const int rx = std::min(a.x, b.x) - (dy < 0 ? 1 : 0);
    const int ry = std::min(a.y, b.y) - (dx > 0 ? 1 : 0);
    CHECK(mask.get(lx, ly));
    CHECK_FALSE(mask.get(rx, ry));
  }
}

}  // namespace

TEST_CASE("single pixel outline") {
  BinaryImage img(3, 3);
  img.set(1, 1, true);
  for (auto trace : {trace_graph, trace_sweep}) {
    const auto o = trace(only_blob(img));
    REQUIRE(o.cycles.size() == 1);
    CHECK(o.cycles[0].vertices.size() == 4);
    CHECK(o.cycles[0].signed_area == 1);
    CHECK(rasterize(o, 3, 3) == img);
  }
}

TEST_CASE("solid rectangle has perimeter 2(w+h)") {
  for (int w = 1; w <= 6; ++w) {
    for (int h = 1; h <= 5; ++h) {
      BinaryImage img(w + 2, h + 2);
      for (int y = 1; y <= h; ++y) {
        for (int x = 1; x <= w; ++x) img.set(x, y, true);
      }
      const auto o = trace_graph(only_blob(img));
      REQUIRE(o.cycles.size() == 1);
      CHECK(o.cycles[0].vertices.size() == static_cast<std::size_t>(2 * (w + h)));
      CHECK(o.cycles[0].signed_area == w * h);
    }
  }
}

TEST_CASE("square minus centre has one hole") {
  BinaryImage img(5, 5);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) img.set(x, y, !(x == 2 && y == 2));
  }
  for (auto trace : {trace_graph, trace_sweep}) {
    const auto o = canonical(trace(only_blob(img)));
    REQUIRE(o.cycles.size() == 2);
    CHECK(o.cycles[0].signed_area == 9);
    CHECK(o.cycles[0].orientation == 1);
    CHECK(o.cycles[1].signed_area == -1);
    CHECK(o.cycles[1].orientation == -1);
    CHECK(area_sum(o) == 8);
    CHECK(rasterize(o, 5, 5) == img);
  }
}

TEST_CASE("thin ring gives outer and inner cycle") {
  BinaryImage img(8, 8);
  for (int i = 1; i <= 6; ++i) {
    img.set(i, 1, true);
    img.set(i, 6, true);
    img.set(1, i, true);
    img.set(6, i, true);
  }
  const auto a = canonical(trace_graph(only_blob(img)));
  const auto b = canonical(trace_sweep(only_blob(img)));
  CHECK(a == b);
  REQUIRE(a.cycles.size() == 2);
  CHECK(outer_count(a) == 1);
  CHECK(area_sum(a) == 20);
}

TEST_CASE("diagonal touch stays in one cycle") {
  BinaryImage img(4, 4);
  img.set(1, 1, true);
  img.set(2, 2, true);
  const auto o = trace_graph(only_blob(img));
  REQUIRE(o.cycles.size() == 1);
  CHECK(o.cycles[0].vertices.size() == 8);
  CHECK(rasterize(o, 4, 4) == img);
}

TEST_CASE("random blobs: lossless, conserving, both tracers agree") {
  const auto blobs = oracle::random_blobs(1234, 120);
  for (const auto& blob : blobs) {
    const int w = blob.bbox.x1 + 2;
    const int h = blob.bbox.y1 + 2;
    const BinaryImage mask = oracle::blob_mask(blob, w, h);
    const auto g = trace_graph(blob);
    const auto s = trace_sweep(blob);
    CHECK(rasterize(g, w, h) == mask);
    CHECK(rasterize(s, w, h) == mask);
    CHECK(area_sum(g) == static_cast<long long>(blob.area));
    CHECK(area_sum(s) == static_cast<long long>(blob.area));
    CHECK(outer_count(g) == 1);
    CHECK(static_cast<int>(g.cycles.size()) - 1 == oracle::count_holes(mask));
    CHECK(canonical(g) == canonical(s));
    for (const auto& c : g.cycles) check_cycle_shape(c, mask);
  }
}

TEST_CASE("canonical form starts at the smallest vertex") {
  const auto blobs = oracle::random_blobs(9, 20);
  for (const auto& blob : blobs) {
    const auto o = canonical(trace_graph(blob));
    for (const auto& c : o.cycles) CHECK(c.vertices.front() == *std::min_element(c.vertices.begin(), c.vertices.end()));
    CHECK(std::is_sorted(o.cycles.begin(), o.cycles.end(),
                         [](const auto& a, const auto& b) { return a.vertices.front() < b.vertices.front(); }));
  }
}

TEST_CASE("rasterize rejects vertices outside the canvas") {
  BinaryImage img(5, 5);
  img.set(4, 4, true);
  const auto o = trace_graph(only_blob(img));
  CHECK_THROWS_AS(rasterize(o, 4, 4), Error);
}

TEST_CASE("chain code round trip") {
  std::mt19937_64 rng(77);
  const BinaryImage img = oracle::random_image(rng, 60, 40, 0.45, 2);
  const auto seg = segment_page(img, SegParams{});
  auto outlines = trace_page(seg);
  for (auto& o : outlines) canonicalize(o);
  const auto bytes = encode_chain_code(60, 40, outlines);
  const ChainCodeFile file = decode_chain_code(bytes);
  CHECK(file.width == 60);
  CHECK(file.height == 40);
  REQUIRE(file.outlines.size() == outlines.size());
  BinaryImage rebuilt(60, 40);
  for (std::size_t i = 0; i < outlines.size(); ++i) {
    CHECK(file.outlines[i].blob_id == outlines[i].blob_id);
    REQUIRE(file.outlines[i].cycles.size() == outlines[i].cycles.size());
    for (std::size_t k = 0; k < outlines[i].cycles.size(); ++k) {
      CHECK(file.outlines[i].cycles[k].vertices == outlines[i].cycles[k].vertices);
      CHECK(file.outlines[i].cycles[k].signed_area == outlines[i].cycles[k].signed_area);
    }
    const BinaryImage part = rasterize(file.outlines[i], 60, 40);
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 60; ++x) {
        if (part.at(x, y)) rebuilt.set(x, y, true);
      }
    }
  }
  CHECK(rebuilt == img);
}

TEST_CASE("chain code decoder rejects damage") {
  BinaryImage img(4, 4);
  img.set(1, 1, true);
  const auto o = trace_graph(only_blob(img));
  auto bytes = encode_chain_code(4, 4, std::span(&o, 1));
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_chain_code(truncated), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_chain_code(trailing), Error);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_chain_code(magic), Error);
  auto open = bytes;
  open.back() ^= 0x01;  // the last step no longer returns to the start
  CHECK_THROWS_AS(decode_chain_code(open), Error);
}

TEST_CASE("compression ratio on extreme pages") {
  BinaryImage img(1000, 1000);
  img.set(500, 500, true);
  const auto seg = segment_page(img, SegParams{});
  const auto report = compression_ratio(1000, 1000, trace_page(seg));
  CHECK(report.bitmap_bytes == 125000);
  CHECK(report.ratio > 1000.0);

  const BinaryImage full(64, 64, true);
  const auto solid = compression_ratio(64, 64, trace_page(segment_page(full, SegParams{})));
  CHECK(solid.ratio > 0.0);

  CHECK_THROWS_AS(compression_ratio(10, 10, {}), Error);
}
