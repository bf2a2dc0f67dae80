#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scriptorium/geometry.hpp"
#include "scriptorium/raster.hpp"
#include "scriptorium/segmentation.hpp"

namespace scriptorium {

/// Unit steps between pixel corners. South is +y (image rows grow downward).
enum class Direction : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

Point step(Point p, Direction d);

/// Closed boundary path on pixel corners. Pixel (x, y) covers the square
/// [x, x+1] x [y, y+1]. Ink is always on the left of the direction of travel
/// (left of (dx, dy) being (-dy, dx)), which makes outer boundaries positive
/// under the shoelace formula and hole boundaries negative.
struct OutlineCycle {
  std::vector<Point> vertices;
  int orientation = 1;
  long long signed_area = 0;

  friend bool operator==(const OutlineCycle&, const OutlineCycle&) = default;
};

struct BlobOutline {
  int blob_id = 0;
  std::vector<OutlineCycle> cycles;

  friend bool operator==(const BlobOutline&, const BlobOutline&) = default;
};

long long shoelace_area(std::span<const Point> vertices);

/// Builds the directed boundary-edge graph of the blob and walks its loops.
/// Ink is 8-connected, background 4-connected: where two ink pixels touch
/// only at a corner, the walk turns so that both stay on one cycle.
BlobOutline trace_graph(const Blob& blob);

/// Same contract as trace_graph, computed in a single row sweep that emits
/// boundary edges and stitches them into open chains until they close.
BlobOutline trace_sweep(const Blob& blob);

/// Rotates each cycle to start at its lexicographically smallest vertex
/// (ties broken by the full rotated sequence) and sorts the cycles.
void canonicalize(BlobOutline& outline);

/// Even-odd fill of all cycles. Throws Error{OutOfBounds} if a vertex lies
/// outside [0,width] x [0,height].
BinaryImage rasterize(const BlobOutline& outline, int width, int height);

std::vector<Direction> chain_directions(const OutlineCycle& cycle);

/// Chain-code container (see docs/chain-code.md for the byte layout).
struct ChainCodeFile {
  int width = 0;
  int height = 0;
  std::vector<BlobOutline> outlines;
};

std::vector<std::uint8_t> encode_chain_code(int width, int height,
                                            std::span<const BlobOutline> outlines);
ChainCodeFile decode_chain_code(std::span<const std::uint8_t> bytes);

struct CompressionReport {
  std::size_t bitmap_bytes = 0;
  std::size_t chain_code_bytes = 0;
  double ratio = 0.0;
};

/// 1-bit bitmap bytes (ceil(width*height/8)) over chain-code bytes.
/// Throws Error{EmptyInput} for a page without outlines.
CompressionReport compression_ratio(int width, int height, std::span<const BlobOutline> outlines);

std::vector<BlobOutline> trace_page(const PageSegmentation& page);

}  // namespace scriptorium
