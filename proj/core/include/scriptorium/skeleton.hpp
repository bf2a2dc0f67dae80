#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "scriptorium/geometry.hpp"
#include "scriptorium/raster.hpp"

namespace scriptorium {

struct Skeleton {
  BinaryImage mask;
};

struct SkeletonNode {
  Point at;
  int degree = 0;
};

/// Pixel path between two nodes, endpoints included. A closed curve without
/// junctions becomes a self-loop on its anchor node (`a == b`) whose path
/// starts and ends at the anchor.
struct SkeletonEdge {
  int a = 0;
  int b = 0;
  std::vector<Point> path;
};

struct SkeletonGraph {
  std::vector<SkeletonNode> nodes;
  std::vector<SkeletonEdge> edges;
};

/// True when (x, y) is an 8-simple point: deleting it changes neither the
/// 8-connected ink components nor the 4-connected background components.
bool is_simple_point(const BinaryImage& img, int x, int y);

/// Top-left corner of the first fully set 2x2 block in raster order.
std::optional<Point> find_full_block(const BinaryImage& img);

/// Zhang-Suen two-subiteration thinning run to a fixpoint, then a pass that
/// breaks any remaining fully set 2x2 block. Candidates from each
/// subiteration are deleted one at a time and only while they are still
/// simple non-endpoints, so component and hole counts never change.
Skeleton skeletonize(const BinaryImage& img);

/// Neighbours used for the graph: the 4-neighbours plus those diagonal
/// neighbours not already reachable through a shared 4-neighbour.
int graph_degree(const BinaryImage& mask, int x, int y);

/// Nodes at pixels whose graph degree is not 2, plus one anchor (smallest
/// (x, y)) per junction-free closed curve. Throws Error{NotThin} naming the
/// first fully set 2x2 block.
SkeletonGraph to_graph(const Skeleton& s);

nlohmann::json to_json(const SkeletonGraph& g);

}  // namespace scriptorium
