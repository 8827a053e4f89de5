#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "jloc/geometry.hpp"
#include "jloc/projection.hpp"

namespace jloc {

using NodeId = std::int64_t;

struct GraphNode {
  GeodeticPoint geo;
  Vec2 xy = Vec2::Zero();  // projected [m]
};

/// Undirected road graph. Edges are stored once with the smaller id first.
struct RoadGraph {
  std::map<NodeId, GraphNode> nodes;
  std::set<std::pair<NodeId, NodeId>> edges;

  /// Inserts a normalized edge; self-loops are ignored.
  void add_edge(NodeId a, NodeId b);
  std::map<NodeId, int> degrees() const;
};

struct IntersectionNode {
  NodeId id = 0;
  Vec2 position = Vec2::Zero();
};

/// Nodes of degree >= 3, sorted by id.
using IntersectionNodeSet = std::vector<IntersectionNode>;

/// Reads the road-graph interchange format:
///   N <id> <lat> <lon>
///   E <id1> <id2>
/// '#' starts a comment. Duplicate edges collapse; dangling endpoints throw.
RoadGraph load_road_graph(const std::filesystem::path& path, const LocalProjection& projection);
void write_road_graph(const std::filesystem::path& path, const RoadGraph& graph);

IntersectionNodeSet extract_intersection_nodes(const RoadGraph& graph);

}  // namespace jloc
