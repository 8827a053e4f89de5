#include "jloc/road_graph.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "jloc/error.hpp"

namespace jloc {

void RoadGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) return;
  edges.emplace(std::min(a, b), std::max(a, b));
}

std::map<NodeId, int> RoadGraph::degrees() const {
  std::map<NodeId, int> deg;
  for (const auto& [id, node] : nodes) deg[id] = 0;
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

RoadGraph load_road_graph(const std::filesystem::path& path, const LocalProjection& projection) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open road graph " + path.string());

  RoadGraph g;
  std::vector<std::pair<std::pair<NodeId, NodeId>, int>> pending_edges;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    const auto where = [&] { return fmt::format("{}:{}", path.string(), lineno); };
    std::string rest;
    if (tag == "N") {
      NodeId id;
      GraphNode node;
      if (!(ss >> id >> node.geo.lat >> node.geo.lon) || (ss >> rest)) {
        throw ParseError(where() + ": expected 'N <id> <lat> <lon>'");
      }
      node.xy = projection.forward(node.geo);
      auto [it, inserted] = g.nodes.emplace(id, node);
      if (!inserted && !(it->second.geo == node.geo)) {
        throw ParseError(fmt::format("{}: node {} redefined with different coordinates", where(), id));
      }
    } else if (tag == "E") {
      NodeId a, b;
      if (!(ss >> a >> b) || (ss >> rest)) throw ParseError(where() + ": expected 'E <id1> <id2>'");
      pending_edges.push_back({{a, b}, lineno});
    } else {
      throw ParseError(where() + ": unknown record '" + tag + "'");
    }
  }
  for (const auto& [e, lineno] : pending_edges) {
    for (NodeId id : {e.first, e.second}) {
      if (!g.nodes.count(id)) {
        throw ParseError(fmt::format("{}:{}: edge references unknown node {}", path.string(), lineno, id));
      }
    }
    g.add_edge(e.first, e.second);
  }
  return g;
}

void write_road_graph(const std::filesystem::path& path, const RoadGraph& graph) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "# road graph: N <id> <lat> <lon> / E <id1> <id2>\n";
  for (const auto& [id, n] : graph.nodes) out << fmt::format("N {} {:.12f} {:.12f}\n", id, n.geo.lat, n.geo.lon);
  for (const auto& [a, b] : graph.edges) out << fmt::format("E {} {}\n", a, b);
}

IntersectionNodeSet extract_intersection_nodes(const RoadGraph& graph) {
  IntersectionNodeSet out;
  for (const auto& [id, deg] : graph.degrees()) {
    if (deg >= 3) out.push_back({id, graph.nodes.at(id).xy});
  }
  return out;
}

}  // namespace jloc
