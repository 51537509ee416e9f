#include "hybridplan/graph.hpp"

#include <algorithm>
#include <set>

#include "hybridplan/error.hpp"

namespace hybridplan {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotBiconnected: return "NotBiconnected";
    case ErrorCode::kNotPlanar: return "NotPlanar";
    case ErrorCode::kMismatchedRotation: return "MismatchedRotation";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kLeafNotPresent: return "LeafNotPresent";
    case ErrorCode::kLeafSetMismatch: return "LeafSetMismatch";
    case ErrorCode::kNotJoinable: return "NotJoinable";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidSolution: return "InvalidSolution";
    case ErrorCode::kInvalidConstraint: return "InvalidConstraint";
    case ErrorCode::kMissingSideAnnotation: return "MissingSideAnnotation";
    case ErrorCode::kInvalidSideStructure: return "InvalidSideStructure";
    case ErrorCode::kNotAClique: return "NotAClique";
    case ErrorCode::kFrameNotBiconnected: return "FrameNotBiconnected";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInternalError: return "InternalError";
  }
  return "Unknown";
}

}  // namespace hybridplan

namespace hybridplan::graph {

void Graph::add_vertex(int id) {
  if (id < 0) throw Error(ErrorCode::kParseError, "negative vertex id");
  if (vertex_index_.contains(id)) {
    throw Error(ErrorCode::kParseError, "duplicate vertex id " + std::to_string(id));
  }
  vertex_index_.emplace(id, vertices_.size());
  vertices_.push_back(id);
  incidence_.emplace_back();
}

void Graph::add_edge(int id, int u, int v) {
  if (id < 0) throw Error(ErrorCode::kParseError, "negative edge id");
  if (edge_index_.contains(id)) {
    throw Error(ErrorCode::kParseError, "duplicate edge id " + std::to_string(id));
  }
  if (!has_vertex(u) || !has_vertex(v)) {
    throw Error(ErrorCode::kParseError, "edge " + std::to_string(id) + " has unknown endpoint");
  }
  if (u == v) throw Error(ErrorCode::kParseError, "self-loop on edge " + std::to_string(id));
  edge_index_.emplace(id, edges_.size());
  edges_.push_back({id, u, v});
  incidence_[vertex_index_.at(u)].push_back(id);
  incidence_[vertex_index_.at(v)].push_back(id);
  max_edge_id_ = std::max(max_edge_id_, id);
}

int Graph::add_edge(int u, int v) {
  const int id = max_edge_id_ + 1;
  add_edge(id, u, v);
  return id;
}

const Edge& Graph::edge(int id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) {
    throw Error(ErrorCode::kInternalError, "unknown edge id " + std::to_string(id));
  }
  return edges_[it->second];
}

std::span<const int> Graph::incident(int v) const {
  auto it = vertex_index_.find(v);
  if (it == vertex_index_.end()) {
    throw Error(ErrorCode::kInternalError, "unknown vertex id " + std::to_string(v));
  }
  return incidence_[it->second];
}

RotationSystem reflect(const RotationSystem& rs) {
  RotationSystem out;
  for (const auto& [v, order] : rs) {
    out[v] = std::vector<int>(order.rbegin(), order.rend());
  }
  return out;
}

std::optional<std::size_t> FlatClusteredGraph::cluster_of(int vertex) const {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& vs = clusters[i].vertices;
    if (std::find(vs.begin(), vs.end(), vertex) != vs.end()) return i;
  }
  return std::nullopt;
}

std::optional<int> FlatClusteredGraph::side_of(int edge, int endpoint) const {
  for (const auto& s : sides) {
    if (s.edge == edge && s.endpoint == endpoint) return s.side;
  }
  return std::nullopt;
}

bool FlatClusteredGraph::is_inter_cluster(const Edge& e) const {
  const auto cu = cluster_of(e.u);
  const auto cv = cluster_of(e.v);
  return !(cu && cv && *cu == *cv);
}

void FlatClusteredGraph::validate() const {
  std::set<int> seen;
  std::set<int> ids;
  for (const auto& c : clusters) {
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::kParseError, "duplicate cluster id " + std::to_string(c.id));
    }
    for (int v : c.vertices) {
      if (!graph.has_vertex(v)) {
        throw Error(ErrorCode::kParseError, "cluster vertex " + std::to_string(v) + " unknown");
      }
      if (!seen.insert(v).second) {
        throw Error(ErrorCode::kParseError, "clusters overlap at vertex " + std::to_string(v));
      }
    }
  }
  std::set<std::pair<int, int>> annotated;
  for (const auto& s : sides) {
    if (!graph.has_edge(s.edge)) {
      throw Error(ErrorCode::kParseError, "side annotation on unknown edge " + std::to_string(s.edge));
    }
    const Edge& e = graph.edge(s.edge);
    if (s.endpoint != e.u && s.endpoint != e.v) {
      throw Error(ErrorCode::kParseError, "side annotation endpoint is not on edge " + std::to_string(s.edge));
    }
    if (!is_inter_cluster(e)) {
      throw Error(ErrorCode::kParseError, "intra-cluster edge " + std::to_string(s.edge) + " carries a side");
    }
    if (!annotated.insert({s.edge, s.endpoint}).second) {
      throw Error(ErrorCode::kParseError, "duplicate side annotation on edge " + std::to_string(s.edge));
    }
  }
}

}  // namespace hybridplan::graph
