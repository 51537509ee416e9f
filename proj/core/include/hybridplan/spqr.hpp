#pragma once

#include <vector>

#include "hybridplan/graph.hpp"

namespace hybridplan::spqr {

enum class NodeType { kS, kP, kR };

struct SkeletonEdge {
  int id = -1;  // real edges keep their graph id; virtual ids are fresh
  int u = -1;
  int v = -1;
  bool is_virtual = false;
  int twin_node = -1;  // for virtual edges: the node holding the twin
};

struct SkeletonNode {
  NodeType type = NodeType::kR;
  std::vector<int> vertices;
  std::vector<SkeletonEdge> edges;

  bool contains(int vertex) const;
  // Indices into `edges` of the edges incident to `vertex`.
  std::vector<int> incident(int vertex) const;
  const SkeletonEdge& edge_by_id(int id) const;
};

// Triconnected component tree of a biconnected multigraph. Twin virtual edges
// share an id; S-S and P-P neighbours are merged.
class SpqrTree {
 public:
  explicit SpqrTree(const graph::Graph& g);

  const std::vector<SkeletonNode>& nodes() const { return nodes_; }
  const SkeletonNode& node(int i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  // Skeleton graph with the same edge ids.
  graph::Graph skeleton_graph(int node) const;

  // Structural self-check: every real edge appears once, twins pair up, the
  // node graph is a tree and each skeleton has the shape of its type.
  // Throws InternalError on failure.
  void validate(const graph::Graph& g) const;

 private:
  std::vector<SkeletonNode> nodes_;
};

// Throws NotBiconnected for graphs that are not biconnected.
SpqrTree decompose(const graph::Graph& g);

}  // namespace hybridplan::spqr
