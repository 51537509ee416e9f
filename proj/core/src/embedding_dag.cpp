#include "hybridplan/embedding_dag.hpp"

#include <algorithm>
#include <optional>

#include "hybridplan/error.hpp"
#include "hybridplan/planarity.hpp"

namespace hybridplan::embedding {

using fpq::FpqTree;
using fpq::Node;
using fpq::NodeKind;
using spqr::NodeType;
using spqr::SkeletonEdge;
using spqr::SkeletonNode;

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const graph::Graph& g, const spqr::SpqrTree& t) : g_(g), t_(t), rotations_(t.size()) {}

  // Skeleton edge ids at v in cyclic order (R), or in storage order otherwise.
  std::vector<int> edges_at(int node, int v) {
    const SkeletonNode& n = t_.node(node);
    if (n.type == NodeType::kR) return rotation(node).at(v);
    std::vector<int> out;
    for (int i : n.incident(v)) out.push_back(n.edges[i].id);
    return out;
  }

  const graph::RotationSystem& rotation(int node) {
    auto& slot = rotations_[node];
    if (!slot) {
      auto rs = graph::planar_embedding(t_.skeleton_graph(node));
      if (!rs) throw Error(ErrorCode::kNotPlanar, "graph is not planar");
      slot = std::move(*rs);
    }
    return *slot;
  }

  FpqTree tree(int v) {
    if (g_.degree(v) == 0) throw Error(ErrorCode::kInternalError, "isolated vertex");
    int start = -1;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (t_.node(static_cast<int>(i)).contains(v)) {
        start = static_cast<int>(i);
        break;
      }
    }
    std::vector<Node> nodes;
    const int root = build(start, -1, v, nodes);
    return FpqTree::from_nodes(std::move(nodes), root);
  }

  // A real edge at v inside the part of the graph the skeleton edge stands for.
  int rep(int node, int edge_id, int v) {
    const SkeletonEdge& e = t_.node(node).edge_by_id(edge_id);
    if (!e.is_virtual) return e.id;
    const SkeletonNode& next = t_.node(e.twin_node);
    std::optional<int> virtual_choice;
    for (int i : next.incident(v)) {
      const SkeletonEdge& f = next.edges[i];
      if (f.is_virtual && f.id == edge_id) continue;
      if (!f.is_virtual) return f.id;
      if (!virtual_choice) virtual_choice = f.id;
    }
    if (!virtual_choice) throw Error(ErrorCode::kInternalError, "no representative edge");
    return rep(e.twin_node, *virtual_choice, v);
  }

 private:
  int build(int node, int parent_edge, int v, std::vector<Node>& nodes) {
    std::vector<int> order = edges_at(node, v);
    if (parent_edge >= 0) {
      auto it = std::find(order.begin(), order.end(), parent_edge);
      std::rotate(order.begin(), it, order.end());
      order.erase(order.begin());
    }
    const SkeletonNode& n = t_.node(node);
    std::vector<int> kids;
    for (int id : order) {
      const SkeletonEdge& e = n.edge_by_id(id);
      if (e.is_virtual) {
        kids.push_back(build(e.twin_node, id, v, nodes));
      } else {
        Node leaf;
        leaf.leaf = id;
        nodes.push_back(leaf);
        kids.push_back(static_cast<int>(nodes.size()) - 1);
      }
    }
    Node inner;
    inner.kind = n.type == NodeType::kR ? NodeKind::kQ : NodeKind::kP;
    inner.children = kids;
    nodes.push_back(inner);
    const int me = static_cast<int>(nodes.size()) - 1;
    for (int c : kids) nodes[c].parent = me;
    return me;
  }

  const graph::Graph& g_;
  const spqr::SpqrTree& t_;
  std::vector<std::optional<graph::RotationSystem>> rotations_;
};

void require_input(const graph::Graph& g) {
  if (!graph::is_biconnected(g)) throw Error(ErrorCode::kNotBiconnected, "graph is not biconnected");
  if (!graph::is_planar(g)) throw Error(ErrorCode::kNotPlanar, "graph is not planar");
}

}  // namespace

FpqTree embedding_tree(const graph::Graph& g, const spqr::SpqrTree& tree, int v) {
  require_input(g);
  return TreeBuilder(g, tree).tree(v);
}

EmbeddingDag build_embedding_dag(const graph::Graph& g) {
  require_input(g);
  const spqr::SpqrTree tree(g);
  TreeBuilder builder(g, tree);
  EmbeddingDag dag;
  for (int v : g.vertices()) {
    const int id = dag.instance.add_node(builder.tree(v));
    dag.source_of_vertex[v] = id;
    dag.vertex_of_source[id] = v;
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const int mu = static_cast<int>(i);
    const SkeletonNode& n = tree.node(mu);
    if (n.type == NodeType::kP && n.edges.size() >= 3) {
      // Around the second pole the parallel parts appear in reverse.
      std::vector<int> leaves(n.edges.size());
      for (std::size_t k = 0; k < leaves.size(); ++k) leaves[k] = static_cast<int>(k);
      const int sink = dag.instance.add_node(FpqTree::p_node(leaves));
      for (int side = 0; side < 2; ++side) {
        const int pole = n.vertices[side];
        sim::Arc arc;
        arc.tail = dag.source_of_vertex.at(pole);
        arc.head = sink;
        arc.reversing = side == 1;
        for (std::size_t k = 0; k < n.edges.size(); ++k) {
          arc.phi[static_cast<int>(k)] = builder.rep(mu, n.edges[k].id, pole);
        }
        dag.instance.add_arc(std::move(arc));
      }
      dag.sinks.push_back({sink, mu, NodeType::kP, n.vertices[0], n.vertices[1]});
    } else if (n.type == NodeType::kR) {
      // Chain the flip of the skeleton through consecutive vertices.
      for (std::size_t k = 0; k + 1 < n.vertices.size(); ++k) {
        const int sink = dag.instance.add_node(FpqTree::q_node({0, 1, 2}));
        for (int x : {n.vertices[k], n.vertices[k + 1]}) {
          const std::vector<int> rot = builder.rotation(mu).at(x);
          sim::Arc arc;
          arc.tail = dag.source_of_vertex.at(x);
          arc.head = sink;
          for (int j = 0; j < 3; ++j) arc.phi[j] = builder.rep(mu, rot[j], x);
          dag.instance.add_arc(std::move(arc));
        }
        dag.sinks.push_back({sink, mu, NodeType::kR, n.vertices[k], n.vertices[k + 1]});
      }
    }
  }
  return dag;
}

sim::Instance EmbeddingDag::restriction(int vertex) const {
  const int src = source_of_vertex.at(vertex);
  sim::Instance out;
  out.add_node(instance.tree(src));
  for (int a : instance.out_arcs(src)) {
    sim::Arc arc = instance.arc(a);
    arc.tail = 0;
    arc.head = out.add_node(instance.tree(arc.head));
    out.add_arc(std::move(arc));
  }
  return out;
}

graph::RotationSystem solutions_to_rotation(const graph::Graph& g, const EmbeddingDag& dag,
                                            const sim::Solution& sol) {
  if (auto bad = sim::check_solution(dag.instance, sol)) {
    throw Error(ErrorCode::kInvalidSolution, *bad);
  }
  graph::RotationSystem rs;
  for (int v : g.vertices()) rs[v] = sol.at(dag.source_of_vertex.at(v));
  return rs;
}

}  // namespace hybridplan::embedding
