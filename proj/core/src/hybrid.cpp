#include "hybridplan/hybrid.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "hybridplan/error.hpp"
#include "hybridplan/planarity.hpp"

namespace hybridplan::hybrid {

using fpq::FpqTree;
using fpq::Node;
using fpq::NodeKind;
using graph::FlatClusteredGraph;

namespace {

int first_cluster_vertex_id(const FlatClusteredGraph& fcg) {
  int top = -1;
  for (int v : fcg.graph.vertices()) top = std::max(top, v);
  return top + 1;
}

}  // namespace

int FrameGraph::cluster_vertex(std::size_t i) const {
  for (const auto& [f, c] : cluster_of_frame) {
    if (c == i) return f;
  }
  throw Error(ErrorCode::kInternalError, "no frame vertex for cluster " + std::to_string(i));
}

FrameGraph equipped_frame_graph(const FlatClusteredGraph& fcg) {
  FrameGraph out;
  const int base = first_cluster_vertex_id(fcg);
  for (std::size_t i = 0; i < fcg.clusters.size(); ++i) {
    const int f = base + static_cast<int>(i);
    out.graph.add_vertex(f);
    out.cluster_of_frame[f] = i;
    for (int v : fcg.clusters[i].vertices) out.frame_of_vertex[v] = f;
  }
  for (int v : fcg.graph.vertices()) {
    if (out.frame_of_vertex.contains(v)) continue;
    out.graph.add_vertex(v);
    out.frame_of_vertex[v] = v;
    out.vertex_of_frame[v] = v;
  }
  for (const auto& e : fcg.graph.edges()) {
    if (!fcg.is_inter_cluster(e)) continue;
    out.graph.add_edge(e.id, out.frame_of_vertex.at(e.u), out.frame_of_vertex.at(e.v));
    out.origin[e.id] = {e.u, e.v, fcg.side_of(e.id, e.u), fcg.side_of(e.id, e.v)};
  }
  return out;
}

namespace {

std::vector<Attachment> attachments_of(const FlatClusteredGraph& fcg, std::size_t cluster) {
  const auto& c = fcg.clusters[cluster];
  std::vector<Attachment> out;
  for (const auto& e : fcg.graph.edges()) {
    if (!fcg.is_inter_cluster(e)) continue;
    for (int end : {e.u, e.v}) {
      if (std::find(c.vertices.begin(), c.vertices.end(), end) == c.vertices.end()) continue;
      const auto side = fcg.side_of(e.id, end);
      if (!side) {
        throw Error(ErrorCode::kMissingSideAnnotation,
                    "edge " + std::to_string(e.id) + " has no side at vertex " + std::to_string(end));
      }
      out.push_back({e.id, end, *side});
    }
  }
  return out;
}

void check_side_range(const ClusterSides& s) {
  for (const auto& a : s.attachments) {
    if (a.side < 0 || a.side >= s.sigma) {
      throw Error(ErrorCode::kInvalidSideStructure,
                  "edge " + std::to_string(a.edge) + " names side " + std::to_string(a.side));
    }
  }
}

}  // namespace

ClusterSides nodetrix_sides(const FlatClusteredGraph& fcg, std::size_t cluster) {
  ClusterSides s;
  const auto& c = fcg.clusters.at(cluster);
  s.cluster_id = c.id;
  s.sigma = 4;
  s.vertices = c.vertices;
  s.pair_vertices[0] = c.vertices;
  s.pair_vertices[1] = c.vertices;
  s.attachments = attachments_of(fcg, cluster);
  check_side_range(s);
  return s;
}

ClusterSides polylink_sides(const FlatClusteredGraph& fcg, std::size_t cluster) {
  ClusterSides s;
  const auto& c = fcg.clusters.at(cluster);
  s.cluster_id = c.id;
  s.sigma = c.sigma;
  s.vertices = c.vertices;
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidSideStructure, "cluster " + std::to_string(c.id) + ": " + why);
  };
  if (s.sigma < 2 || s.sigma % 2 != 0) fail("sigma must be even and at least 2");
  const int pairs = s.sigma / 2;
  std::map<int, int> group_of;
  if (c.groups.empty()) {
    for (int p = 0; p < pairs; ++p) s.pair_vertices[p] = c.vertices;
    for (int v : c.vertices) group_of[v] = -1;
  }
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    const auto& grp = c.groups[g];
    if (grp.pairs.empty()) fail("group without side pair");
    for (int v : grp.vertices) {
      if (std::find(c.vertices.begin(), c.vertices.end(), v) == c.vertices.end()) {
        fail("group vertex " + std::to_string(v) + " is not in the cluster");
      }
      if (!group_of.emplace(v, static_cast<int>(g)).second) fail("groups overlap at " + std::to_string(v));
    }
    for (int p : grp.pairs) {
      if (p < 0 || p >= pairs) fail("pair " + std::to_string(p) + " out of range");
      auto& pv = s.pair_vertices[p];
      pv.insert(pv.end(), grp.vertices.begin(), grp.vertices.end());
    }
  }
  s.attachments = attachments_of(fcg, cluster);
  check_side_range(s);
  for (const auto& a : s.attachments) {
    if (!group_of.contains(a.vertex)) fail("vertex " + std::to_string(a.vertex) + " has no side pair");
    const auto& pv = s.pair_vertices[s.pair_of(a.side)];
    if (std::find(pv.begin(), pv.end(), a.vertex) == pv.end()) {
      fail("side " + std::to_string(a.side) + " is not a side of vertex " + std::to_string(a.vertex));
    }
  }
  return s;
}

namespace {

// Edges of `vertex` on `side`, sorted.
std::vector<int> edges_on(const ClusterSides& s, int vertex, int side) {
  std::vector<int> out;
  for (const auto& a : s.attachments) {
    if (a.vertex == vertex && a.side == side) out.push_back(a.edge);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int add_node(std::vector<Node>& nodes, Node n) {
  nodes.push_back(std::move(n));
  const int me = static_cast<int>(nodes.size()) - 1;
  for (int c : nodes[me].children) nodes[c].parent = me;
  return me;
}

int add_leaf(std::vector<Node>& nodes, int leaf) {
  Node n;
  n.leaf = leaf;
  return add_node(nodes, n);
}

// F over the sides; each side a P over per-vertex slots, each slot a P over
// that vertex's edges on the side.
FpqTree source_tree(const ClusterSides& s) {
  std::vector<Node> nodes;
  Node root;
  root.kind = NodeKind::kF;
  for (int side = 0; side < s.sigma; ++side) {
    Node side_node;
    side_node.kind = NodeKind::kP;
    for (int v : s.vertices) {
      const auto es = edges_on(s, v, side);
      if (es.empty()) continue;
      Node slot;
      slot.kind = NodeKind::kP;
      for (int e : es) slot.children.push_back(add_leaf(nodes, e));
      side_node.children.push_back(add_node(nodes, std::move(slot)));
    }
    if (!side_node.children.empty()) root.children.push_back(add_node(nodes, std::move(side_node)));
  }
  const int r = add_node(nodes, std::move(root));
  return FpqTree::from_nodes(std::move(nodes), r);
}

}  // namespace

ConstraintDag constraint_dag(const ClusterSides& s, const DagOptions& options) {
  ConstraintDag dag;
  dag.sides = s;
  for (const auto& a : s.attachments) {
    if (!dag.leaf.emplace(a.edge, a).second) {
      throw Error(ErrorCode::kInvalidSideStructure, "edge " + std::to_string(a.edge) + " attached twice");
    }
  }
  if (s.attachments.empty()) throw Error(ErrorCode::kInvalidSideStructure, "cluster has no attached edges");
  sim::Instance& inst = dag.constraint.instance;
  const int src = inst.add_node(source_tree(s));
  for (int p = 0; p < s.sigma / 2; ++p) {
    const int lower = p;
    const int upper = p + s.sigma / 2;
    std::vector<int> common;
    for (int v : s.pair_vertices.contains(p) ? s.pair_vertices.at(p) : std::vector<int>{}) {
      if (!edges_on(s, v, lower).empty() && !edges_on(s, v, upper).empty()) common.push_back(v);
    }
    if (common.size() < 2) continue;
    // The anchor stands for everything off the side, so the sink sees the
    // side's linear order rather than a cyclic one.
    const int anchor = static_cast<int>(common.size());
    std::vector<int> leaves(common.size() + 1);
    for (std::size_t k = 0; k < leaves.size(); ++k) leaves[k] = static_cast<int>(k);
    const int sink =
        inst.add_node(options.rigid_coherence ? FpqTree::f_node(leaves) : FpqTree::p_node(leaves));
    for (int side : {lower, upper}) {
      sim::Arc arc;
      arc.tail = src;
      arc.head = sink;
      arc.reversing = side == upper;
      for (std::size_t k = 0; k < common.size(); ++k) arc.phi[static_cast<int>(k)] = edges_on(s, common[k], side).front();
      arc.phi[anchor] = edges_on(s, common.front(), side == lower ? upper : lower).front();
      inst.add_arc(std::move(arc));
    }
    dag.coherence_node[p] = sink;
    dag.coherence_vertices[p] = common;
  }
  return dag;
}

ConstraintDag constraint_dag_nodetrix(const FlatClusteredGraph& fcg, std::size_t cluster) {
  return constraint_dag(nodetrix_sides(fcg, cluster));
}

ConstraintDag constraint_dag_polylink(const FlatClusteredGraph& fcg, std::size_t cluster) {
  return constraint_dag(polylink_sides(fcg, cluster));
}

}  // namespace hybridplan::hybrid

namespace hybridplan::hybrid {

namespace {

std::vector<int> merge_orders(const std::vector<int>& a, const std::vector<int>& b) {
  const std::set<int> in_a(a.begin(), a.end());
  const std::set<int> in_b(b.begin(), b.end());
  std::vector<int> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      out.push_back(a[i++]);
      ++j;
    } else if (i < a.size() && !in_b.contains(a[i])) {
      out.push_back(a[i++]);
    } else if (j < b.size() && !in_a.contains(b[j])) {
      out.push_back(b[j++]);
    } else {
      throw Error(ErrorCode::kInternalError, "antipodal sides disagree on their common vertices");
    }
  }
  return out;
}

}  // namespace

ClusterOrder extract_order(const ClusterSides& s, const std::vector<int>& rotation) {
  ClusterOrder out;
  out.cluster_id = s.cluster_id;
  out.sigma = s.sigma;
  out.side_vertices.assign(s.sigma, {});
  out.side_edges.assign(s.sigma, {});
  std::map<int, Attachment> at;
  for (const auto& a : s.attachments) at[a.edge] = a;
  if (rotation.size() != at.size()) throw Error(ErrorCode::kInternalError, "rotation does not match the cluster");
  const std::size_t n = rotation.size();
  const auto side = [&](std::size_t i) { return at.at(rotation[i % n]).side; };
  const auto vertex = [&](std::size_t i) { return at.at(rotation[i % n]).vertex; };
  std::size_t start = 0;
  if (n > 0) {
    int lowest = s.sigma;
    for (std::size_t i = 0; i < n; ++i) lowest = std::min(lowest, side(i));
    bool found = false;
    for (std::size_t i = 0; i < n && !found; ++i) {
      if (side(i) == lowest && side(i + n - 1) != lowest) start = i, found = true;
    }
    // A single side: any cut between two vertex groups will do.
    for (std::size_t i = 0; i < n && !found; ++i) {
      if (vertex(i) != vertex(i + n - 1)) start = i, found = true;
    }
  }
  int last_side = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = start + k;
    if (side(i) < last_side) throw Error(ErrorCode::kInternalError, "rotation breaks the side sequence");
    last_side = side(i);
    auto& vs = out.side_vertices[side(i)];
    if (vs.empty() || vs.back() != vertex(i)) {
      if (std::find(vs.begin(), vs.end(), vertex(i)) != vs.end()) {
        throw Error(ErrorCode::kInternalError, "edges of one vertex are split on a side");
      }
      vs.push_back(vertex(i));
    }
    out.side_edges[side(i)].push_back(rotation[i % n]);
  }
  for (int p = 0; p < s.sigma / 2; ++p) {
    const int upper = p + s.sigma / 2;
    std::vector<int> back = out.side_vertices[upper];
    std::reverse(back.begin(), back.end());
    std::vector<int> perm = merge_orders(out.side_vertices[p], back);
    if (s.pair_vertices.contains(p)) {
      for (int v : s.pair_vertices.at(p)) {
        if (std::find(perm.begin(), perm.end(), v) == perm.end()) perm.push_back(v);
      }
    }
    out.side_vertices[p] = perm;
    std::reverse(perm.begin(), perm.end());
    out.side_vertices[upper] = perm;
    std::reverse(perm.begin(), perm.end());
    out.permutation[p] = std::move(perm);
  }
  return out;
}

Expansion expand_witness(const FlatClusteredGraph& fcg, const FrameGraph& frame,
                         const graph::RotationSystem& frame_rotation, const std::vector<ClusterSides>& sides,
                         const std::vector<ClusterOrder>& orders) {
  Expansion out;
  graph::Graph& g = out.graph;
  int next_vertex = first_cluster_vertex_id(fcg);
  int next_edge = fcg.graph.max_edge_id() + 1;
  const auto vertex = [&](const std::string& label) {
    const int id = next_vertex++;
    g.add_vertex(id);
    out.label[id] = label;
    return id;
  };
  for (const auto& [f, v] : frame.vertex_of_frame) {
    g.add_vertex(v);
    out.label[v] = std::to_string(v);
  }
  // (cluster index, side, vertex) -> slot vertex
  std::map<std::tuple<std::size_t, int, int>, int> slot;
  std::map<int, std::vector<int>> pending;  // slot or plain vertex -> spoke order
  for (std::size_t i = 0; i < sides.size(); ++i) {
    const ClusterSides& s = sides[i];
    const ClusterOrder& o = orders[i];
    const std::string name = "C" + std::to_string(s.cluster_id);
    const int hub = vertex(name + ".hub");
    std::vector<int> rim(s.sigma);
    std::vector<int> pi(s.sigma);
    for (int k = 0; k < s.sigma; ++k) rim[k] = vertex(name + ".rim" + std::to_string(k));
    std::vector<int> spoke_to_hub(s.sigma);
    std::vector<int> rim_edge(s.sigma);
    std::vector<int> pi_edge(s.sigma);
    for (int k = 0; k < s.sigma; ++k) {
      spoke_to_hub[k] = next_edge++;
      g.add_edge(spoke_to_hub[k], hub, rim[k]);
    }
    for (int k = 0; k < s.sigma; ++k) {
      rim_edge[k] = next_edge++;
      g.add_edge(rim_edge[k], rim[k], rim[(k + 1) % s.sigma]);
    }
    out.rotation[hub] = spoke_to_hub;
    for (int k = 0; k < s.sigma; ++k) {
      pi[k] = vertex(name + ".side" + std::to_string(k));
      pi_edge[k] = next_edge++;
      g.add_edge(pi_edge[k], rim[k], pi[k]);
      out.rotation[rim[k]] = {spoke_to_hub[k], rim_edge[(k + s.sigma - 1) % s.sigma], pi_edge[k], rim_edge[k]};
      std::vector<int>& at_pi = out.rotation[pi[k]];
      at_pi.push_back(pi_edge[k]);
      for (int v : o.side_vertices[k]) {
        const int sl = vertex(name + ".side" + std::to_string(k) + ".v" + std::to_string(v));
        const int e = next_edge++;
        g.add_edge(e, pi[k], sl);
        at_pi.push_back(e);
        out.rotation[sl] = {e};
        slot[{i, k, v}] = sl;
      }
      for (int e : o.side_edges[k]) {
        const Attachment* a = nullptr;
        for (const auto& cand : s.attachments) {
          if (cand.edge == e) a = &cand;
        }
        pending[slot.at({i, k, a->vertex})].push_back(e);
      }
    }
  }
  const auto end_of = [&](int end, const std::optional<int>& side) {
    const int f = frame.frame_of_vertex.at(end);
    const auto c = frame.cluster_of_frame.find(f);
    if (c == frame.cluster_of_frame.end()) return end;
    return slot.at({c->second, *side, end});
  };
  for (const auto& [e, o] : frame.origin) {
    g.add_edge(e, end_of(o.u, o.side_u), end_of(o.v, o.side_v));
  }
  for (const auto& [sl, spokes] : pending) {
    auto& r = out.rotation[sl];
    r.insert(r.end(), spokes.begin(), spokes.end());
  }
  for (const auto& [f, v] : frame.vertex_of_frame) {
    const auto it = frame_rotation.find(f);
    out.rotation[v] = it == frame_rotation.end() ? std::vector<int>{} : it->second;
  }
  if (!graph::check_rotation_planarity(g, out.rotation) || !graph::is_planar(g)) {
    throw Error(ErrorCode::kInternalError, "gadget expansion is not planar");
  }
  return out;
}

}  // namespace hybridplan::hybrid

namespace hybridplan::hybrid {

namespace {

enum class Model { kNodeTrix, kPolyLink };

std::optional<Witness> run(const FlatClusteredGraph& fcg, Model model, const TestOptions& options,
                           Diagnostics* diagnostics) {
  fcg.validate();
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  Witness w;
  w.frame = equipped_frame_graph(fcg);
  for (std::size_t i = 0; i < fcg.clusters.size(); ++i) {
    w.sides.push_back(model == Model::kNodeTrix ? nodetrix_sides(fcg, i) : polylink_sides(fcg, i));
  }
  // Isolated frame vertices carry no constraint and are placed anywhere.
  graph::Graph core;
  for (int f : w.frame.graph.vertices()) {
    if (w.frame.graph.degree(f) > 0) core.add_vertex(f);
  }
  for (const auto& e : w.frame.graph.edges()) core.add_edge(e.id, e.u, e.v);
  diag.frame_vertices = core.num_vertices();
  diag.frame_edges = core.num_edges();
  graph::RotationSystem rotation;
  if (core.num_edges() > 0) {
    if (!graph::is_biconnected(core)) throw Error(ErrorCode::kFrameNotBiconnected, "frame graph is not biconnected");
    std::map<int, one_fixed::Constraint> constraints;
    for (std::size_t i = 0; i < w.sides.size(); ++i) {
      if (w.sides[i].attachments.empty()) continue;
      ConstraintDag dag = constraint_dag(w.sides[i], options.dag);
      if (options.one_fixed.check_fixedness) {
        diag.max_constraint_fixedness =
            std::max(diag.max_constraint_fixedness, sim::fixedness(dag.constraint.instance).max_value());
      }
      constraints.emplace(w.frame.cluster_vertex(i), std::move(dag.constraint));
    }
    std::optional<graph::RotationSystem> rs;
    try {
      rs = one_fixed::test_one_fixed_planarity(core, constraints, options.one_fixed, &diag.one_fixed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotPlanar) throw;
    }
    if (!rs) return std::nullopt;
    rotation = std::move(*rs);
  }
  for (int f : w.frame.graph.vertices()) w.frame_rotation[f] = rotation.contains(f) ? rotation[f] : std::vector<int>{};
  for (std::size_t i = 0; i < w.sides.size(); ++i) {
    w.orders.push_back(extract_order(w.sides[i], w.frame_rotation.at(w.frame.cluster_vertex(i))));
  }
  w.expanded = expand_witness(fcg, w.frame, w.frame_rotation, w.sides, w.orders);
  return w;
}

}  // namespace

std::optional<Witness> test_rci_nt(const FlatClusteredGraph& fcg, const TestOptions& options,
                                   Diagnostics* diagnostics) {
  return run(fcg, Model::kNodeTrix, options, diagnostics);
}

std::optional<Witness> test_polylink(const FlatClusteredGraph& fcg, const TestOptions& options,
                                     Diagnostics* diagnostics) {
  return run(fcg, Model::kPolyLink, options, diagnostics);
}

FlatClusteredGraph clique_to_polylink(const FlatClusteredGraph& fcg) {
  fcg.validate();
  std::set<std::pair<int, int>> adjacent;
  for (const auto& e : fcg.graph.edges()) {
    adjacent.insert({e.u, e.v});
    adjacent.insert({e.v, e.u});
  }
  FlatClusteredGraph out = fcg;
  // Input side of each endpoint -> side on the polygon.
  std::map<int, std::map<int, int>> remap;
  for (auto& c : out.clusters) {
    for (int a : c.vertices) {
      for (int b : c.vertices) {
        if (a != b && !adjacent.contains({a, b})) {
          throw Error(ErrorCode::kNotAClique, "cluster " + std::to_string(c.id) + " misses edge " +
                                                  std::to_string(a) + "-" + std::to_string(b));
        }
      }
    }
    c.groups.clear();
    const std::size_t k = c.vertices.size();
    if (k <= 2) {
      c.sigma = 2;
      c.groups.push_back({c.vertices, {0}});
      for (int v : c.vertices) remap[v] = {{0, 0}, {1, 0}, {2, 1}, {3, 1}};
      continue;
    }
    c.sigma = 4;
    const int first = c.vertices.front();
    const int last = c.vertices.back();
    c.groups.push_back({{first, last}, {0}});
    c.groups.push_back({std::vector<int>(c.vertices.begin() + 1, c.vertices.end() - 1), {1}});
    remap[first] = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    remap[last] = {{0, 2}, {1, 2}, {2, 2}, {3, 2}};
    for (std::size_t j = 1; j + 1 < k; ++j) remap[c.vertices[j]] = {{0, 1}, {1, 1}, {2, 3}, {3, 3}};
  }
  for (auto& s : out.sides) {
    const auto it = remap.find(s.endpoint);
    if (it == remap.end()) continue;
    const auto side = it->second.find(s.side);
    if (side == it->second.end()) {
      throw Error(ErrorCode::kInvalidSideStructure, "edge " + std::to_string(s.edge) + " names side " +
                                                         std::to_string(s.side));
    }
    s.side = side->second;
  }
  return out;
}

std::optional<Witness> test_clique_planarity_fixed_sides(const FlatClusteredGraph& fcg, const TestOptions& options,
                                                         Diagnostics* diagnostics) {
  return test_polylink(clique_to_polylink(fcg), options, diagnostics);
}

}  // namespace hybridplan::hybrid
