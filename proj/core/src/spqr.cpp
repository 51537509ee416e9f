#include "hybridplan/spqr.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "hybridplan/error.hpp"
#include "hybridplan/planarity.hpp"

namespace hybridplan::spqr {

bool SkeletonNode::contains(int vertex) const {
  return std::find(vertices.begin(), vertices.end(), vertex) != vertices.end();
}

std::vector<int> SkeletonNode::incident(int vertex) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].u == vertex || edges[i].v == vertex) out.push_back(static_cast<int>(i));
  }
  return out;
}

const SkeletonEdge& SkeletonNode::edge_by_id(int id) const {
  for (const auto& e : edges) {
    if (e.id == id) return e;
  }
  throw Error(ErrorCode::kInternalError, "skeleton has no edge " + std::to_string(id));
}

namespace {

using Edges = std::vector<SkeletonEdge>;

std::vector<int> vertices_of(const Edges& edges) {
  std::set<int> vs;
  for (const auto& e : edges) {
    vs.insert(e.u);
    vs.insert(e.v);
  }
  return {vs.begin(), vs.end()};
}

std::map<int, std::vector<int>> adjacency(const Edges& edges) {
  std::map<int, std::vector<int>> adj;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back(static_cast<int>(i));
    adj[edges[i].v].push_back(static_cast<int>(i));
  }
  return adj;
}

int other_end(const SkeletonEdge& e, int x) { return e.u == x ? e.v : e.u; }

// Connected components of the graph without `removed`; vertex -> component.
std::map<int, int> components_without(const Edges& edges, const std::set<int>& removed) {
  auto adj = adjacency(edges);
  std::map<int, int> comp;
  int next = 0;
  for (const auto& [start, inc] : adj) {
    if (removed.contains(start) || comp.contains(start)) continue;
    std::vector<int> stack{start};
    comp[start] = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int i : adj[x]) {
        int y = other_end(edges[i], x);
        if (removed.contains(y) || comp.contains(y)) continue;
        comp[y] = next;
        stack.push_back(y);
      }
    }
    ++next;
  }
  return comp;
}

int count_components(const std::map<int, int>& comp) {
  int best = -1;
  for (const auto& [v, c] : comp) best = std::max(best, c);
  return best + 1;
}

// Articulation points of the graph minus vertex `a` (lowpoint DFS).
std::vector<int> articulation_without(const Edges& edges, int a) {
  auto adj = adjacency(edges);
  std::map<int, int> disc, low;
  std::vector<int> cut;
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int x, int parent_edge) {
    disc[x] = low[x] = timer++;
    int children = 0;
    bool is_cut = false;
    for (int i : adj[x]) {
      if (i == parent_edge) continue;
      int y = other_end(edges[i], x);
      if (y == a) continue;
      if (!disc.contains(y)) {
        ++children;
        dfs(y, i);
        low[x] = std::min(low[x], low[y]);
        if (parent_edge >= 0 && low[y] >= disc[x]) is_cut = true;
      } else {
        low[x] = std::min(low[x], disc[y]);
      }
    }
    if (parent_edge < 0 && children > 1) is_cut = true;
    if (is_cut) cut.push_back(x);
  };
  for (const auto& [x, inc] : adj) {
    if (x != a) {
      dfs(x, -1);
      break;
    }
  }
  return cut;
}

struct SeparationPair {
  int a = -1;
  int b = -1;
};

std::optional<SeparationPair> find_separation_pair(const Edges& edges) {
  for (int a : vertices_of(edges)) {
    auto cut = articulation_without(edges, a);
    if (!cut.empty()) return SeparationPair{a, *std::min_element(cut.begin(), cut.end())};
  }
  return std::nullopt;
}

bool is_cycle(const Edges& edges) {
  auto adj = adjacency(edges);
  for (const auto& [v, inc] : adj) {
    if (inc.size() != 2) return false;
  }
  return count_components(components_without(edges, {})) == 1;
}

struct Component {
  NodeType type = NodeType::kR;
  Edges edges;
  bool alive = true;
};

class Decomposer {
 public:
  explicit Decomposer(const graph::Graph& g) : next_virtual_(g.max_edge_id() + 1) {
    Edges all;
    for (const auto& e : g.edges()) all.push_back({e.id, e.u, e.v, false, -1});
    work_.push_back(std::move(all));
  }

  std::vector<SkeletonNode> run() {
    while (!work_.empty()) {
      Edges c = std::move(work_.back());
      work_.pop_back();
      process(std::move(c));
    }
    merge_neighbours();
    return finish();
  }

 private:
  SkeletonEdge make_virtual(int a, int b, int id) { return {id, a, b, true, -1}; }

  void emit(NodeType type, Edges edges) { done_.push_back({type, std::move(edges), true}); }

  void process(Edges c) {
    if (vertices_of(c).size() == 2) {
      emit(NodeType::kP, std::move(c));
      return;
    }
    // Bundle parallel edges into bonds.
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (std::size_t i = 0; i < c.size(); ++i) {
      groups[std::minmax(c[i].u, c[i].v)].push_back(static_cast<int>(i));
    }
    std::vector<bool> dropped(c.size(), false);
    Edges extra;
    for (const auto& [key, idx] : groups) {
      if (idx.size() < 2) continue;
      const int id = next_virtual_++;
      Edges bond;
      for (int i : idx) {
        bond.push_back(c[i]);
        dropped[i] = true;
      }
      bond.push_back(make_virtual(key.first, key.second, id));
      emit(NodeType::kP, std::move(bond));
      extra.push_back(make_virtual(key.first, key.second, id));
    }
    if (!extra.empty()) {
      Edges rest;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (!dropped[i]) rest.push_back(c[i]);
      }
      rest.insert(rest.end(), extra.begin(), extra.end());
      c = std::move(rest);
    }
    if (is_cycle(c)) {
      emit(NodeType::kS, std::move(c));
      return;
    }
    auto pair = find_separation_pair(c);
    if (!pair) {
      emit(NodeType::kR, std::move(c));
      return;
    }
    split(std::move(c), pair->a, pair->b);
  }

  void split(Edges c, int a, int b) {
    const auto comp = components_without(c, {a, b});
    const int k = count_components(comp);
    std::vector<Edges> classes(k);
    Edges direct;
    for (const auto& e : c) {
      const bool ua = e.u == a || e.u == b;
      const bool va = e.v == a || e.v == b;
      if (ua && va) {
        direct.push_back(e);
      } else {
        classes[comp.at(ua ? e.v : e.u)].push_back(e);
      }
    }
    if (k + static_cast<int>(direct.size()) >= 3) {
      Edges bond = direct;
      for (auto& cls : classes) {
        const int id = next_virtual_++;
        cls.push_back(make_virtual(a, b, id));
        bond.push_back(make_virtual(a, b, id));
        work_.push_back(std::move(cls));
      }
      emit(NodeType::kP, std::move(bond));
      return;
    }
    const int id = next_virtual_++;
    for (auto& cls : classes) {
      cls.push_back(make_virtual(a, b, id));
      work_.push_back(std::move(cls));
    }
  }

  std::map<int, std::vector<int>> virtual_owners() const {
    std::map<int, std::vector<int>> owners;
    for (std::size_t i = 0; i < done_.size(); ++i) {
      if (!done_[i].alive) continue;
      for (const auto& e : done_[i].edges) {
        if (e.is_virtual) owners[e.id].push_back(static_cast<int>(i));
      }
    }
    return owners;
  }

  void merge_neighbours() {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [id, owners] : virtual_owners()) {
        if (owners.size() != 2) throw Error(ErrorCode::kInternalError, "virtual edge without twin");
        Component& x = done_[owners[0]];
        Component& y = done_[owners[1]];
        if (x.type != y.type || x.type == NodeType::kR) continue;
        auto not_id = [id](const SkeletonEdge& e) { return !(e.is_virtual && e.id == id); };
        Edges merged;
        std::copy_if(x.edges.begin(), x.edges.end(), std::back_inserter(merged), not_id);
        std::copy_if(y.edges.begin(), y.edges.end(), std::back_inserter(merged), not_id);
        x.edges = std::move(merged);
        y.alive = false;
        changed = true;
        break;
      }
    }
  }

  std::vector<SkeletonNode> finish() {
    std::vector<int> index(done_.size(), -1);
    std::vector<SkeletonNode> out;
    for (std::size_t i = 0; i < done_.size(); ++i) {
      if (!done_[i].alive) continue;
      index[i] = static_cast<int>(out.size());
      SkeletonNode n;
      n.type = done_[i].type;
      n.edges = done_[i].edges;
      n.vertices = vertices_of(n.edges);
      out.push_back(std::move(n));
    }
    for (const auto& [id, owners] : virtual_owners()) {
      for (int side = 0; side < 2; ++side) {
        for (auto& e : out[index[owners[side]]].edges) {
          if (e.is_virtual && e.id == id) e.twin_node = index[owners[1 - side]];
        }
      }
    }
    return out;
  }

  int next_virtual_;
  std::vector<Edges> work_;
  std::vector<Component> done_;
};

}  // namespace

SpqrTree::SpqrTree(const graph::Graph& g) {
  if (!graph::is_biconnected(g)) throw Error(ErrorCode::kNotBiconnected, "graph is not biconnected");
  nodes_ = Decomposer(g).run();
}

SpqrTree decompose(const graph::Graph& g) { return SpqrTree(g); }

graph::Graph SpqrTree::skeleton_graph(int node) const {
  graph::Graph g;
  for (int v : nodes_[node].vertices) g.add_vertex(v);
  for (const auto& e : nodes_[node].edges) g.add_edge(e.id, e.u, e.v);
  return g;
}

void SpqrTree::validate(const graph::Graph& g) const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInternalError, "SPQR check: " + what); };
  std::multiset<int> real;
  std::map<int, int> virtual_count;
  std::size_t links = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const SkeletonNode& n = nodes_[i];
    for (const auto& e : n.edges) {
      if (e.is_virtual) {
        ++virtual_count[e.id];
        if (e.twin_node < 0 || e.twin_node == static_cast<int>(i)) fail("bad twin");
        ++links;
      } else {
        real.insert(e.id);
        const auto& ge = g.edge(e.id);
        if (std::minmax(ge.u, ge.v) != std::minmax(e.u, e.v)) fail("real edge endpoints differ");
      }
    }
    switch (n.type) {
      case NodeType::kP:
        if (n.vertices.size() != 2) fail("bond with more than two vertices");
        if (nodes_.size() > 1 && n.edges.size() < 3) fail("bond with fewer than three edges");
        break;
      case NodeType::kS:
        if (!is_cycle(n.edges) || n.edges.size() < 3) fail("S skeleton is not a cycle");
        break;
      case NodeType::kR: {
        std::set<std::pair<int, int>> seen;
        for (const auto& e : n.edges) {
          if (!seen.insert(std::minmax(e.u, e.v)).second) fail("parallel edges in R skeleton");
        }
        if (n.vertices.size() < 4 || find_separation_pair(n.edges)) fail("R skeleton not triconnected");
        break;
      }
    }
  }
  if (real.size() != g.num_edges()) fail("real edge count differs");
  for (const auto& e : g.edges()) {
    if (real.count(e.id) != 1) fail("edge " + std::to_string(e.id) + " not covered once");
  }
  for (const auto& [id, c] : virtual_count) {
    if (c != 2) fail("virtual edge count");
  }
  if (links / 2 + 1 != nodes_.size()) fail("node graph is not a tree");
  std::set<int> reached{0};
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const auto& e : nodes_[x].edges) {
      if (e.is_virtual && reached.insert(e.twin_node).second) stack.push_back(e.twin_node);
    }
  }
  if (reached.size() != nodes_.size()) fail("node graph is disconnected");
}

}  // namespace hybridplan::spqr
