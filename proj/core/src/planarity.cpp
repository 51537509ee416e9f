#include "hybridplan/planarity.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/graph_traits.hpp>

#include "hybridplan/error.hpp"

namespace hybridplan::graph {

namespace {

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                          boost::property<boost::vertex_index_t, int>,
                          boost::property<boost::edge_index_t, int>>;
using BoostEdge = boost::graph_traits<BoostGraph>::edge_descriptor;

// Simple graph over dense indices plus, for each simple edge, the bundle of
// original parallel edge ids it stands for.
struct SimpleView {
  BoostGraph bg;
  std::vector<std::vector<int>> bundles;
  std::unordered_map<int, int> index_of;
};

SimpleView make_simple(const Graph& g) {
  SimpleView view;
  view.bg = BoostGraph(g.num_vertices());
  for (std::size_t i = 0; i < g.vertices().size(); ++i) {
    view.index_of[g.vertices()[i]] = static_cast<int>(i);
  }
  std::map<std::pair<int, int>, int> bundle_of;
  for (const Edge& e : g.edges()) {
    int a = view.index_of.at(e.u);
    int b = view.index_of.at(e.v);
    auto key = std::minmax(a, b);
    auto it = bundle_of.find(key);
    if (it == bundle_of.end()) {
      const int k = static_cast<int>(view.bundles.size());
      bundle_of.emplace(key, k);
      view.bundles.push_back({e.id});
      boost::add_edge(a, b, k, view.bg);
    } else {
      view.bundles[it->second].push_back(e.id);
    }
  }
  return view;
}

}  // namespace

bool is_connected(const Graph& g) {
  if (g.num_vertices() == 0) return true;
  std::set<int> seen{g.vertices().front()};
  std::vector<int> stack{g.vertices().front()};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : g.incident(v)) {
      int w = g.edge(e).other(v);
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return seen.size() == g.num_vertices();
}

bool is_biconnected(const Graph& g) {
  const std::size_t n = g.num_vertices();
  if (n < 2 || !is_connected(g)) return false;
  if (n == 2) return g.num_edges() >= 2;
  // Iterative lowpoint DFS over edge ids so parallel edges count as back edges.
  std::unordered_map<int, int> disc;
  std::unordered_map<int, int> low;
  const int root = g.vertices().front();
  struct Frame {
    int v;
    int parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack{{root, -1, 0}};
  int timer = 0;
  int root_children = 0;
  disc[root] = low[root] = timer++;
  while (!stack.empty()) {
    Frame& f = stack.back();
    auto inc = g.incident(f.v);
    if (f.next < inc.size()) {
      int e = inc[f.next++];
      if (e == f.parent_edge) continue;
      int w = g.edge(e).other(f.v);
      if (!disc.contains(w)) {
        disc[w] = low[w] = timer++;
        if (f.v == root) ++root_children;
        stack.push_back({w, e, 0});
      } else {
        low[f.v] = std::min(low[f.v], disc[w]);
      }
      continue;
    }
    const int v = f.v;
    stack.pop_back();
    if (stack.empty()) break;
    const int p = stack.back().v;
    low[p] = std::min(low[p], low[v]);
    if (p != root && low[v] >= disc[p]) return false;
  }
  return root_children <= 1;
}

bool is_planar(const Graph& g) {
  if (g.num_vertices() < 5) return true;
  SimpleView view = make_simple(g);
  return boost::boyer_myrvold_planarity_test(view.bg);
}

std::optional<RotationSystem> planar_embedding(const Graph& g) {
  SimpleView view = make_simple(g);
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<BoostEdge>> embedding(n);
  if (!boost::boyer_myrvold_planarity_test(
          boost::boyer_myrvold_params::graph = view.bg,
          boost::boyer_myrvold_params::embedding = &embedding[0])) {
    return std::nullopt;
  }
  auto edge_index = boost::get(boost::edge_index, view.bg);
  RotationSystem rs;
  for (std::size_t i = 0; i < n; ++i) {
    const int v = g.vertices()[i];
    auto& order = rs[v];
    for (const BoostEdge& be : embedding[i]) {
      const auto& bundle = view.bundles[boost::get(edge_index, be)];
      // Parallel edges are laid out side by side; the far endpoint sees them
      // in the opposite order.
      const Edge& first = g.edge(bundle.front());
      if (first.u == v) {
        order.insert(order.end(), bundle.begin(), bundle.end());
      } else {
        order.insert(order.end(), bundle.rbegin(), bundle.rend());
      }
    }
  }
  return rs;
}

namespace {

void require_cover(const Graph& g, const RotationSystem& rs) {
  if (rs.size() != g.num_vertices()) {
    throw Error(ErrorCode::kMismatchedRotation, "rotation system vertex count differs");
  }
  for (int v : g.vertices()) {
    auto it = rs.find(v);
    if (it == rs.end()) {
      throw Error(ErrorCode::kMismatchedRotation, "no rotation for vertex " + std::to_string(v));
    }
    std::vector<int> a(g.incident(v).begin(), g.incident(v).end());
    std::vector<int> b = it->second;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw Error(ErrorCode::kMismatchedRotation,
                  "rotation at vertex " + std::to_string(v) + " does not match its edges");
    }
  }
}

}  // namespace

int count_faces(const Graph& g, const RotationSystem& rs) {
  require_cover(g, rs);
  // successor[(v, e)] = edge following e in the rotation at v
  std::map<std::pair<int, int>, int> successor;
  for (const auto& [v, order] : rs) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      successor[{v, order[i]}] = order[(i + 1) % order.size()];
    }
  }
  // A dart is (edge, tail vertex).
  std::set<std::pair<int, int>> visited;
  int faces = 0;
  for (const Edge& e : g.edges()) {
    for (int tail : {e.u, e.v}) {
      if (visited.contains({e.id, tail})) continue;
      ++faces;
      int cur_edge = e.id;
      int cur_tail = tail;
      while (visited.insert({cur_edge, cur_tail}).second) {
        const int head = g.edge(cur_edge).other(cur_tail);
        cur_edge = successor.at({head, cur_edge});
        cur_tail = head;
      }
    }
  }
  return faces;
}

bool check_rotation_planarity(const Graph& g, const RotationSystem& rs) {
  const int faces = count_faces(g, rs);
  int components = 0;
  int isolated = 0;
  std::set<int> seen;
  for (int s : g.vertices()) {
    if (seen.contains(s)) continue;
    ++components;
    if (g.degree(s) == 0) ++isolated;
    std::vector<int> stack{s};
    seen.insert(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : g.incident(v)) {
        int w = g.edge(e).other(v);
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
  }
  const long long euler = static_cast<long long>(g.num_vertices()) -
                          static_cast<long long>(g.num_edges()) + faces + isolated;
  return euler == 2LL * components;
}

}  // namespace hybridplan::graph
