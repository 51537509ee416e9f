#include "hybridplan/families.hpp"

#include <algorithm>
#include <cmath>

#include "hybridplan/error.hpp"

namespace hybridplan::families {

using graph::FlatClusteredGraph;

namespace {

// Adds `count` clusters of `size` fresh vertices.
void add_clusters(FlatClusteredGraph& fcg, int count, int size) {
  int next = static_cast<int>(fcg.graph.num_vertices());
  for (int i = 0; i < count; ++i) {
    graph::Cluster c;
    c.id = static_cast<int>(fcg.clusters.size()) + 1;
    for (int j = 0; j < size; ++j) {
      fcg.graph.add_vertex(next);
      c.vertices.push_back(next++);
    }
    fcg.clusters.push_back(std::move(c));
  }
}

void link(FlatClusteredGraph& fcg, int u, int su, int v, int sv) {
  const int e = fcg.graph.add_edge(u, v);
  fcg.sides.push_back({e, u, su});
  fcg.sides.push_back({e, v, sv});
}

}  // namespace

FlatClusteredGraph cycle_of_clusters(int n) {
  const int k = std::max(2, n / 4);
  FlatClusteredGraph fcg;
  add_clusters(fcg, k, 4);
  for (int i = 0; i < k; ++i) {
    const auto& a = fcg.clusters[i].vertices;
    const auto& b = fcg.clusters[(i + 1) % k].vertices;
    for (int j = 0; j < 4; ++j) link(fcg, a[j], graph::kRight, b[j], graph::kLeft);
  }
  return fcg;
}

FlatClusteredGraph grid_frame(int n) {
  const int side = std::max(2, static_cast<int>(std::lround(std::sqrt(n / 2.0))));
  FlatClusteredGraph fcg;
  add_clusters(fcg, side * side, 2);
  const auto at = [&](int r, int c) -> const std::vector<int>& { return fcg.clusters[r * side + c].vertices; };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) {
        for (int j = 0; j < 2; ++j) link(fcg, at(r, c)[j], graph::kRight, at(r, c + 1)[j], graph::kLeft);
      }
      if (r + 1 < side) {
        for (int j = 0; j < 2; ++j) link(fcg, at(r, c)[j], graph::kBottom, at(r + 1, c)[j], graph::kTop);
      }
    }
  }
  return fcg;
}

FlatClusteredGraph parallel_bundles(int n) {
  const int size = std::max(2, n / 2);
  FlatClusteredGraph fcg;
  add_clusters(fcg, 2, size);
  const auto& a = fcg.clusters[0].vertices;
  const auto& b = fcg.clusters[1].vertices;
  for (int j = 0; j < size; ++j) {
    link(fcg, a[j], graph::kBottom, b[size - 1 - j], graph::kTop);
    link(fcg, a[j], graph::kRight, b[j], graph::kRight);
  }
  return fcg;
}

FlatClusteredGraph make_family(const std::string& name, int n) {
  if (name == "cycle" || name == "cycle-of-clusters") return cycle_of_clusters(n);
  if (name == "grid" || name == "grid-frame") return grid_frame(n);
  if (name == "bundles" || name == "parallel-bundles") return parallel_bundles(n);
  throw Error(ErrorCode::kParseError, "unknown family " + name);
}

std::vector<std::string> family_names() { return {"cycle-of-clusters", "grid-frame", "parallel-bundles"}; }

}  // namespace hybridplan::families
