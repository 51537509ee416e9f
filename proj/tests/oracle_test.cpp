#include <algorithm>

#include "doctest.h"
#include "hybridplan/error.hpp"
#include "hybridplan/oracle.hpp"
#include "hybridplan/planarity.hpp"
#include "support/clustered.hpp"

using namespace hybridplan;
using namespace hybridplan::graph;
using namespace hybridplan::oracle;

namespace {

Graph complete(int n) {
  Graph g;
  for (int v = 0; v < n; ++v) g.add_vertex(v);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  }
  return g;
}

RotationSystem min_first(RotationSystem rs) {
  for (auto& [v, r] : rs) std::rotate(r.begin(), std::min_element(r.begin(), r.end()), r.end());
  return rs;
}

}  // namespace

TEST_CASE("planar rotation systems of small complete graphs") {
  CHECK(oracle_planar_rotations(complete(3)).size() == 1);
  const auto k4 = oracle_planar_rotations(complete(4));
  CHECK(!k4.empty());
  for (const auto& rs : k4) CHECK(k4.contains(min_first(reflect(rs))));
  CHECK(oracle_planar_rotations(complete(5)).empty());
  CHECK_THROWS_AS(oracle_planar_rotations(complete(5), 100), Error);
}

TEST_CASE("edgeless clustered instances are planar") {
  const auto fcg = testgen::clustered(4, {{0, 1}, {2, 3}}, {{0, -1, 1, -1}});
  CHECK(oracle_rci(fcg));
  CHECK(oracle_polylink(fcg));
}

TEST_CASE("oracle budgets are enforced before enumeration") {
  const auto fcg = testgen::clustered(5, {{0, 1, 2, 3}}, {{0, kTop, 4, -1}, {1, kTop, 4, -1}});
  try {
    oracle_rci(fcg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
}

TEST_CASE("oracles and fixtures are deterministic") {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_nodetrix(a);
    const auto y = random_nodetrix(b);
    REQUIRE(x.graph.edges() == y.graph.edges());
    CHECK(oracle_rci(x) == oracle_rci(y));
    CHECK(is_biconnected(x.graph) == is_biconnected(y.graph));
  }
}

TEST_CASE("sigma 2 clusters match a direct enumeration of vertex orders") {
  // Each cluster has one pair; the frame is a two-vertex multigraph, planar
  // iff the rotation at one end is the reverse of the other.
  Rng rng(41);
  FixtureShape shape;
  shape.max_clusters = 2;
  shape.max_unclustered = 0;
  shape.max_pairs = 1;
  shape.antipodal_bias = 0.5;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto fcg = random_polylink(rng, shape);
    if (fcg.clusters.size() != 2) continue;
    ++checked;
    // Linear order of the endpoints around each cluster: side 0 forward
    // through the permutation, side 1 backward.
    std::vector<std::set<std::vector<int>>> around(2);
    for (int c = 0; c < 2; ++c) {
      std::vector<int> perm = fcg.clusters[c].vertices;
      std::sort(perm.begin(), perm.end());
      do {
        std::vector<std::vector<int>> per_side(2);
        for (int s = 0; s < 2; ++s) {
          std::vector<int> seq = perm;
          if (s == 1) std::reverse(seq.begin(), seq.end());
          for (int v : seq) {
            for (const auto& sa : fcg.sides) {
              if (sa.endpoint == v && sa.side == s) per_side[s].push_back(sa.edge);
            }
          }
        }
        // Edges of one vertex on one side may be permuted; enumerate by brute force.
        std::vector<int> all = per_side[0];
        all.insert(all.end(), per_side[1].begin(), per_side[1].end());
        std::vector<int> cand = all;
        std::sort(cand.begin(), cand.end());
        do {
          bool ok = true;
          // cand must group like `all`: same (vertex, side) key sequence
          for (std::size_t i = 0; i < all.size() && ok; ++i) {
            const auto key = [&](int e) {
              for (const auto& sa : fcg.sides) {
                const auto ci = fcg.cluster_of(sa.endpoint);
                if (sa.edge == e && ci && *ci == static_cast<std::size_t>(c)) return std::pair{sa.endpoint, sa.side};
              }
              return std::pair{-1, -1};
            };
            ok = key(cand[i]) == key(all[i]);
          }
          if (ok) {
            std::vector<int> r = cand;
            std::rotate(r.begin(), std::min_element(r.begin(), r.end()), r.end());
            around[c].insert(r);
          }
        } while (std::next_permutation(cand.begin(), cand.end()));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    bool planar = false;
    for (const auto& r : around[0]) {
      std::vector<int> back(r.rbegin(), r.rend());
      std::rotate(back.begin(), std::min_element(back.begin(), back.end()), back.end());
      if (around[1].contains(back)) planar = true;
    }
    CHECK(planar == oracle_polylink(fcg));
  }
  CHECK(checked > 50);
}
