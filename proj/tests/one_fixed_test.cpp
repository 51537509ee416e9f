#include <algorithm>
#include <cstdlib>

#include "doctest.h"
#include "hybridplan/error.hpp"
#include "hybridplan/one_fixed.hpp"
#include "hybridplan/planarity.hpp"
#include "support/generators.hpp"

using namespace hybridplan;
using namespace hybridplan::graph;
using namespace hybridplan::one_fixed;
using fpq::FpqTree;

namespace {

Graph complete(int n) {
  Graph g;
  for (int v = 0; v < n; ++v) g.add_vertex(v);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  }
  return g;
}

std::vector<int> edges_at(const Graph& g, int v) {
  std::vector<int> out(g.incident(v).begin(), g.incident(v).end());
  std::sort(out.begin(), out.end());
  return out;
}

Constraint random_constraint(testgen::Rng& rng, const Graph& g, int v) {
  const std::vector<int> es = edges_at(g, v);
  std::map<int, int> rename;
  for (std::size_t i = 0; i < es.size(); ++i) rename[static_cast<int>(i)] = es[i];
  Constraint c;
  c.instance.add_node(testgen::random_tree(rng, static_cast<int>(es.size()), 2.0, 1.0, 0.7).renamed(rename));
  const int sinks = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int k = 0; k < sinks && es.size() >= 3; ++k) {
    const int w = std::uniform_int_distribution<int>(3, static_cast<int>(es.size()))(rng);
    std::vector<int> leaves;
    for (int i = 0; i < w; ++i) leaves.push_back(1000 + 10 * k + i);
    std::map<int, int> to_leaves;
    for (int i = 0; i < w; ++i) to_leaves[i] = leaves[i];
    const int head = c.instance.add_node(testgen::random_tree(rng, w, 2.0, 1.0, 0.5).renamed(to_leaves));
    std::vector<int> image = es;
    std::shuffle(image.begin(), image.end(), rng);
    sim::Arc arc;
    arc.tail = 0;
    arc.head = head;
    arc.reversing = std::bernoulli_distribution(0.5)(rng);
    for (int i = 0; i < w; ++i) arc.phi[leaves[i]] = image[i];
    c.instance.add_arc(std::move(arc));
  }
  return c;
}

// Exhaustive check of one constraint against a fixed rotation.
bool satisfies_oracle(const RotationSystem& rs, int v, const Constraint& c) {
  if (!fpq::orders(c.instance.tree(0)).contains(fpq::canonical_rotation(rs.at(v)))) return false;
  sim::Instance pinned = c.instance;
  pinned.set_tree(0, FpqTree::f_node(rs.at(v)));
  return sim::solve_exhaustive(pinned).has_value();
}

}  // namespace

TEST_CASE("constraint validation") {
  const Graph k4 = complete(4);
  Constraint t = trivial_constraint(k4, 0);
  CHECK(validate_constraint(t, k4, 0));
  Constraint two = t;
  two.instance.add_node(FpqTree::p_node({0, 1, 2}));
  CHECK_FALSE(validate_constraint(two, k4, 0));
  Constraint wrong;
  wrong.instance.add_node(FpqTree::p_node({0, 1, 7}));
  CHECK_FALSE(validate_constraint(wrong, k4, 0));
}

TEST_CASE("satisfies on fixed orders") {
  const Graph k4 = complete(4);
  auto rs = planar_embedding(k4);
  REQUIRE(rs);
  CHECK(satisfies(k4, *rs, 0, trivial_constraint(k4, 0)));
  Constraint fixed;
  fixed.instance.add_node(FpqTree::f_node(rs->at(0)));
  CHECK(satisfies(k4, *rs, 0, fixed));
  CHECK_FALSE(satisfies(k4, reflect(*rs), 0, fixed));
}

TEST_CASE("K4 with trivial constraints") {
  const Graph k4 = complete(4);
  auto rs = test_one_fixed_planarity(k4, {});
  REQUIRE(rs);
  CHECK(check_rotation_planarity(k4, *rs));
  Constraint fixed;
  fixed.instance.add_node(FpqTree::f_node(rs->at(0)));
  auto again = test_one_fixed_planarity(k4, {{0, fixed}});
  REQUIRE(again);
  CHECK(fpq::canonical_rotation(again->at(0)) == fpq::canonical_rotation(rs->at(0)));
  Constraint bad;
  bad.instance.add_node(FpqTree::p_node({0, 1, 2, 9}));
  CHECK_THROWS_AS(test_one_fixed_planarity(k4, {{0, bad}}), Error);
}

TEST_CASE("one-fixed verdicts agree with the rotation oracle") {
  testgen::Rng rng(41);
  int yes = 0, no = 0;
  for (int iter = 0; iter < 150; ++iter) {
    const int n = std::uniform_int_distribution<int>(4, 6)(rng);
    Graph g = testgen::random_biconnected_planar(rng, n, std::min({10, 2 * n, 3 * n - 6}), iter % 5 == 0);
    if (g.num_edges() > 10) continue;
    std::map<int, Constraint> cs;
    for (int v : g.vertices()) {
      if (!std::bernoulli_distribution(0.6)(rng)) continue;
      Constraint c = random_constraint(rng, g, v);
      if (validate_constraint(c, g, v)) cs[v] = std::move(c);
    }
    bool expect = false;
    for (const auto& rs : testgen::planar_rotations(g)) {
      bool all = true;
      for (const auto& [v, c] : cs) {
        if (!satisfies_oracle(rs, v, c)) {
          all = false;
          break;
        }
      }
      if (all) {
        expect = true;
        break;
      }
    }
    Options opt;
    opt.check_fixedness = true;
    Diagnostics diag;
    auto got = test_one_fixed_planarity(g, cs, opt, &diag);
    REQUIRE(got.has_value() == expect);
    if (got) {
      ++yes;
      CHECK(check_rotation_planarity(g, *got));
      for (const auto& [v, c] : cs) CHECK(satisfies(g, *got, v, c));
    } else {
      ++no;
    }
    if (diag.joined_fixedness >= 0) {
      if (diag.joined_fixedness > 2 && std::getenv("DUMP_CASE")) {
        for (const auto& e : g.edges()) MESSAGE(e.id << ": " << e.u << "-" << e.v);
        for (const auto& [v, c] : cs) MESSAGE("C(" << v << ") = " << sim::to_json(c.instance));
        FAIL("dumped");
      }
      CHECK(diag.joined_fixedness <= 2);
      if (diag.normalized_fixedness >= 0) CHECK(diag.normalized_fixedness <= 2);
    }
  }
  CHECK(yes > 20);
  CHECK(no > 20);
}
