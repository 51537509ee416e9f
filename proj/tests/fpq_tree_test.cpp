#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "hybridplan/error.hpp"
#include "hybridplan/fpq_tree.hpp"
#include "support/generators.hpp"

using namespace hybridplan;
using namespace hybridplan::fpq;

namespace {

// Brute force: every cyclic order of the leaves, canonically rotated.
OrderSet all_orders(const std::vector<int>& leaves) {
  OrderSet out;
  if (leaves.empty()) return out;
  std::vector<int> rest(leaves.begin() + 1, leaves.end());
  do {
    std::vector<int> o{leaves.front()};
    o.insert(o.end(), rest.begin(), rest.end());
    out.insert(canonical_rotation(o));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("orders of flat nodes") {
  CHECK(orders(FpqTree::p_node({0, 1, 2, 3, 4})).size() == factorial(4));
  CHECK(orders(FpqTree::q_node({0, 1, 2, 3, 4})).size() == 2);
  CHECK(orders(FpqTree::f_node({0, 1, 2, 3, 4})).size() == 1);
  CHECK(orders(FpqTree::q_node({0, 1, 2})).size() == 2);
  CHECK(orders(FpqTree::f_node({0, 1, 2})).size() == 1);
  CHECK(orders(FpqTree::single_leaf(7)).size() == 1);
}

TEST_CASE("nested orders multiply") {
  // Unrooted P with neighbours 0, 1 and a P over {2,3,4}: (3-1)! * 3! / ... by enumeration
  // Around the outer node: 2 arrangements of three neighbours, inner P side: 3! orders.
  FpqTree t = parse_tree("P(0, 1, P(2, 3, 4))");
  CHECK(orders(t).size() == 2 * 6);
  FpqTree q = parse_tree("Q[0, P(1, 2), 3, 4]");
  CHECK(orders(q).size() == 2 * 2);
}

TEST_CASE("storage form is canonical") {
  FpqTree t = parse_tree("P(P(3, 1), P(P(0)), 2)");
  CHECK(t.to_string() == "P(0, 2, P(3, 1))");
  CHECK(t.node(t.root()).children.size() == 3);
  CHECK(parse_tree("F[2, 0, 1]").to_string() == "F[0, 1, 2]");
  CHECK(parse_tree("P(4, 5)").num_leaves() == 2);
}

TEST_CASE("parser rejects malformed notation") {
  CHECK_THROWS_AS(parse_tree("P(1, 2"), Error);
  CHECK_THROWS_AS(parse_tree("P(1, 1, 2)"), Error);
  CHECK_THROWS_AS(parse_tree("Q[1, 2) "), Error);
  CHECK_THROWS_AS(parse_tree("a"), Error);
  LeafNames names;
  FpqTree t = parse_tree("Q[a, b, c, d]", names);
  CHECK(t.num_leaves() == 4);
  CHECK(names.find("c").value() == 2);
  CHECK(t.to_string(names.names()) == "Q[a, b, c, d]");
}

TEST_CASE("reversal and renaming") {
  FpqTree t = parse_tree("F[0, Q[1, 2, 3], P(4, 5)]");
  OrderSet rev;
  for (const auto& o : orders(t)) rev.insert(reversed_order(o));
  CHECK(orders(t.reversed()) == rev);
  std::map<int, int> m{{0, 10}, {1, 11}, {2, 12}, {3, 13}, {4, 14}, {5, 15}};
  CHECK(orders(t.renamed(m)).size() == orders(t).size());
  CHECK_THROWS_AS(t.renamed({{0, 1}}), Error);
}

TEST_CASE("reduce matches brute force") {
  testgen::Rng rng(11);
  for (int iter = 0; iter < 600; ++iter) {
    const int n = std::uniform_int_distribution<int>(3, 7)(rng);
    FpqTree t = testgen::random_tree(rng, n);
    std::set<int> s = testgen::random_subset(rng, t.leaves());
    OrderSet expect;
    for (const auto& o : orders(t)) {
      if (testgen::consecutive(o, s)) expect.insert(o);
    }
    auto r = reduce(t, s);
    CAPTURE(t.to_string());
    CAPTURE(s.size());
    if (expect.empty()) {
      CHECK_FALSE(r.has_value());
    } else {
      REQUIRE(r.has_value());
      CHECK(orders(*r) == expect);
    }
  }
}

TEST_CASE("reduce on a P-node yields a Q-node") {
  auto r = reduce(FpqTree::p_node({0, 1, 2, 3, 4, 5}), {1, 2});
  REQUIRE(r);
  CHECK(orders(*r).size() == 2 * factorial(4));
  CHECK_FALSE(reduce(FpqTree::f_node({0, 1, 2, 3}), {0, 2}).has_value());
  CHECK_THROWS_AS(reduce(FpqTree::f_node({0, 1, 2, 3}), {9}), Error);
}

TEST_CASE("project matches restriction") {
  testgen::Rng rng(12);
  for (int iter = 0; iter < 400; ++iter) {
    const int n = std::uniform_int_distribution<int>(2, 7)(rng);
    FpqTree t = testgen::random_tree(rng, n);
    std::set<int> keep = testgen::random_subset(rng, t.leaves(), 0.6);
    if (keep.empty()) keep.insert(t.leaves().front());
    OrderSet expect;
    for (const auto& o : orders(t)) expect.insert(testgen::restrict_order(o, keep));
    CAPTURE(t.to_string());
    CHECK(orders(project(t, keep)) == expect);
  }
}

TEST_CASE("intersect matches brute force") {
  testgen::Rng rng(13);
  int nonempty = 0;
  for (int iter = 0; iter < 800; ++iter) {
    const int n = std::uniform_int_distribution<int>(3, 7)(rng);
    FpqTree a = testgen::random_tree(rng, n, 2.0, 1.0, 1.0);
    FpqTree b = testgen::random_tree(rng, n, 3.0, 1.0, 0.5);
    OrderSet oa = orders(a), ob = orders(b), expect;
    std::set_intersection(oa.begin(), oa.end(), ob.begin(), ob.end(),
                          std::inserter(expect, expect.begin()));
    auto r = intersect(a, b);
    CAPTURE(a.to_string());
    CAPTURE(b.to_string());
    if (expect.empty()) {
      CHECK_FALSE(r.has_value());
    } else {
      ++nonempty;
      REQUIRE(r.has_value());
      CHECK(orders(r->tree) == expect);
      for (const auto& [p, origin] : r->stems) {
        CHECK(r->tree.node(p).kind == NodeKind::kP);
        CHECK(b.with_fresh_origins().node(origin).kind == NodeKind::kP);
      }
    }
  }
  CHECK(nonempty > 100);
}

TEST_CASE("intersection with the universal tree is identity") {
  testgen::Rng rng(14);
  for (int iter = 0; iter < 100; ++iter) {
    FpqTree t = testgen::random_tree(rng, 6);
    auto r = intersect(FpqTree::p_node(t.leaves()), t);
    REQUIRE(r);
    CHECK(equivalent(r->tree, t));
    CHECK(orders(r->tree) == orders(t));
  }
  CHECK(orders(FpqTree::p_node({0, 1, 2, 3, 4})) == all_orders({0, 1, 2, 3, 4}));
}

TEST_CASE("canonical form agrees with order sets") {
  testgen::Rng rng(15);
  std::vector<FpqTree> pool;
  for (int iter = 0; iter < 150; ++iter) pool.push_back(testgen::random_tree(rng, 5));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i; j < pool.size(); ++j) {
      CAPTURE(pool[i].to_string());
      CAPTURE(pool[j].to_string());
      CHECK(equivalent(pool[i], pool[j]) == (orders(pool[i]) == orders(pool[j])));
    }
  }
  CHECK(equivalent(parse_tree("Q[0, 1, 2]"), parse_tree("P(0, 1, 2)")));
  CHECK_FALSE(equivalent(parse_tree("F[0, 1, 2]"), parse_tree("P(0, 1, 2)")));
}

TEST_CASE("orders refuses large trees") {
  std::vector<int> leaves(12);
  std::iota(leaves.begin(), leaves.end(), 0);
  CHECK_THROWS_AS(orders(FpqTree::p_node(leaves)), Error);
}
