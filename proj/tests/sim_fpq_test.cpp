#include <algorithm>

#include "doctest.h"
#include "hybridplan/error.hpp"
#include "hybridplan/sim_fpq.hpp"
#include "support/generators.hpp"

using namespace hybridplan;
using namespace hybridplan::sim;
using fpq::FpqTree;
using fpq::parse_tree;

namespace {

Arc identity_arc(int tail, int head, const std::vector<int>& leaves, bool reversing = false) {
  Arc a;
  a.tail = tail;
  a.head = head;
  a.reversing = reversing;
  for (int l : leaves) a.phi[l] = l;
  return a;
}

std::set<std::vector<std::vector<int>>> solutions_of(const std::optional<Instance>& inst) {
  if (!inst) return {};
  return testgen::source_solutions(*inst);
}

}  // namespace

TEST_CASE("fixes on tiny trees") {
  Instance inst;
  inst.add_node(FpqTree::p_node({0, 1, 2}));
  inst.add_node(FpqTree::p_node({0, 1, 2}));
  inst.add_arc(identity_arc(0, 1, {0, 1, 2}));
  CHECK(fixes(inst, 0, inst.tree(0).root(), inst.tree(1).root()));

  Instance two;
  two.add_node(FpqTree::p_node({0, 1, 2}));
  two.add_node(FpqTree::p_node({0, 1}));
  two.add_arc(identity_arc(0, 1, {0, 1}));
  for (int mu : two.tree(0).inner_nodes()) {
    for (int nu : two.tree(1).inner_nodes()) CHECK_FALSE(fixes(two, 0, mu, nu));
  }
}

TEST_CASE("arc validation") {
  Instance inst;
  inst.add_node(FpqTree::p_node({0, 1, 2}));
  inst.add_node(FpqTree::p_node({5, 6, 7}));
  Arc bad;
  bad.tail = 0;
  bad.head = 1;
  bad.phi = {{5, 0}, {6, 0}, {7, 1}};
  CHECK_THROWS_AS(inst.add_arc(bad), Error);
  bad.phi = {{5, 0}, {6, 1}};
  CHECK_THROWS_AS(inst.add_arc(bad), Error);
  bad.phi = {{5, 0}, {6, 1}, {7, 9}};
  CHECK_THROWS_AS(inst.add_arc(bad), Error);
  bad.phi = {{5, 0}, {6, 1}, {7, 2}};
  inst.add_arc(bad);
  Arc back;
  back.tail = 1;
  back.head = 0;
  back.phi = {{0, 5}, {1, 6}, {2, 7}};
  CHECK_THROWS_AS(inst.add_arc(back), Error);
}

TEST_CASE("normalize pushes rigid parents down") {
  Instance inst;
  inst.add_node(parse_tree("F[0, 1, 2]"));
  inst.add_node(parse_tree("P(0, 1, 2)"));
  inst.add_arc(identity_arc(0, 1, {0, 1, 2}));
  auto norm = normalize(inst);
  REQUIRE(norm);
  CHECK(fpq::equivalent(norm->tree(1), parse_tree("F[0, 1, 2]")));
  CHECK(is_normalized(*norm));

  Instance bad;
  bad.add_node(parse_tree("F[0, 1, 2]"));
  bad.add_node(parse_tree("F[0, 2, 1]"));
  bad.add_arc(identity_arc(0, 1, {0, 1, 2}));
  CHECK_FALSE(normalize(bad).has_value());
  CHECK_FALSE(solve(bad).has_value());

  // A reversing arc accepts the mirrored order.
  Instance rev;
  rev.add_node(parse_tree("F[0, 1, 2]"));
  rev.add_node(parse_tree("F[0, 2, 1]"));
  rev.add_arc(identity_arc(0, 1, {0, 1, 2}, true));
  CHECK(solve(rev).has_value());
}

TEST_CASE("normalize is idempotent") {
  testgen::Rng rng(21);
  for (int iter = 0; iter < 80; ++iter) {
    Instance inst = testgen::random_instance(rng, {});
    auto once = normalize(inst);
    if (!once) continue;
    auto twice = normalize(*once);
    REQUIRE(twice);
    for (std::size_t v = 0; v < inst.num_nodes(); ++v) {
      CHECK(fpq::equivalent(once->tree(static_cast<int>(v)), twice->tree(static_cast<int>(v))));
    }
  }
}

TEST_CASE("fixedness of small instances") {
  Instance lone;
  lone.add_node(FpqTree::p_node({0, 1, 2, 3}));
  CHECK(fixedness(lone).max_value() == 0);
  CHECK(p_degree(lone) == 0);

  // A source P-node fixed by two children.
  Instance two;
  two.add_node(FpqTree::p_node({0, 1, 2}));
  two.add_node(FpqTree::q_node({10, 11, 12}));
  two.add_node(FpqTree::q_node({20, 21, 22}));
  Arc a = identity_arc(0, 1, {});
  a.phi = {{10, 0}, {11, 1}, {12, 2}};
  two.add_arc(a);
  a.head = 2;
  a.phi = {{20, 0}, {21, 1}, {22, 2}};
  two.add_arc(a);
  CHECK(fixedness(two).value(0, two.tree(0).root()) == 2);
  CHECK(is_k_fixed(two, 2));
  CHECK_FALSE(is_k_fixed(two, 1));

  // A sink P-node that fixes no P-node of its parent.
  Instance sink;
  sink.add_node(FpqTree::q_node({0, 1, 2, 3}));
  sink.add_node(FpqTree::p_node({10, 11, 12}));
  a = identity_arc(0, 1, {});
  a.phi = {{10, 0}, {11, 1}, {12, 2}};
  sink.add_arc(a);
  const auto rep = fixedness(sink);
  CHECK(rep.value(1, sink.tree(1).root()) == 0);
  REQUIRE(rep.entries.size() == 1);
  CHECK_FALSE(rep.entries.front().parent_terms.front().has_value());

  Instance chain;
  chain.add_node(FpqTree::q_node({0, 1, 2, 3}));
  chain.add_node(FpqTree::q_node({0, 1, 2}));
  chain.add_node(FpqTree::q_node({0, 1}));
  chain.add_arc(identity_arc(0, 1, {0, 1, 2}));
  chain.add_arc(identity_arc(1, 2, {0, 1}));
  CHECK(p_degree(chain) == 0);
  CHECK(is_k_fixed(chain, 0));
}

TEST_CASE("solve agrees with exhaustive search") {
  testgen::Rng rng(22);
  int feasible = 0, infeasible = 0;
  for (int iter = 0; iter < 400; ++iter) {
    testgen::InstanceShape shape;
    shape.sources = std::uniform_int_distribution<int>(1, 2)(rng);
    shape.sinks = std::uniform_int_distribution<int>(0, 2)(rng);
    shape.chains = iter % 3 == 0;
    shape.rigid_bias = iter % 2 ? 0.5 : 0.0;
    Instance inst = testgen::random_instance(rng, shape);
    auto ref = solve_exhaustive(inst);
    auto got = solve(inst);
    CAPTURE(to_json(inst));
    REQUIRE(got.has_value() == ref.has_value());
    if (got) {
      ++feasible;
      CHECK_FALSE(check_solution(inst, *got).has_value());
      CHECK_FALSE(check_solution(inst, *ref).has_value());
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 20);
}

TEST_CASE("normalization keeps source solutions and fixedness bound") {
  testgen::Rng rng(23);
  int normalized_ok = 0;
  for (int iter = 0; iter < 200; ++iter) {
    testgen::InstanceShape shape;
    shape.sources = 2;
    shape.sinks = 3;
    shape.max_leaves = 5;
    shape.chains = iter % 2 == 0;
    Instance inst = testgen::random_instance(rng, shape);
    auto norm = normalize(inst);
    CAPTURE(to_json(inst));
    CHECK(solutions_of(norm) == testgen::source_solutions(inst));
    if (!norm) continue;
    CHECK(fixedness(*norm).max_value() <= fixedness(inst).max_value());
    CHECK(is_normalized(*norm));
    const auto d1 = fixedness(*norm);
    const auto d2 = normalized_fixedness(*norm);
    REQUIRE(d1.entries.size() == d2.entries.size());
    for (std::size_t i = 0; i < d1.entries.size(); ++i) CHECK(d1.entries[i].value == d2.entries[i].value);
    ++normalized_ok;
  }
  CHECK(normalized_ok > 40);
}

TEST_CASE("join intersects source solutions") {
  testgen::Rng rng(24);
  for (int iter = 0; iter < 150; ++iter) {
    testgen::InstanceShape shape;
    shape.sources = 2;
    shape.sinks = 1;
    shape.max_leaves = 5;
    Instance a = testgen::random_instance(rng, shape);
    Instance b = testgen::random_instance(rng, shape);
    // Give b the same sources by renaming its source leaves onto a's.
    Instance b2;
    std::map<int, int> m;
    for (int s : b.sources()) {
      if (a.tree(s).num_leaves() == b.tree(s).num_leaves()) m[s] = s;
    }
    if (m.size() != 2) continue;
    std::map<int, int> rename;
    for (int s : b.sources()) {
      const auto la = a.tree(s).leaves();
      const auto lb = b.tree(s).leaves();
      for (std::size_t i = 0; i < la.size(); ++i) rename[lb[i]] = la[i];
    }
    for (std::size_t v = 0; v < b.num_nodes(); ++v) {
      const int id = static_cast<int>(v);
      b2.add_node(b.is_source(id) ? b.tree(id).renamed(rename) : b.tree(id));
    }
    for (Arc arc : b.arcs()) {
      for (auto& [h, t] : arc.phi) t = rename.at(t);
      b2.add_arc(arc);
    }
    auto j = join(a, b2, m);
    auto sa = testgen::source_solutions(a);
    auto sb = testgen::source_solutions(b2);
    std::set<std::vector<std::vector<int>>> both;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(both, both.begin()));
    CHECK(solutions_of(j) == both);
  }
  Instance x;
  x.add_node(parse_tree("F[0, 1, 2]"));
  Instance y;
  y.add_node(parse_tree("F[0, 2, 1]"));
  CHECK_FALSE(join(x, y, {{0, 0}}).has_value());
  Instance z;
  z.add_node(parse_tree("F[0, 1, 3]"));
  CHECK_THROWS_AS(join(x, z, {{0, 0}}), Error);
  auto self = join(x, x, {{0, 0}});
  REQUIRE(self);
  CHECK(testgen::source_solutions(*self) == testgen::source_solutions(x));
}

TEST_CASE("JSON round trip") {
  Instance inst = instance_from_json(R"js({
    "nodes": ["P(a, b, c, d)", "Q[x, y, z]"],
    "arcs": [{"tail": 0, "head": 1, "phi": {"x": "a", "y": "b", "z": "d"}, "reversing": true}]
  })js");
  CHECK(inst.num_nodes() == 2);
  CHECK(inst.arc(0).reversing);
  Instance again = instance_from_json(to_json(inst));
  CHECK(to_json(again) == to_json(inst));
  CHECK_THROWS_AS(instance_from_json("{"), Error);
  CHECK_THROWS_AS(instance_from_json(R"js({"nodes": ["P(a, b"]})js"), Error);
}

TEST_CASE("solver budget") {
  testgen::Rng rng(25);
  Instance inst = testgen::random_instance(rng, {});
  SolveOptions tight;
  tight.node_budget = 0;
  CHECK_THROWS_AS(solve(inst, tight), Error);
}
