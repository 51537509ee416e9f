#include "hybridplan/one_fixed.hpp"

#include <algorithm>

#include "hybridplan/embedding_dag.hpp"
#include "hybridplan/error.hpp"
#include "hybridplan/planarity.hpp"

namespace hybridplan::one_fixed {

int Constraint::source() const {
  const auto s = instance.sources();
  if (s.size() != 1) throw Error(ErrorCode::kInvalidConstraint, "constraint needs exactly one source");
  return s.front();
}

namespace {

std::vector<int> sorted_edges(const graph::Graph& g, int v) {
  std::vector<int> out(g.incident(v).begin(), g.incident(v).end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Constraint trivial_constraint(const graph::Graph& g, int v) {
  Constraint c;
  c.instance.add_node(fpq::FpqTree::p_node(sorted_edges(g, v)));
  return c;
}

bool validate_constraint(const Constraint& c, const graph::Graph& g, int v) {
  const auto sources = c.instance.sources();
  if (sources.size() != 1) return false;
  if (c.instance.tree(sources.front()).leaves() != sorted_edges(g, v)) return false;
  if (c.instance.height() > 1) return false;
  if (sim::p_degree(c.instance) > 2) return false;
  return sim::is_k_fixed(c.instance, 1);
}

bool satisfies(const graph::Graph& /*g*/, const graph::RotationSystem& rs, int v, const Constraint& c) {
  const auto it = rs.find(v);
  if (it == rs.end()) return false;
  const int src = c.source();
  if (!sim::admits(c.instance.tree(src), it->second)) return false;
  sim::Instance pinned = c.instance;
  pinned.set_tree(src, fpq::FpqTree::f_node(it->second));
  return sim::solve(pinned).has_value();
}

std::optional<graph::RotationSystem> test_one_fixed_planarity(const graph::Graph& g,
                                                              const std::map<int, Constraint>& constraints,
                                                              const Options& options, Diagnostics* diagnostics) {
  Diagnostics local;
  Diagnostics& diag = diagnostics ? *diagnostics : local;
  const embedding::EmbeddingDag dag = embedding::build_embedding_dag(g);
  sim::Instance joined_constraints;
  std::map<int, int> m;
  for (int v : g.vertices()) {
    auto it = constraints.find(v);
    const Constraint c = it != constraints.end() ? it->second : trivial_constraint(g, v);
    if (it != constraints.end() && !validate_constraint(c, g, v)) {
      throw Error(ErrorCode::kInvalidConstraint, "constraint for vertex " + std::to_string(v) + " is invalid");
    }
    const int offset = static_cast<int>(joined_constraints.num_nodes());
    for (const auto& t : c.instance.trees()) joined_constraints.add_node(t);
    for (sim::Arc arc : c.instance.arcs()) {
      arc.tail += offset;
      arc.head += offset;
      joined_constraints.add_arc(std::move(arc));
    }
    m[dag.source_of_vertex.at(v)] = offset + c.source();
  }
  auto joined = sim::join(dag.instance, joined_constraints, m);
  if (!joined) return std::nullopt;
  diag.joined_nodes = joined->num_nodes();
  if (options.check_fixedness) {
    diag.joined_fixedness = sim::fixedness(*joined).max_value();
    if (auto norm = sim::normalize(*joined)) diag.normalized_fixedness = sim::fixedness(*norm).max_value();
  }
  auto sol = sim::solve(*joined, options.solve, &diag.stats);
  if (!sol) return std::nullopt;
  graph::RotationSystem rs;
  for (int v : g.vertices()) rs[v] = sol->at(dag.source_of_vertex.at(v));
  if (!graph::check_rotation_planarity(g, rs)) {
    throw Error(ErrorCode::kInternalError, "solution does not give a planar rotation system");
  }
  return rs;
}

}  // namespace hybridplan::one_fixed
