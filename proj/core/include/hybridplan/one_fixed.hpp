#pragma once

#include <map>
#include <optional>

#include "hybridplan/graph.hpp"
#include "hybridplan/sim_fpq.hpp"

namespace hybridplan::one_fixed {

// A single-source instance whose source has the edges of one vertex as leaves.
struct Constraint {
  sim::Instance instance;
  int source() const;
};

// Single P-node over E(v) without children.
Constraint trivial_constraint(const graph::Graph& g, int v);

bool validate_constraint(const Constraint& c, const graph::Graph& g, int v);

// True iff c has a solution whose source order is the rotation at v.
bool satisfies(const graph::Graph& g, const graph::RotationSystem& rs, int v, const Constraint& c);

struct Options {
  sim::SolveOptions solve;
  // Computes the fixedness of the joined and normalized instances (costly).
  bool check_fixedness = false;
};

struct Diagnostics {
  std::size_t joined_nodes = 0;
  int joined_fixedness = -1;
  int normalized_fixedness = -1;
  sim::SolveStats stats;
};

// Vertices without an entry get the trivial constraint. Throws
// NotBiconnected, NotPlanar or InvalidConstraint.
std::optional<graph::RotationSystem> test_one_fixed_planarity(
    const graph::Graph& g, const std::map<int, Constraint>& constraints, const Options& options = {},
    Diagnostics* diagnostics = nullptr);

}  // namespace hybridplan::one_fixed
