#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridplan/fpq_tree.hpp"

namespace hybridplan::sim {

using fpq::CyclicOrder;
using fpq::FpqTree;

// phi maps every leaf of the head tree to a leaf of the tail tree. A solution
// must satisfy O_tail|phi(L(head)) = phi(O_head), or phi(reverse(O_head)) for
// reversing arcs.
struct Arc {
  int tail = -1;
  int head = -1;
  std::map<int, int> phi;
  bool reversing = false;
};

class Instance {
 public:
  int add_node(FpqTree tree);
  // Validates phi against the two trees and keeps the DAG acyclic.
  int add_arc(Arc arc);

  std::size_t num_nodes() const { return trees_.size(); }
  const FpqTree& tree(int node) const { return trees_[node]; }
  void set_tree(int node, FpqTree tree);
  const std::vector<FpqTree>& trees() const { return trees_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int index) const { return arcs_[index]; }
  // Arc indices.
  const std::vector<int>& in_arcs(int node) const { return in_[node]; }
  const std::vector<int>& out_arcs(int node) const { return out_[node]; }

  bool is_source(int node) const { return in_[node].empty(); }
  std::vector<int> sources() const;
  std::vector<int> topological_order() const;
  // Longest path length in arcs.
  int height() const;

  // Display names for leaf ids; optional.
  std::map<int, std::string> leaf_names;

 private:
  std::vector<FpqTree> trees_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

// Node id -> cyclic order of that node's leaves.
using Solution = std::map<int, CyclicOrder>;

// True iff order is one of the orders represented by t.
bool admits(const FpqTree& t, const CyclicOrder& order);

// Checks membership and every arc; returns a description of the first
// violation, or nullopt for a valid solution.
std::optional<std::string> check_solution(const Instance& inst, const Solution& sol);

// True iff some three head leaves are pairwise separated by mu_head in the
// head tree while their images are pairwise separated by mu_tail in the tail.
bool fixes(const Instance& inst, int arc_index, int mu_tail, int mu_head);

struct FixednessEntry {
  int node = -1;    // instance node
  int p_node = -1;  // tree node index of the P-node
  int value = 0;
  int omega = 0;
  // One term per incoming arc: max over the fixed parent P-nodes of
  // fixed(nu) - 1, or nullopt when there is none.
  std::vector<std::optional<int>> parent_terms;
};

struct FixednessReport {
  std::vector<FixednessEntry> entries;
  int max_value() const;
  // Fixedness of a specific P-node; throws if it is not in the report.
  int value(int node, int p_node) const;
};

FixednessReport fixedness(const Instance& inst);
// Older recurrence for normalized instances, using the unique tail node fixed
// by each P-node; throws InvalidConstraint if inst is not normalized.
FixednessReport normalized_fixedness(const Instance& inst);

// True iff every P-node of every head fixes exactly one node of the tail.
bool is_normalized(const Instance& inst);
// nullopt when some intersection becomes empty.
std::optional<Instance> normalize(const Instance& inst);

bool is_k_fixed(const Instance& inst, int k);
int p_degree(const Instance& inst);

// `m` maps sources of a to sources of b with equal leaf sets. The result
// keeps a's node ids, followed by b's non-source nodes in order.
// Throws NotJoinable; nullopt when an intersection is empty.
std::optional<Instance> join(const Instance& a, const Instance& b, const std::map<int, int>& m);

struct SolveOptions {
  // Search nodes explored before BudgetExceeded is thrown.
  std::size_t node_budget = 2'000'000;
};

struct SolveStats {
  std::size_t search_nodes = 0;
  std::size_t intersections = 0;
};

std::optional<Solution> solve(const Instance& inst, const SolveOptions& options = {},
                              SolveStats* stats = nullptr);

// Reference solver by enumeration of source orders. Throws TooLarge beyond
// max_leaves leaves in any source tree or more than max_nodes nodes.
std::optional<Solution> solve_exhaustive(const Instance& inst, std::size_t max_leaves = 7,
                                         std::size_t max_nodes = 6);

std::string to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);

}  // namespace hybridplan::sim
