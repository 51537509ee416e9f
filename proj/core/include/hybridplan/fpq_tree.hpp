#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hybridplan::fpq {

namespace detail {
struct Assembler;
}

enum class NodeKind { kLeaf, kP, kQ, kF };

struct Node {
  NodeKind kind = NodeKind::kLeaf;
  int leaf = -1;              // leaf id, kLeaf only
  std::vector<int> children;  // node indices
  int parent = -1;
  // Index of the node this one was derived from in the tree an operation
  // started from; -1 for nodes created from scratch.
  int origin = -1;
};

// A set of cyclic orders, each stored rotated so that its smallest leaf id
// comes first. Reflections are distinct orders.
using CyclicOrder = std::vector<int>;
using OrderSet = std::set<CyclicOrder>;

CyclicOrder canonical_rotation(std::vector<int> order);
CyclicOrder reversed_order(const CyclicOrder& order);

// An FPQ-tree over a set of integer leaf ids, read as an unrooted tree: the
// cyclic neighbour order of an inner node is (parent, children...). P-node
// neighbours permute freely, Q-node neighbours keep their order up to
// reversal, F-node neighbours keep their order exactly.
//
// Trees are kept in a canonical storage form: no inner node has degree < 3
// (except the two-leaf tree, stored as a P root with two leaves), and the
// root is the inner node adjacent to the smallest leaf, whose own neighbour
// list starts with that leaf.
class FpqTree {
 public:
  FpqTree() = default;

  static FpqTree single_leaf(int leaf);
  static FpqTree p_node(const std::vector<int>& leaves);
  static FpqTree q_node(const std::vector<int>& leaves);
  static FpqTree f_node(const std::vector<int>& leaves);
  // Canonicalizes an arbitrary rooted node array. Inner nodes of degree 2 are
  // spliced out and childless inner nodes dropped. Throws on duplicate leaves.
  static FpqTree from_nodes(std::vector<Node> nodes, int root);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_[i]; }
  int root() const { return root_; }
  bool empty() const { return nodes_.empty(); }

  // Sorted leaf ids.
  std::vector<int> leaves() const;
  std::size_t num_leaves() const;
  bool has_leaf(int leaf) const;
  int leaf_node(int leaf) const;

  // Cyclic neighbour list of an inner node: parent first (if any).
  std::vector<int> neighbours(int node) const;
  // Leaf id -> index into neighbours(node) of the direction containing it.
  std::map<int, int> neighbour_groups(int node) const;
  std::vector<int> inner_nodes() const;
  // The two-leaf root is not counted as a P-node.
  std::vector<int> p_nodes() const;
  std::size_t count(NodeKind kind) const;

  // Leaves of the subtree hanging below `node` in storage orientation.
  std::vector<int> subtree_leaves(int node) const;

  // True iff the tree represents exactly one cyclic order.
  bool is_rigid() const;
  // The order obtained by reading every node as stored.
  CyclicOrder first_order() const;

  // Tree with the same leaves whose orders are the reversals of this one's.
  FpqTree reversed() const;
  // Applies an injective leaf renaming (every leaf must be mapped).
  FpqTree renamed(const std::map<int, int>& mapping) const;
  // Copy whose origins point at its own node indices.
  FpqTree with_fresh_origins() const;
  FpqTree with_kind(int node, NodeKind kind, bool reverse_children) const;

  std::string to_string() const;
  std::string to_string(const std::map<int, std::string>& names) const;

 private:
  friend struct detail::Assembler;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Exact orders of a tree by enumeration; throws TooLarge above max_leaves.
OrderSet orders(const FpqTree& t, std::size_t max_leaves = 9);

// Restriction to `keep` (which must be a nonempty subset of the leaves).
FpqTree project(const FpqTree& t, const std::set<int>& keep);

// Orders of t in which `s` is consecutive; nullopt when there are none.
std::optional<FpqTree> reduce(const FpqTree& t, const std::set<int>& s);

// Maps every P-node of an intersection result to the P-node of the second
// operand it stems from. Keys and values are node indices.
using StemMap = std::map<int, int>;

struct Intersection {
  FpqTree tree;
  StemMap stems;
};

// orders(result) = orders(a) ∩ orders(b); nullopt when empty.
std::optional<Intersection> intersect(const FpqTree& a, const FpqTree& b);

bool equivalent(const FpqTree& a, const FpqTree& b);

// Canonical structural encoding: equal strings iff equal order sets.
std::string canonical_form(const FpqTree& t);

// Text notation: P(...), Q[...] and F[...].
// Leaves are decimal integers or identifiers; identifiers are interned into
// `names`, numbering new names from its current size.
class LeafNames {
 public:
  int intern(std::string_view name);
  std::optional<int> find(std::string_view name) const;
  const std::map<int, std::string>& names() const { return by_id_; }

 private:
  std::map<std::string, int, std::less<>> ids_;
  std::map<int, std::string> by_id_;
};

FpqTree parse_tree(std::string_view text);
FpqTree parse_tree(std::string_view text, LeafNames& names);

}  // namespace hybridplan::fpq
