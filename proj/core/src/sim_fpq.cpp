#include "hybridplan/sim_fpq.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "hybridplan/error.hpp"

namespace hybridplan::sim {

using fpq::NodeKind;

int Instance::add_node(FpqTree tree) {
  if (tree.empty()) throw Error(ErrorCode::kInvalidConstraint, "empty tree in instance");
  trees_.push_back(std::move(tree));
  in_.emplace_back();
  out_.emplace_back();
  return static_cast<int>(trees_.size()) - 1;
}

void Instance::set_tree(int node, FpqTree tree) {
  if (tree.leaves() != trees_[node].leaves()) {
    throw Error(ErrorCode::kLeafSetMismatch, "replacement tree changes the leaf set");
  }
  trees_[node] = std::move(tree);
}

int Instance::add_arc(Arc arc) {
  const int n = static_cast<int>(trees_.size());
  if (arc.tail < 0 || arc.tail >= n || arc.head < 0 || arc.head >= n || arc.tail == arc.head) {
    throw Error(ErrorCode::kInvalidConstraint, "arc endpoints out of range");
  }
  const FpqTree& head = trees_[arc.head];
  const FpqTree& tail = trees_[arc.tail];
  std::set<int> image;
  for (int l : head.leaves()) {
    auto it = arc.phi.find(l);
    if (it == arc.phi.end()) {
      throw Error(ErrorCode::kInvalidConstraint, "phi misses head leaf " + std::to_string(l));
    }
    if (!tail.has_leaf(it->second)) {
      throw Error(ErrorCode::kLeafNotPresent, "phi image " + std::to_string(it->second) + " not in tail");
    }
    if (!image.insert(it->second).second) throw Error(ErrorCode::kInvalidConstraint, "phi is not injective");
  }
  if (arc.phi.size() != head.num_leaves()) {
    throw Error(ErrorCode::kInvalidConstraint, "phi maps leaves outside the head");
  }
  // Reject cycles: the tail must not be reachable from the head.
  std::vector<bool> seen(trees_.size(), false);
  std::vector<int> stack{arc.head};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (x == arc.tail) throw Error(ErrorCode::kInvalidConstraint, "arc would create a cycle");
    if (seen[x]) continue;
    seen[x] = true;
    for (int a : out_[x]) stack.push_back(arcs_[a].head);
  }
  arcs_.push_back(std::move(arc));
  const int id = static_cast<int>(arcs_.size()) - 1;
  out_[arcs_[id].tail].push_back(id);
  in_[arcs_[id].head].push_back(id);
  return id;
}

std::vector<int> Instance::sources() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < trees_.size(); ++v) {
    if (in_[v].empty()) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<int> Instance::topological_order() const {
  std::vector<int> indeg(trees_.size());
  std::deque<int> ready;
  for (std::size_t v = 0; v < trees_.size(); ++v) {
    indeg[v] = static_cast<int>(in_[v].size());
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int a : out_[v]) {
      if (--indeg[arcs_[a].head] == 0) ready.push_back(arcs_[a].head);
    }
  }
  return order;
}

int Instance::height() const {
  std::vector<int> depth(trees_.size(), 0);
  int best = 0;
  for (int v : topological_order()) {
    for (int a : out_[v]) {
      depth[arcs_[a].head] = std::max(depth[arcs_[a].head], depth[v] + 1);
      best = std::max(best, depth[arcs_[a].head]);
    }
  }
  return best;
}

bool admits(const FpqTree& t, const CyclicOrder& order) {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != t.leaves()) return false;
  return fpq::intersect(FpqTree::f_node(order), t).has_value();
}

namespace {

// phi applied to the head order (reversed for reversing arcs), then rotated.
CyclicOrder image_order(const Arc& arc, const CyclicOrder& head_order) {
  std::vector<int> out;
  for (int l : head_order) out.push_back(arc.phi.at(l));
  if (arc.reversing) std::reverse(out.begin(), out.end());
  return fpq::canonical_rotation(out);
}

CyclicOrder restricted(const CyclicOrder& order, const std::set<int>& keep) {
  std::vector<int> out;
  for (int l : order) {
    if (keep.contains(l)) out.push_back(l);
  }
  return fpq::canonical_rotation(out);
}

std::set<int> image_set(const Arc& arc) {
  std::set<int> out;
  for (const auto& [from, to] : arc.phi) out.insert(to);
  return out;
}

}  // namespace

std::optional<std::string> check_solution(const Instance& inst, const Solution& sol) {
  for (std::size_t v = 0; v < inst.num_nodes(); ++v) {
    auto it = sol.find(static_cast<int>(v));
    if (it == sol.end()) return "no order for node " + std::to_string(v);
    if (!admits(inst.tree(static_cast<int>(v)), it->second)) {
      return "order of node " + std::to_string(v) + " is not represented by its tree";
    }
  }
  for (std::size_t a = 0; a < inst.arcs().size(); ++a) {
    const Arc& arc = inst.arc(static_cast<int>(a));
    if (restricted(sol.at(arc.tail), image_set(arc)) != image_order(arc, sol.at(arc.head))) {
      return "arc " + std::to_string(a) + " is violated";
    }
  }
  return std::nullopt;
}

namespace {

// Size of a maximum matching (capped at 3) in the bipartite graph whose edges
// are the (group in head, group in tail) pairs of the head leaves.
int rainbow_matching(const std::set<std::pair<int, int>>& pairs) {
  std::map<int, std::vector<int>> adj;
  for (const auto& [l, r] : pairs) adj[l].push_back(r);
  std::map<int, int> match_right;
  int size = 0;
  for (const auto& [left, rights] : adj) {
    std::set<int> visited;
    std::function<bool(int)> augment = [&](int l) -> bool {
      for (int r : adj[l]) {
        if (!visited.insert(r).second) continue;
        auto it = match_right.find(r);
        if (it == match_right.end() || augment(it->second)) {
          match_right[r] = l;
          return true;
        }
      }
      return false;
    };
    if (augment(left) && ++size == 3) break;
  }
  return size;
}

bool is_inner_node(const FpqTree& t, int x) { return t.node(x).kind != NodeKind::kLeaf; }

}  // namespace

bool fixes(const Instance& inst, int arc_index, int mu_tail, int mu_head) {
  const Arc& arc = inst.arc(arc_index);
  const FpqTree& tail = inst.tree(arc.tail);
  const FpqTree& head = inst.tree(arc.head);
  if (head.num_leaves() < 3) return false;
  if (!is_inner_node(tail, mu_tail) || !is_inner_node(head, mu_head)) return false;
  const auto gh = head.neighbour_groups(mu_head);
  const auto gt = tail.neighbour_groups(mu_tail);
  std::set<std::pair<int, int>> pairs;
  for (const auto& [leaf, group] : gh) pairs.insert({group, gt.at(arc.phi.at(leaf))});
  return rainbow_matching(pairs) >= 3;
}

namespace {

// Leaf -> neighbour group, for every inner node of a tree.
struct GroupCache {
  std::map<std::pair<int, int>, std::map<int, int>> cache;
  const std::map<int, int>& get(const Instance& inst, int node, int mu) {
    auto key = std::make_pair(node, mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, inst.tree(node).neighbour_groups(mu)).first->second;
  }
};

// Number of distinct neighbour groups of mu hit by the images of a child's
// leaves; >= 3 means some node of the child fixes mu.
bool child_fixes(const Arc& arc, const std::map<int, int>& groups) {
  std::set<int> hit;
  for (const auto& [from, to] : arc.phi) {
    hit.insert(groups.at(to));
    if (hit.size() >= 3) return true;
  }
  return false;
}

int omega_of(const Instance& inst, int node, const std::map<int, int>& groups) {
  std::set<int> children;
  for (int a : inst.out_arcs(node)) {
    const Arc& arc = inst.arc(a);
    if (children.contains(arc.head)) continue;
    if (child_fixes(arc, groups)) children.insert(arc.head);
  }
  return static_cast<int>(children.size());
}

}  // namespace

int FixednessReport::max_value() const {
  int best = 0;
  for (const auto& e : entries) best = std::max(best, e.value);
  return best;
}

int FixednessReport::value(int node, int p_node) const {
  for (const auto& e : entries) {
    if (e.node == node && e.p_node == p_node) return e.value;
  }
  throw Error(ErrorCode::kInternalError, "no fixedness entry for the requested P-node");
}

namespace {

template <typename ParentTerm>
FixednessReport evaluate_fixedness(const Instance& inst, ParentTerm parent_term) {
  FixednessReport report;
  std::map<std::pair<int, int>, int> value;
  GroupCache groups;
  for (int v : inst.topological_order()) {
    const FpqTree& t = inst.tree(v);
    for (int mu : t.p_nodes()) {
      FixednessEntry e;
      e.node = v;
      e.p_node = mu;
      e.omega = omega_of(inst, v, groups.get(inst, v, mu));
      bool some_empty = false;
      int sum = 0;
      for (int a : inst.in_arcs(v)) {
        std::optional<int> term = parent_term(a, mu, value);
        e.parent_terms.push_back(term);
        if (term) {
          sum += *term;
        } else {
          some_empty = true;
        }
      }
      e.value = some_empty ? 0 : e.omega + sum;
      value[{v, mu}] = e.value;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace

FixednessReport fixedness(const Instance& inst) {
  return evaluate_fixedness(inst, [&](int a, int mu, const std::map<std::pair<int, int>, int>& value) {
    const Arc& arc = inst.arc(a);
    std::optional<int> best;
    for (int nu : inst.tree(arc.tail).p_nodes()) {
      if (!fixes(inst, a, nu, mu)) continue;
      const int term = value.at({arc.tail, nu}) - 1;
      if (!best || term > *best) best = term;
    }
    return best;
  });
}

namespace {

// Tail nodes fixed by the head node mu along arc a.
std::vector<int> fixed_tail_nodes(const Instance& inst, int a, int mu) {
  std::vector<int> out;
  const FpqTree& tail = inst.tree(inst.arc(a).tail);
  for (int nu : tail.inner_nodes()) {
    if (fixes(inst, a, nu, mu)) out.push_back(nu);
  }
  return out;
}

}  // namespace

bool is_normalized(const Instance& inst) {
  for (std::size_t a = 0; a < inst.arcs().size(); ++a) {
    const Arc& arc = inst.arc(static_cast<int>(a));
    const FpqTree& head = inst.tree(arc.head);
    for (int mu : head.p_nodes()) {
      if (fixed_tail_nodes(inst, static_cast<int>(a), mu).size() != 1) return false;
    }
  }
  return true;
}

FixednessReport normalized_fixedness(const Instance& inst) {
  if (!is_normalized(inst)) throw Error(ErrorCode::kInvalidConstraint, "instance is not normalized");
  return evaluate_fixedness(inst, [&](int a, int mu, const std::map<std::pair<int, int>, int>& value) {
    const int tail = inst.arc(a).tail;
    const int nu = fixed_tail_nodes(inst, a, mu).front();
    std::optional<int> term;
    if (inst.tree(tail).node(nu).kind == NodeKind::kP) term = value.at({tail, nu}) - 1;
    return term;
  });
}

bool is_k_fixed(const Instance& inst, int k) { return fixedness(inst).max_value() <= k; }

int p_degree(const Instance& inst) {
  int best = 0;
  for (std::size_t v = 0; v < inst.num_nodes(); ++v) {
    if (inst.tree(static_cast<int>(v)).count(NodeKind::kP) == 0) continue;
    best = std::max(best, static_cast<int>(inst.in_arcs(static_cast<int>(v)).size()));
  }
  return best;
}

}  // namespace hybridplan::sim
