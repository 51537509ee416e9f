#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "hybridplan/error.hpp"
#include "hybridplan/sim_fpq.hpp"

namespace hybridplan::sim {

using fpq::NodeKind;
using fpq::OrderSet;

namespace {

std::set<int> image_set(const Arc& arc) {
  std::set<int> out;
  for (const auto& [from, to] : arc.phi) out.insert(to);
  return out;
}

std::map<int, int> inverse(const std::map<int, int>& phi) {
  std::map<int, int> out;
  for (const auto& [from, to] : phi) out[to] = from;
  return out;
}

// The constraint a tail tree places on the head of `arc`, over head leaves.
FpqTree pushed_down(const FpqTree& tail, const Arc& arc) {
  FpqTree t = fpq::project(tail, image_set(arc)).renamed(inverse(arc.phi));
  return arc.reversing ? t.reversed() : t;
}

CyclicOrder pushed_down(const CyclicOrder& tail_order, const Arc& arc) {
  const std::map<int, int> back = inverse(arc.phi);
  std::vector<int> out;
  for (int l : tail_order) {
    auto it = back.find(l);
    if (it != back.end()) out.push_back(it->second);
  }
  if (arc.reversing) std::reverse(out.begin(), out.end());
  return fpq::canonical_rotation(out);
}

}  // namespace

std::optional<Instance> normalize(const Instance& inst) {
  Instance out = inst;
  for (int v : inst.topological_order()) {
    if (inst.is_source(v)) continue;
    FpqTree cur = out.tree(v);
    for (int a : inst.in_arcs(v)) {
      const Arc& arc = inst.arc(a);
      auto r = fpq::intersect(pushed_down(out.tree(arc.tail), arc), cur);
      if (!r) return std::nullopt;
      cur = std::move(r->tree);
    }
    out.set_tree(v, std::move(cur));
  }
  return out;
}

std::optional<Instance> join(const Instance& a, const Instance& b, const std::map<int, int>& m) {
  const std::vector<int> sa = a.sources();
  const std::vector<int> sb = b.sources();
  if (m.size() != sa.size() || sa.size() != sb.size()) {
    throw Error(ErrorCode::kNotJoinable, "source mapping is not a bijection");
  }
  std::map<int, int> back;
  for (const auto& [x, y] : m) {
    if (!a.is_source(x) || y < 0 || y >= static_cast<int>(b.num_nodes()) || !b.is_source(y)) {
      throw Error(ErrorCode::kNotJoinable, "mapping is not between sources");
    }
    if (!back.emplace(y, x).second) throw Error(ErrorCode::kNotJoinable, "mapping is not injective");
    if (a.tree(x).leaves() != b.tree(y).leaves()) {
      throw Error(ErrorCode::kNotJoinable, "mapped sources have different leaf sets");
    }
  }
  Instance out;
  for (std::size_t v = 0; v < a.num_nodes(); ++v) {
    const int id = static_cast<int>(v);
    if (a.is_source(id)) {
      auto r = fpq::intersect(a.tree(id), b.tree(m.at(id)));
      if (!r) return std::nullopt;
      out.add_node(std::move(r->tree));
    } else {
      out.add_node(a.tree(id));
    }
  }
  std::map<int, int> b_id = back;
  for (std::size_t v = 0; v < b.num_nodes(); ++v) {
    if (!b.is_source(static_cast<int>(v))) b_id[static_cast<int>(v)] = out.add_node(b.tree(static_cast<int>(v)));
  }
  for (const Arc& arc : a.arcs()) out.add_arc(arc);
  for (Arc arc : b.arcs()) {
    arc.tail = b_id.at(arc.tail);
    arc.head = b_id.at(arc.head);
    out.add_arc(std::move(arc));
  }
  out.leaf_names = a.leaf_names;
  out.leaf_names.insert(b.leaf_names.begin(), b.leaf_names.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class Search {
 public:
  Search(const Instance& inst, const SolveOptions& options, SolveStats& stats)
      : inst_(inst), options_(options), stats_(stats), trees_(inst.trees()) {
    order_sources();
  }

  std::optional<Solution> run() {
    std::vector<int> all;
    for (std::size_t v = 0; v < trees_.size(); ++v) all.push_back(static_cast<int>(v));
    if (!propagate(all)) return std::nullopt;
    if (!descend()) return std::nullopt;
    Solution sol;
    for (std::size_t v = 0; v < trees_.size(); ++v) sol[static_cast<int>(v)] = trees_[v].first_order();
    if (auto bad = check_solution(inst_, sol)) {
      throw Error(ErrorCode::kInternalError, "solver produced an invalid solution: " + *bad);
    }
    return sol;
  }

 private:
  // Sources in breadth-first order over the undirected DAG, so that
  // consecutive decisions share descendants.
  void order_sources() {
    const std::size_t n = trees_.size();
    std::vector<std::vector<int>> adj(n);
    for (const Arc& a : inst_.arcs()) {
      adj[a.tail].push_back(a.head);
      adj[a.head].push_back(a.tail);
    }
    std::vector<bool> seen(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::deque<int> queue{static_cast<int>(s)};
      seen[s] = true;
      while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        if (inst_.is_source(x)) sources_.push_back(x);
        for (int y : adj[x]) {
          if (!seen[y]) {
            seen[y] = true;
            queue.push_back(y);
          }
        }
      }
    }
  }

  void assign(int node, FpqTree tree) {
    trail_.emplace_back(node, std::move(trees_[node]));
    trees_[node] = std::move(tree);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      trees_[trail_.back().first] = std::move(trail_.back().second);
      trail_.pop_back();
    }
  }

  // Pushes every changed node's constraints down its out-arcs until stable.
  bool propagate(const std::vector<int>& changed) {
    std::deque<int> work;
    for (int v : changed) {
      for (int a : inst_.out_arcs(v)) work.push_back(a);
    }
    while (!work.empty()) {
      const Arc& arc = inst_.arc(work.front());
      work.pop_front();
      const FpqTree& head = trees_[arc.head];
      if (head.num_leaves() < 3) continue;
      ++stats_.intersections;
      auto r = fpq::intersect(pushed_down(trees_[arc.tail], arc), head);
      if (!r) return false;
      if (fpq::canonical_form(r->tree) == fpq::canonical_form(head)) continue;
      assign(arc.head, std::move(r->tree));
      for (int a : inst_.out_arcs(arc.head)) work.push_back(a);
    }
    return true;
  }

  // Refinements of one undecided node of a source tree, covering all its orders.
  std::vector<FpqTree> branches(const FpqTree& t) {
    std::vector<int> preorder;
    std::vector<int> stack{t.root()};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      preorder.push_back(x);
      const auto& kids = t.node(x).children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    for (int x : preorder) {
      const NodeKind kind = t.node(x).kind;
      if (kind == NodeKind::kLeaf || kind == NodeKind::kF) continue;
      const std::size_t degree = t.neighbours(x).size();
      if (kind == NodeKind::kQ || degree == 3) {
        return {t.with_kind(x, NodeKind::kF, false), t.with_kind(x, NodeKind::kF, true)};
      }
      std::vector<std::set<int>> sides(degree);
      for (const auto& [leaf, group] : t.neighbour_groups(x)) sides[group].insert(leaf);
      std::vector<FpqTree> out;
      for (std::size_t b = 1; b < degree; ++b) {
        std::set<int> s = sides[0];
        s.insert(sides[b].begin(), sides[b].end());
        if (auto r = fpq::reduce(t, s)) out.push_back(std::move(*r));
      }
      return out;
    }
    return {};
  }

  bool descend() {
    if (++stats_.search_nodes > options_.node_budget) {
      throw Error(ErrorCode::kBudgetExceeded, "solver search budget exhausted");
    }
    int pick = -1;
    for (int s : sources_) {
      if (trees_[s].num_leaves() > 2 && !trees_[s].is_rigid()) {
        pick = s;
        break;
      }
    }
    if (pick < 0) return true;
    for (FpqTree& choice : branches(trees_[pick])) {
      const std::size_t mark = trail_.size();
      assign(pick, std::move(choice));
      if (propagate({pick}) && descend()) return true;
      undo(mark);
    }
    return false;
  }

  const Instance& inst_;
  const SolveOptions& options_;
  SolveStats& stats_;
  std::vector<FpqTree> trees_;
  std::vector<int> sources_;
  std::vector<std::pair<int, FpqTree>> trail_;
};

}  // namespace

std::optional<Solution> solve(const Instance& inst, const SolveOptions& options, SolveStats* stats) {
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  auto norm = normalize(inst);
  if (!norm) return std::nullopt;
  return Search(*norm, options, st).run();
}

// ---------------------------------------------------------------------------

std::optional<Solution> solve_exhaustive(const Instance& inst, std::size_t max_leaves, std::size_t max_nodes) {
  if (inst.num_nodes() > max_nodes) throw Error(ErrorCode::kTooLarge, "too many nodes for exhaustive search");
  const std::size_t n = inst.num_nodes();
  std::vector<OrderSet> all(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (inst.tree(static_cast<int>(v)).num_leaves() > max_leaves) {
      throw Error(ErrorCode::kTooLarge, "tree too large for exhaustive search");
    }
    all[v] = fpq::orders(inst.tree(static_cast<int>(v)), max_leaves);
  }
  const std::vector<int> sources = inst.sources();
  const std::vector<int> topo = inst.topological_order();
  std::vector<std::optional<CyclicOrder>> assigned(n);

  // Derives every order implied by the assigned sources; false on conflict.
  auto derive = [&](Solution& out) {
    for (int v : topo) {
      if (inst.is_source(v)) {
        if (assigned[v]) out[v] = *assigned[v];
        continue;
      }
      std::optional<CyclicOrder> mine;
      for (int a : inst.in_arcs(v)) {
        const Arc& arc = inst.arc(a);
        auto it = out.find(arc.tail);
        if (it == out.end()) continue;
        CyclicOrder o = pushed_down(it->second, arc);
        if (mine && *mine != o) return false;
        mine = o;
      }
      if (!mine) continue;
      if (!all[v].contains(*mine)) return false;
      out[v] = *mine;
    }
    return true;
  };

  std::optional<Solution> found;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (found) return;
    Solution partial;
    if (!derive(partial)) return;
    if (k == sources.size()) {
      found = partial;
      return;
    }
    for (const CyclicOrder& o : all[sources[k]]) {
      assigned[sources[k]] = o;
      go(k + 1);
      if (found) return;
    }
    assigned[sources[k]].reset();
  };
  go(0);
  return found;
}

}  // namespace hybridplan::sim
