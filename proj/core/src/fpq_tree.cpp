#include "hybridplan/fpq_tree.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

#include "hybridplan/error.hpp"

namespace hybridplan::fpq {

CyclicOrder canonical_rotation(std::vector<int> order) {
  if (order.empty()) return order;
  auto it = std::min_element(order.begin(), order.end());
  std::rotate(order.begin(), it, order.end());
  return order;
}

CyclicOrder reversed_order(const CyclicOrder& order) {
  return canonical_rotation(std::vector<int>(order.rbegin(), order.rend()));
}

namespace {

bool is_inner(NodeKind k) { return k != NodeKind::kLeaf; }

// Unrooted working form: every node keeps its cyclic neighbour list.
struct Unrooted {
  std::vector<NodeKind> kind;
  std::vector<int> leaf;
  std::vector<int> origin;
  std::vector<std::vector<int>> nbrs;
  std::vector<bool> alive;

  int add(NodeKind k, int leaf_id, int orig) {
    kind.push_back(k);
    leaf.push_back(leaf_id);
    origin.push_back(orig);
    nbrs.emplace_back();
    alive.push_back(true);
    return static_cast<int>(kind.size()) - 1;
  }
};

Unrooted to_unrooted(const std::vector<Node>& nodes, int root) {
  Unrooted u;
  for (const Node& n : nodes) u.add(n.kind, n.leaf, n.origin);
  // Parent pointers in `nodes` may be stale; derive them from the child lists.
  std::vector<int> parent(nodes.size(), -1);
  std::vector<int> stack{root};
  std::vector<bool> reached(nodes.size(), false);
  reached[root] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int c : nodes[x].children) {
      if (reached[c]) throw Error(ErrorCode::kInternalError, "node array is not a tree");
      reached[c] = true;
      parent[c] = x;
      stack.push_back(c);
    }
  }
  for (std::size_t x = 0; x < nodes.size(); ++x) {
    if (!reached[x]) {
      u.alive[x] = false;
      continue;
    }
    if (parent[x] >= 0) u.nbrs[x].push_back(parent[x]);
    for (int c : nodes[x].children) u.nbrs[x].push_back(c);
  }
  return u;
}

void replace_nbr(std::vector<int>& list, int from, int to) {
  auto it = std::find(list.begin(), list.end(), from);
  if (it != list.end()) *it = to;
}

void erase_nbr(std::vector<int>& list, int which) {
  auto it = std::find(list.begin(), list.end(), which);
  if (it != list.end()) list.erase(it);
}

// Removes inner nodes of degree <= 1 and splices inner nodes of degree 2.
void simplify(Unrooted& u) {
  std::deque<int> work;
  for (std::size_t x = 0; x < u.kind.size(); ++x) {
    if (u.alive[x]) work.push_back(static_cast<int>(x));
  }
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    if (!u.alive[x] || !is_inner(u.kind[x])) continue;
    auto& nb = u.nbrs[x];
    if (nb.size() <= 1) {
      u.alive[x] = false;
      for (int y : nb) {
        erase_nbr(u.nbrs[y], x);
        work.push_back(y);
      }
      nb.clear();
    } else if (nb.size() == 2) {
      const int a = nb[0];
      const int b = nb[1];
      u.alive[x] = false;
      replace_nbr(u.nbrs[a], x, b);
      replace_nbr(u.nbrs[b], x, a);
      nb.clear();
      work.push_back(a);
      work.push_back(b);
    }
  }
}

std::vector<int> rotated_after(const std::vector<int>& list, int parent) {
  auto it = std::find(list.begin(), list.end(), parent);
  std::vector<int> out;
  if (it == list.end()) return list;
  const std::size_t k = static_cast<std::size_t>(it - list.begin());
  for (std::size_t i = 1; i < list.size(); ++i) out.push_back(list[(k + i) % list.size()]);
  return out;
}

}  // namespace

// Builds the canonical storage form from an unrooted working form.
static FpqTree canonicalize(Unrooted u);

FpqTree FpqTree::from_nodes(std::vector<Node> nodes, int root) {
  if (nodes.empty() || root < 0) throw Error(ErrorCode::kInternalError, "empty tree");
  return canonicalize(to_unrooted(nodes, root));
}

namespace detail {

// Grants canonicalize() access to FpqTree internals.
struct Assembler {
  static FpqTree make(std::vector<Node> nodes, int root) {
    FpqTree t;
    t.nodes_ = std::move(nodes);
    t.root_ = root;
    return t;
  }
};

}  // namespace detail

static FpqTree canonicalize(Unrooted u) {
  simplify(u);
  std::set<int> leaf_ids;
  int min_leaf_node = -1;
  std::size_t leaf_count = 0;
  for (std::size_t x = 0; x < u.kind.size(); ++x) {
    if (!u.alive[x] || u.kind[x] != NodeKind::kLeaf) continue;
    ++leaf_count;
    if (!leaf_ids.insert(u.leaf[x]).second) {
      throw Error(ErrorCode::kParseError, "duplicate leaf " + std::to_string(u.leaf[x]));
    }
    if (min_leaf_node < 0 || u.leaf[x] < u.leaf[min_leaf_node]) min_leaf_node = static_cast<int>(x);
  }
  if (leaf_count == 0) throw Error(ErrorCode::kInternalError, "tree without leaves");
  std::vector<Node> out;
  auto emit = [&](int x) {
    Node n;
    n.kind = u.kind[x];
    n.leaf = u.leaf[x];
    n.origin = u.origin[x];
    out.push_back(n);
    return static_cast<int>(out.size()) - 1;
  };
  if (leaf_count == 1) {
    int r = emit(min_leaf_node);
    return detail::Assembler::make(std::move(out), r);
  }
  if (leaf_count == 2) {
    int other = u.nbrs[min_leaf_node].front();
    Node root;
    root.kind = NodeKind::kP;
    root.origin = -1;
    out.push_back(root);
    int a = emit(min_leaf_node);
    int b = emit(other);
    out[a].parent = out[b].parent = 0;
    out[0].children = {a, b};
    return detail::Assembler::make(std::move(out), 0);
  }
  const int top = u.nbrs[min_leaf_node].front();
  // Iterative DFS: (working node, its parent in the working form, out parent).
  struct Item {
    int x;
    int from;
    int out_parent;
  };
  const int root_out = emit(top);
  std::vector<Item> stack;
  {
    const auto& nb = u.nbrs[top];
    auto it = std::find(nb.begin(), nb.end(), min_leaf_node);
    const std::size_t k = static_cast<std::size_t>(it - nb.begin());
    std::vector<int> order;
    for (std::size_t i = 0; i < nb.size(); ++i) order.push_back(nb[(k + i) % nb.size()]);
    out[root_out].children.assign(order.size(), -1);
    for (std::size_t i = order.size(); i-- > 0;) stack.push_back({order[i], top, root_out});
  }
  // Children are attached in order because each parent reserves slots.
  std::map<int, std::size_t> next_slot;
  next_slot[root_out] = 0;
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    int me = emit(it.x);
    out[me].parent = it.out_parent;
    out[it.out_parent].children[next_slot[it.out_parent]++] = me;
    if (u.kind[it.x] == NodeKind::kLeaf) continue;
    std::vector<int> kids = rotated_after(u.nbrs[it.x], it.from);
    out[me].children.assign(kids.size(), -1);
    next_slot[me] = 0;
    for (std::size_t i = kids.size(); i-- > 0;) stack.push_back({kids[i], it.x, me});
  }
  return detail::Assembler::make(std::move(out), root_out);
}

FpqTree FpqTree::single_leaf(int leaf) {
  Node n;
  n.kind = NodeKind::kLeaf;
  n.leaf = leaf;
  return detail::Assembler::make({n}, 0);
}

namespace {

FpqTree flat(NodeKind kind, const std::vector<int>& leaves) {
  if (leaves.empty()) throw Error(ErrorCode::kInternalError, "flat node without leaves");
  if (leaves.size() == 1) return FpqTree::single_leaf(leaves.front());
  std::vector<Node> nodes(1);
  nodes[0].kind = kind;
  for (int l : leaves) {
    Node n;
    n.kind = NodeKind::kLeaf;
    n.leaf = l;
    n.parent = 0;
    nodes.push_back(n);
    nodes[0].children.push_back(static_cast<int>(nodes.size()) - 1);
  }
  return FpqTree::from_nodes(std::move(nodes), 0);
}

}  // namespace

FpqTree FpqTree::p_node(const std::vector<int>& leaves) { return flat(NodeKind::kP, leaves); }
FpqTree FpqTree::q_node(const std::vector<int>& leaves) { return flat(NodeKind::kQ, leaves); }
FpqTree FpqTree::f_node(const std::vector<int>& leaves) { return flat(NodeKind::kF, leaves); }

std::vector<int> FpqTree::leaves() const {
  std::vector<int> out;
  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::kLeaf) out.push_back(n.leaf);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t FpqTree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::kLeaf; }));
}

bool FpqTree::has_leaf(int leaf) const { return leaf_node(leaf) >= 0; }

int FpqTree::leaf_node(int leaf) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == NodeKind::kLeaf && nodes_[i].leaf == leaf) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> FpqTree::neighbours(int node) const {
  std::vector<int> out;
  if (nodes_[node].parent >= 0) out.push_back(nodes_[node].parent);
  for (int c : nodes_[node].children) out.push_back(c);
  return out;
}

std::vector<int> FpqTree::subtree_leaves(int node) const {
  std::vector<int> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (nodes_[x].kind == NodeKind::kLeaf) out.push_back(nodes_[x].leaf);
    for (int c : nodes_[x].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<int, int> FpqTree::neighbour_groups(int node) const {
  std::map<int, int> groups;
  const std::vector<int> nb = neighbours(node);
  int parent_index = -1;
  for (std::size_t i = 0; i < nb.size(); ++i) {
    if (nb[i] == nodes_[node].parent) {
      parent_index = static_cast<int>(i);
      continue;
    }
    for (int l : subtree_leaves(nb[i])) groups[l] = static_cast<int>(i);
  }
  if (parent_index >= 0) {
    for (const Node& n : nodes_) {
      if (n.kind == NodeKind::kLeaf && !groups.contains(n.leaf)) groups[n.leaf] = parent_index;
    }
  }
  return groups;
}

std::vector<int> FpqTree::inner_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (is_inner(nodes_[i].kind)) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> FpqTree::p_nodes() const {
  std::vector<int> out;
  if (num_leaves() < 3) return out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == NodeKind::kP) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::size_t FpqTree::count(NodeKind kind) const {
  if (kind != NodeKind::kLeaf && num_leaves() < 3) return 0;
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

bool FpqTree::is_rigid() const {
  if (num_leaves() <= 2) return true;
  return count(NodeKind::kP) == 0 && count(NodeKind::kQ) == 0;
}

CyclicOrder FpqTree::first_order() const {
  std::vector<int> out;
  std::function<void(int)> walk = [&](int x) {
    if (nodes_[x].kind == NodeKind::kLeaf) {
      out.push_back(nodes_[x].leaf);
      return;
    }
    for (int c : nodes_[x].children) walk(c);
  };
  walk(root_);
  return canonical_rotation(out);
}

FpqTree FpqTree::reversed() const {
  std::vector<Node> nodes = nodes_;
  for (Node& n : nodes) std::reverse(n.children.begin(), n.children.end());
  return from_nodes(std::move(nodes), root_);
}

FpqTree FpqTree::renamed(const std::map<int, int>& mapping) const {
  std::vector<Node> nodes = nodes_;
  for (Node& n : nodes) {
    if (n.kind != NodeKind::kLeaf) continue;
    auto it = mapping.find(n.leaf);
    if (it == mapping.end()) {
      throw Error(ErrorCode::kLeafNotPresent, "renaming misses leaf " + std::to_string(n.leaf));
    }
    n.leaf = it->second;
  }
  return from_nodes(std::move(nodes), root_);
}

FpqTree FpqTree::with_fresh_origins() const {
  FpqTree t = *this;
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) t.nodes_[i].origin = static_cast<int>(i);
  return t;
}

FpqTree FpqTree::with_kind(int node, NodeKind kind, bool reverse_children) const {
  std::vector<Node> nodes = nodes_;
  nodes[node].kind = kind;
  if (reverse_children) std::reverse(nodes[node].children.begin(), nodes[node].children.end());
  return from_nodes(std::move(nodes), root_);
}

namespace {

char open_bracket(NodeKind k) { return k == NodeKind::kP ? '(' : '['; }
char close_bracket(NodeKind k) { return k == NodeKind::kP ? ')' : ']'; }
char kind_letter(NodeKind k) {
  switch (k) {
    case NodeKind::kP: return 'P';
    case NodeKind::kQ: return 'Q';
    case NodeKind::kF: return 'F';
    case NodeKind::kLeaf: break;
  }
  return '?';
}

}  // namespace

std::string FpqTree::to_string() const { return to_string({}); }

std::string FpqTree::to_string(const std::map<int, std::string>& names) const {
  std::ostringstream os;
  std::function<void(int)> walk = [&](int x) {
    const Node& n = nodes_[x];
    if (n.kind == NodeKind::kLeaf) {
      auto it = names.find(n.leaf);
      if (it != names.end()) {
        os << it->second;
      } else {
        os << n.leaf;
      }
      return;
    }
    os << kind_letter(n.kind) << open_bracket(n.kind);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) os << ", ";
      walk(n.children[i]);
    }
    os << close_bracket(n.kind);
  };
  if (root_ >= 0) walk(root_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Enumeration

OrderSet orders(const FpqTree& t, std::size_t max_leaves) {
  if (t.num_leaves() > max_leaves) {
    throw Error(ErrorCode::kTooLarge, "orders() limited to " + std::to_string(max_leaves) + " leaves");
  }
  using Seqs = std::vector<std::vector<int>>;
  std::function<Seqs(int)> gen = [&](int x) -> Seqs {
    const Node& n = t.node(x);
    if (n.kind == NodeKind::kLeaf) return {{n.leaf}};
    std::vector<Seqs> parts;
    for (int c : n.children) parts.push_back(gen(c));
    std::vector<std::vector<int>> arrangements;
    std::vector<int> idx(parts.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (n.kind == NodeKind::kP) {
      do {
        arrangements.push_back(idx);
      } while (std::next_permutation(idx.begin(), idx.end()));
    } else {
      arrangements.push_back(idx);
      if (n.kind == NodeKind::kQ) arrangements.emplace_back(idx.rbegin(), idx.rend());
    }
    Seqs out;
    for (const auto& arr : arrangements) {
      Seqs acc{{}};
      for (int pi : arr) {
        Seqs next;
        for (const auto& prefix : acc) {
          for (const auto& s : parts[pi]) {
            auto joined = prefix;
            joined.insert(joined.end(), s.begin(), s.end());
            next.push_back(std::move(joined));
          }
        }
        acc = std::move(next);
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
  };
  OrderSet result;
  for (auto& s : gen(t.root())) result.insert(canonical_rotation(std::move(s)));
  return result;
}

// ---------------------------------------------------------------------------
// Rooted views and the node builder shared by projection and reduction.

namespace {

struct RootedView {
  int root = -1;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
};

RootedView root_at(const Unrooted& u, int root) {
  RootedView v;
  v.root = root;
  v.parent.assign(u.kind.size(), -1);
  v.children.assign(u.kind.size(), {});
  std::vector<int> stack{root};
  std::vector<bool> seen(u.kind.size(), false);
  seen[root] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    std::vector<int> kids =
        v.parent[x] >= 0 ? rotated_after(u.nbrs[x], v.parent[x]) : u.nbrs[x];
    for (int c : kids) {
      if (seen[c]) continue;
      seen[c] = true;
      v.parent[c] = x;
      v.children[x].push_back(c);
      stack.push_back(c);
    }
  }
  return v;
}

struct Builder {
  std::vector<Node> nodes;

  int add(NodeKind kind, int leaf, std::vector<int> children, int origin) {
    Node n;
    n.kind = kind;
    n.leaf = leaf;
    n.children = std::move(children);
    n.origin = origin;
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }
};

int copy_subtree(const Unrooted& u, const RootedView& view, int x, Builder& b) {
  std::vector<int> kids;
  for (int c : view.children[x]) kids.push_back(copy_subtree(u, view, c, b));
  return b.add(u.kind[x], u.leaf[x], std::move(kids), u.origin[x]);
}

Unrooted unrooted_of(const FpqTree& t) { return to_unrooted(t.nodes(), t.root()); }

int find_leaf(const Unrooted& u, int leaf) {
  for (std::size_t i = 0; i < u.kind.size(); ++i) {
    if (u.alive[i] && u.kind[i] == NodeKind::kLeaf && u.leaf[i] == leaf) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

FpqTree project(const FpqTree& t, const std::set<int>& keep) {
  if (keep.empty()) throw Error(ErrorCode::kLeafNotPresent, "projection to an empty set");
  for (int l : keep) {
    if (!t.has_leaf(l)) {
      throw Error(ErrorCode::kLeafNotPresent, "leaf " + std::to_string(l) + " not in tree");
    }
  }
  if (keep.size() == t.num_leaves()) return t;
  Unrooted u = unrooted_of(t);
  const int r = find_leaf(u, *keep.begin());
  RootedView view = root_at(u, r);
  Builder b;
  std::function<int(int)> walk = [&](int x) -> int {
    if (u.kind[x] == NodeKind::kLeaf) {
      if (!keep.contains(u.leaf[x])) return -1;
      return b.add(NodeKind::kLeaf, u.leaf[x], {}, u.origin[x]);
    }
    std::vector<int> kids;
    for (int c : view.children[x]) {
      int k = walk(c);
      if (k >= 0) kids.push_back(k);
    }
    if (kids.empty()) return -1;
    if (kids.size() == 1) return kids.front();
    return b.add(u.kind[x], -1, std::move(kids), u.origin[x]);
  };
  std::vector<int> top;
  for (int c : view.children[r]) {
    int k = walk(c);
    if (k >= 0) top.push_back(k);
  }
  const int root = b.add(NodeKind::kLeaf, u.leaf[r], std::move(top), u.origin[r]);
  return FpqTree::from_nodes(std::move(b.nodes), root);
}

// ---------------------------------------------------------------------------
// Reduction: template matching over the tree rooted at a leaf outside s.

namespace {

enum class Label { kEmpty, kFull, kPartial };

// Orientation requirement of a merged sequence: when `fixed`, the allowed
// cyclic order is (parent, seq...) for dir = +1 and its reversal for -1.
struct Orient {
  bool fixed = false;
  int dir = 1;
};

bool merge_orient(Orient& acc, Orient add) {
  if (!add.fixed) return true;
  if (!acc.fixed) {
    acc = add;
    return true;
  }
  return acc.dir == add.dir;
}

Orient flipped(Orient o) {
  o.dir = -o.dir;
  return o;
}

struct Result {
  Label label = Label::kEmpty;
  int node = -1;             // builder node for empty/full results
  std::vector<int> seq;      // partial: builder nodes, empty end first
  Orient orient;
};

struct Reducer {
  const Unrooted& u;
  const RootedView& view;
  std::vector<int> hits;
  std::vector<int> size;
  Builder b;
  bool failed = false;

  Reducer(const Unrooted& uu, const RootedView& vv, const std::set<int>& s)
      : u(uu), view(vv), hits(uu.kind.size(), 0), size(uu.kind.size(), 0) {
    count(view.root, s);
  }

  void count(int x, const std::set<int>& s) {
    // Post-order without recursion depth concerns for moderate trees.
    std::vector<std::pair<int, bool>> stack{{x, false}};
    while (!stack.empty()) {
      auto [y, done] = stack.back();
      stack.pop_back();
      if (!done) {
        stack.push_back({y, true});
        for (int c : view.children[y]) stack.push_back({c, false});
        continue;
      }
      if (u.kind[y] == NodeKind::kLeaf) {
        size[y] = 1;
        hits[y] = s.contains(u.leaf[y]) ? 1 : 0;
      }
      for (int c : view.children[y]) {
        size[y] += size[c];
        hits[y] += hits[c];
      }
    }
  }

  int group(const std::vector<int>& items, int origin) {
    if (items.empty()) return -1;
    if (items.size() == 1) return items.front();
    return b.add(NodeKind::kP, -1, items, origin);
  }

  int seq_node(const std::vector<int>& seq, Orient o, int origin) {
    if (o.fixed) {
      std::vector<int> kids = seq;
      if (o.dir < 0) std::reverse(kids.begin(), kids.end());
      return b.add(NodeKind::kF, -1, std::move(kids), origin);
    }
    return b.add(NodeKind::kQ, -1, seq, origin);
  }

  Result evaluate(int x) {
    Result r;
    if (hits[x] == 0 || hits[x] == size[x]) {
      r.label = hits[x] == 0 ? Label::kEmpty : Label::kFull;
      r.node = copy_subtree(u, view, x, b);
      return r;
    }
    std::vector<Result> kids;
    for (int c : view.children[x]) {
      kids.push_back(evaluate(c));
      if (failed) return r;
    }
    r.label = Label::kPartial;
    if (u.kind[x] == NodeKind::kP) {
      std::vector<int> empties, fulls;
      const Result* partial = nullptr;
      for (const Result& k : kids) {
        if (k.label == Label::kEmpty) empties.push_back(k.node);
        else if (k.label == Label::kFull) fulls.push_back(k.node);
        else if (partial) { failed = true; return r; }
        else partial = &k;
      }
      int ge = group(empties, u.origin[x]);
      int gf = group(fulls, u.origin[x]);
      if (ge >= 0) r.seq.push_back(ge);
      if (partial) {
        r.seq.insert(r.seq.end(), partial->seq.begin(), partial->seq.end());
        r.orient = partial->orient;
      }
      if (gf >= 0) r.seq.push_back(gf);
      return r;
    }
    // Q or F: labels must read E* [partial] F* in one of the two directions.
    auto matches = [&](int dir) {
      const std::size_t n = kids.size();
      int phase = 0;  // 0: empties, 1: after partial, 2: fulls
      for (std::size_t i = 0; i < n; ++i) {
        const Result& k = kids[dir > 0 ? i : n - 1 - i];
        if (k.label == Label::kEmpty) {
          if (phase != 0) return false;
        } else if (k.label == Label::kPartial) {
          if (phase != 0) return false;
          phase = 1;
        } else {
          phase = 2;
        }
      }
      return true;
    };
    int dir = 0;
    if (matches(1)) dir = 1;
    else if (matches(-1)) dir = -1;
    if (dir == 0) {
      failed = true;
      return r;
    }
    Orient acc;
    if (u.kind[x] == NodeKind::kF) acc = {true, dir};
    const std::size_t n = kids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Result& k = kids[dir > 0 ? i : n - 1 - i];
      if (k.label == Label::kPartial) {
        if (!merge_orient(acc, k.orient)) {
          failed = true;
          return r;
        }
        r.seq.insert(r.seq.end(), k.seq.begin(), k.seq.end());
      } else {
        r.seq.push_back(k.node);
      }
    }
    r.orient = acc;
    return r;
  }

  // Templates at the pertinent root; returns the replacement builder node.
  int evaluate_root(int x) {
    std::vector<Result> kids;
    for (int c : view.children[x]) {
      kids.push_back(evaluate(c));
      if (failed) return -1;
    }
    if (u.kind[x] == NodeKind::kP) {
      std::vector<int> empties, fulls;
      std::vector<const Result*> partials;
      for (const Result& k : kids) {
        if (k.label == Label::kEmpty) empties.push_back(k.node);
        else if (k.label == Label::kFull) fulls.push_back(k.node);
        else partials.push_back(&k);
      }
      if (partials.size() > 2) {
        failed = true;
        return -1;
      }
      int gf = group(fulls, u.origin[x]);
      int middle;
      if (partials.empty()) {
        middle = gf;
      } else {
        std::vector<int> seq = partials[0]->seq;
        Orient acc = partials[0]->orient;
        if (gf >= 0) seq.push_back(gf);
        if (partials.size() == 2) {
          if (!merge_orient(acc, flipped(partials[1]->orient))) {
            failed = true;
            return -1;
          }
          seq.insert(seq.end(), partials[1]->seq.rbegin(), partials[1]->seq.rend());
        }
        middle = seq_node(seq, acc, -1);
      }
      if (empties.empty()) return middle;
      empties.push_back(middle);
      return b.add(NodeKind::kP, -1, empties, u.origin[x]);
    }
    // Q or F: E* [partial] F* [partial] E* in storage order.
    const std::size_t n = kids.size();
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (kids[i].label != Label::kEmpty) {
        if (first == n) first = i;
        last = i;
      }
    }
    for (std::size_t i = first + 1; i < last; ++i) {
      if (kids[i].label != Label::kFull) {
        failed = true;
        return -1;
      }
    }
    Orient acc;
    if (u.kind[x] == NodeKind::kF) acc = {true, 1};
    std::vector<int> seq;
    for (std::size_t i = 0; i < n; ++i) {
      const Result& k = kids[i];
      if (k.label != Label::kPartial) {
        seq.push_back(k.node);
        continue;
      }
      if (i == first) {
        if (!merge_orient(acc, k.orient)) {
          failed = true;
          return -1;
        }
        seq.insert(seq.end(), k.seq.begin(), k.seq.end());
      } else {
        if (!merge_orient(acc, flipped(k.orient))) {
          failed = true;
          return -1;
        }
        seq.insert(seq.end(), k.seq.rbegin(), k.seq.rend());
      }
    }
    return seq_node(seq, acc, u.origin[x]);
  }
};

}  // namespace

std::optional<FpqTree> reduce(const FpqTree& t, const std::set<int>& s) {
  for (int l : s) {
    if (!t.has_leaf(l)) {
      throw Error(ErrorCode::kLeafNotPresent, "leaf " + std::to_string(l) + " not in tree");
    }
  }
  const std::size_t n = t.num_leaves();
  if (s.size() <= 1 || s.size() + 1 >= n) return t;
  Unrooted u = unrooted_of(t);
  int r = -1;
  for (std::size_t i = 0; i < u.kind.size(); ++i) {
    if (u.alive[i] && u.kind[i] == NodeKind::kLeaf && !s.contains(u.leaf[i])) {
      r = static_cast<int>(i);
      break;
    }
  }
  RootedView view = root_at(u, r);
  Reducer red(u, view, s);
  const int total = static_cast<int>(s.size());
  int pert = view.children[r].front();
  for (bool moved = true; moved;) {
    moved = false;
    for (int c : view.children[pert]) {
      if (red.hits[c] == total) {
        pert = c;
        moved = true;
        break;
      }
    }
  }
  if (u.kind[pert] == NodeKind::kLeaf || red.hits[pert] == red.size[pert]) return t;
  const int replacement = red.evaluate_root(pert);
  if (red.failed) return std::nullopt;
  std::function<int(int)> rebuild = [&](int x) -> int {
    if (x == pert) return replacement;
    std::vector<int> kids;
    for (int c : view.children[x]) kids.push_back(rebuild(c));
    return red.b.add(u.kind[x], u.leaf[x], std::move(kids), u.origin[x]);
  };
  const int root = rebuild(r);
  return FpqTree::from_nodes(std::move(red.b.nodes), root);
}

// ---------------------------------------------------------------------------
// Intersection as a sequence of reductions of the second operand.

namespace {

// +1 if a, b, c appear in this cyclic order, -1 otherwise (distinct values).
int cyclic_sign(int a, int b, int c) {
  if ((a < b && b < c) || (b < c && c < a) || (c < a && a < b)) return 1;
  return -1;
}

std::set<int> complement(const std::vector<int>& all, const std::vector<int>& part) {
  std::set<int> out(all.begin(), all.end());
  for (int p : part) out.erase(p);
  return out;
}

}  // namespace

std::optional<Intersection> intersect(const FpqTree& a, const FpqTree& b) {
  const std::vector<int> all = a.leaves();
  if (all != b.leaves()) throw Error(ErrorCode::kLeafSetMismatch, "intersection of different leaf sets");
  FpqTree cur = b.with_fresh_origins();
  const std::size_t n = all.size();
  auto apply = [&](const std::set<int>& s) {
    if (s.size() <= 1 || s.size() + 1 >= n) return true;
    auto next = reduce(cur, s);
    if (!next) return false;
    cur = std::move(*next);
    return true;
  };
  // Every edge of `a` splits the leaves into two consecutive sides.
  for (std::size_t x = 0; x < a.nodes().size(); ++x) {
    if (static_cast<int>(x) == a.root()) continue;
    auto leaves = a.subtree_leaves(static_cast<int>(x));
    if (!apply(std::set<int>(leaves.begin(), leaves.end()))) return std::nullopt;
  }
  for (int x : a.inner_nodes()) {
    const NodeKind kind = a.node(x).kind;
    if (kind == NodeKind::kP) continue;
    const std::vector<int> nb = a.neighbours(x);
    std::vector<std::vector<int>> sides;
    for (int y : nb) {
      if (y == a.node(x).parent) {
        sides.push_back({});
        auto s = complement(all, a.subtree_leaves(x));
        sides.back().assign(s.begin(), s.end());
      } else {
        sides.push_back(a.subtree_leaves(y));
      }
    }
    const std::size_t k = sides.size();
    if (k >= 4) {
      for (std::size_t i = 0; i < k; ++i) {
        std::set<int> s(sides[i].begin(), sides[i].end());
        s.insert(sides[(i + 1) % k].begin(), sides[(i + 1) % k].end());
        if (!apply(s)) return std::nullopt;
      }
    }
    // Degree-3 Q-nodes carry no order information, but the result keeps the
    // stricter kind so that P-nodes only survive where both operands have one.
    if (k < 3 || (kind == NodeKind::kQ && k != 3)) continue;
    const int x1 = sides[0].front(), x2 = sides[1].front(), x3 = sides[2].front();
    int median = -1;
    std::map<int, int> groups;
    for (int m : cur.inner_nodes()) {
      groups = cur.neighbour_groups(m);
      const int g1 = groups.at(x1), g2 = groups.at(x2), g3 = groups.at(x3);
      if (g1 != g2 && g2 != g3 && g1 != g3) {
        median = m;
        break;
      }
    }
    if (median < 0) throw Error(ErrorCode::kInternalError, "no median node during intersection");
    const Node& mnode = cur.node(median);
    if (kind == NodeKind::kQ) {
      if (mnode.kind == NodeKind::kP && cur.neighbours(median).size() == 3) {
        cur = cur.with_kind(median, NodeKind::kQ, false);
      }
      continue;
    }
    if (mnode.kind == NodeKind::kP && cur.neighbours(median).size() > 3) {
      throw Error(ErrorCode::kInternalError, "unresolved P-node under an F-node");
    }
    const int sign = cyclic_sign(groups.at(x1), groups.at(x2), groups.at(x3));
    if (mnode.kind == NodeKind::kF) {
      if (sign < 0) return std::nullopt;
      continue;
    }
    cur = cur.with_kind(median, NodeKind::kF, sign < 0);
  }
  Intersection result{cur, {}};
  for (int p : cur.p_nodes()) {
    if (cur.node(p).origin >= 0) result.stems[p] = cur.node(p).origin;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Canonical form and equivalence

std::string canonical_form(const FpqTree& t) {
  if (t.num_leaves() <= 2) {
    std::string s;
    for (int l : t.leaves()) s += std::to_string(l) + ",";
    return "small:" + s;
  }
  Unrooted u = unrooted_of(t);
  int m = find_leaf(u, t.leaves().front());
  RootedView view = root_at(u, m);
  std::function<std::string(int)> enc = [&](int x) -> std::string {
    if (u.kind[x] == NodeKind::kLeaf) return std::to_string(u.leaf[x]);
    std::vector<std::string> parts;
    // Adjacent F-nodes describe the same order as their merge.
    std::function<void(int)> collect = [&](int y) {
      for (int c : view.children[y]) {
        if (u.kind[y] == NodeKind::kF && u.kind[c] == NodeKind::kF) {
          collect(c);
        } else {
          parts.push_back(enc(c));
        }
      }
    };
    collect(x);
    auto join = [](const std::vector<std::string>& ps) {
      std::string s;
      for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? "," : "") + ps[i];
      return s;
    };
    NodeKind k = u.kind[x];
    if (k == NodeKind::kQ && parts.size() == 2) k = NodeKind::kP;
    if (k == NodeKind::kP) {
      std::sort(parts.begin(), parts.end());
      return "P(" + join(parts) + ")";
    }
    if (k == NodeKind::kQ) {
      std::string fwd = join(parts);
      std::reverse(parts.begin(), parts.end());
      std::string bwd = join(parts);
      return "Q[" + std::min(fwd, bwd) + "]";
    }
    return "F[" + join(parts) + "]";
  };
  return enc(view.children[m].front());
}

bool equivalent(const FpqTree& a, const FpqTree& b) {
  if (a.leaves() != b.leaves()) throw Error(ErrorCode::kLeafSetMismatch, "equivalence of different leaf sets");
  return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// Notation

int LeafNames::intern(std::string_view name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(by_id_.size());
  ids_.emplace(std::string(name), id);
  by_id_.emplace(id, std::string(name));
  return id;
}

std::optional<int> LeafNames::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, LeafNames* names) : text_(text), names_(names) {}

  FpqTree run() {
    int root = parse_node();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return FpqTree::from_nodes(std::move(nodes_), root);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorCode::kParseError, what + " at offset " + std::to_string(pos_) + " in '" +
                                            std::string(text_) + "'");
  }
  std::string token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a leaf or node");
    return std::string(text_.substr(start, pos_ - start));
  }
  int parse_node() {
    std::string tok = token();
    skip_ws();
    const char next = pos_ < text_.size() ? text_[pos_] : '\0';
    NodeKind kind = NodeKind::kLeaf;
    char close = 0;
    if (tok == "P" && next == '(') { kind = NodeKind::kP; close = ')'; }
    if (tok == "Q" && next == '[') { kind = NodeKind::kQ; close = ']'; }
    if (tok == "F" && next == '[') { kind = NodeKind::kF; close = ']'; }
    if (kind == NodeKind::kLeaf) {
      Node n;
      n.kind = NodeKind::kLeaf;
      n.leaf = leaf_id(tok);
      nodes_.push_back(n);
      return static_cast<int>(nodes_.size()) - 1;
    }
    ++pos_;
    std::vector<int> kids;
    while (true) {
      kids.push_back(parse_node());
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == close) {
        ++pos_;
        break;
      }
      fail("expected ',' or closing bracket");
    }
    Node n;
    n.kind = kind;
    n.children = std::move(kids);
    nodes_.push_back(n);
    const int me = static_cast<int>(nodes_.size()) - 1;
    for (int c : nodes_[me].children) nodes_[c].parent = me;
    return me;
  }
  int leaf_id(const std::string& tok) {
    const bool numeric = std::all_of(tok.begin(), tok.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c)) || c == '-';
    });
    if (numeric) return std::stoi(tok);
    if (!names_) fail("identifier leaf without a name table");
    return names_->intern(tok);
  }

  std::string_view text_;
  LeafNames* names_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace

FpqTree parse_tree(std::string_view text) { return Parser(text, nullptr).run(); }

FpqTree parse_tree(std::string_view text, LeafNames& names) { return Parser(text, &names).run(); }

}  // namespace hybridplan::fpq
