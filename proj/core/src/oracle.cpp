#include "hybridplan/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include "hybridplan/error.hpp"
#include "hybridplan/planarity.hpp"

namespace hybridplan::oracle {

namespace {

using graph::FlatClusteredGraph;
using Order = std::vector<int>;

Order min_first(Order o) {
  if (!o.empty()) std::rotate(o.begin(), std::min_element(o.begin(), o.end()), o.end());
  return o;
}

// Calls f once for every combination of permutations of the lists.
void each_product(std::vector<std::vector<int>>& lists, const std::function<void()>& f, std::size_t d = 0) {
  if (d == lists.size()) {
    f();
    return;
  }
  std::sort(lists[d].begin(), lists[d].end());
  do {
    each_product(lists, f, d + 1);
  } while (std::next_permutation(lists[d].begin(), lists[d].end()));
}

std::set<Order> vertex_rotations(const graph::Graph& g, int v) {
  const auto inc = g.incident(v);
  std::set<Order> out;
  if (inc.empty()) {
    out.insert({});
    return out;
  }
  std::vector<std::vector<int>> lists{std::vector<int>(inc.begin() + 1, inc.end())};
  each_product(lists, [&] {
    Order o{inc.front()};
    o.insert(o.end(), lists[0].begin(), lists[0].end());
    out.insert(min_first(o));
  });
  return out;
}

class Timer {
 public:
  explicit Timer(double cap) : cap_(cap), start_(std::chrono::steady_clock::now()) {}
  void check() const {
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start_;
    if (took.count() > cap_) throw Error(ErrorCode::kBudgetExceeded, "oracle ran past its time cap");
  }

 private:
  double cap_;
  std::chrono::steady_clock::time_point start_;
};

// Tries every tuple of candidate rotations; true on the first planar one.
bool any_planar(const graph::Graph& g, const std::vector<std::pair<int, std::vector<Order>>>& choices,
                const OracleBudget& budget, const Timer& timer) {
  std::uint64_t total = 1;
  for (const auto& [v, cs] : choices) {
    if (cs.empty()) return false;
    if (total > budget.max_states / cs.size()) throw Error(ErrorCode::kBudgetExceeded, "too many rotation tuples");
    total *= cs.size();
  }
  std::vector<std::size_t> at(choices.size(), 0);
  graph::RotationSystem rs;
  for (const auto& [v, cs] : choices) rs[v] = cs.front();
  for (std::uint64_t step = 0;; ++step) {
    if ((step & 1023) == 0) timer.check();
    if (graph::check_rotation_planarity(g, rs)) return true;
    std::size_t k = 0;
    while (k < choices.size()) {
      if (++at[k] < choices[k].second.size()) break;
      at[k] = 0;
      rs[choices[k].first] = choices[k].second[0];
      ++k;
    }
    if (k == choices.size()) return false;
    rs[choices[k].first] = choices[k].second[at[k]];
  }
}

enum class Mode { kRci, kRowsEqualColumns, kPolyLink };

bool run(const FlatClusteredGraph& fcg, Mode mode, const OracleBudget& budget) {
  fcg.validate();
  Timer timer(budget.max_seconds);
  if (fcg.clusters.size() > budget.max_clusters) throw Error(ErrorCode::kBudgetExceeded, "too many clusters");
  int base = 0;
  for (int v : fcg.graph.vertices()) base = std::max(base, v + 1);
  std::map<int, int> collapse;
  graph::Graph frame;
  for (std::size_t i = 0; i < fcg.clusters.size(); ++i) {
    if (fcg.clusters[i].vertices.size() > budget.max_cluster_size) {
      throw Error(ErrorCode::kBudgetExceeded, "cluster too large");
    }
    frame.add_vertex(base + static_cast<int>(i));
    for (int v : fcg.clusters[i].vertices) collapse[v] = base + static_cast<int>(i);
  }
  for (int v : fcg.graph.vertices()) {
    if (!collapse.contains(v)) {
      collapse[v] = v;
      frame.add_vertex(v);
    }
  }
  for (const auto& e : fcg.graph.edges()) {
    if (collapse.at(e.u) != collapse.at(e.v)) frame.add_edge(e.id, collapse.at(e.u), collapse.at(e.v));
  }
  if (frame.num_edges() > budget.max_edges) throw Error(ErrorCode::kBudgetExceeded, "too many edges");

  std::vector<std::pair<int, std::vector<Order>>> choices;
  for (int f : frame.vertices()) {
    if (f < base) {
      const auto rs = vertex_rotations(frame, f);
      choices.push_back({f, {rs.begin(), rs.end()}});
    }
  }
  for (std::size_t i = 0; i < fcg.clusters.size(); ++i) {
    const auto& c = fcg.clusters[i];
    const int f = base + static_cast<int>(i);
    const int sigma = mode == Mode::kPolyLink ? c.sigma : 4;
    const int half = sigma / 2;
    // (vertex, side) -> edges
    std::map<std::pair<int, int>, std::vector<int>> at;
    for (int e : frame.incident(f)) {
      const auto& ed = fcg.graph.edge(e);
      const int end = collapse.at(ed.u) == f ? ed.u : ed.v;
      const auto side = fcg.side_of(e, end);
      if (!side) throw Error(ErrorCode::kMissingSideAnnotation, "edge " + std::to_string(e) + " has no side");
      at[{end, *side}].push_back(e);
    }
    // Vertices seen on each pair's sides, and on any side at all.
    std::map<int, std::vector<int>> on_pair;
    std::vector<int> any_side;
    for (int v : c.vertices) {
      bool used = false;
      for (int p = 0; p < half; ++p) {
        if (at.contains({v, p}) || at.contains({v, p + half})) {
          on_pair[p].push_back(v);
          used = true;
        }
      }
      if (used) any_side.push_back(v);
    }
    std::vector<std::vector<int>> lists;
    std::vector<std::pair<int, int>> edge_keys;
    if (mode == Mode::kRowsEqualColumns) {
      lists.push_back(any_side);
    } else {
      for (int p = 0; p < half; ++p) lists.push_back(on_pair[p]);
    }
    const std::size_t perm_lists = lists.size();
    for (const auto& [key, es] : at) {
      edge_keys.push_back(key);
      lists.push_back(es);
    }
    std::set<Order> rots;
    each_product(lists, [&] {
      Order o;
      for (int s = 0; s < sigma; ++s) {
        const int p = s % half;
        std::vector<int> seq;
        if (mode == Mode::kRowsEqualColumns) {
          for (int v : lists[0]) {
            if (std::find(on_pair[p].begin(), on_pair[p].end(), v) != on_pair[p].end()) seq.push_back(v);
          }
        } else {
          seq = lists[p];
        }
        if (s >= half) std::reverse(seq.begin(), seq.end());
        for (int v : seq) {
          for (std::size_t k = 0; k < edge_keys.size(); ++k) {
            if (edge_keys[k] == std::pair{v, s}) {
              const auto& es = lists[perm_lists + k];
              o.insert(o.end(), es.begin(), es.end());
            }
          }
        }
      }
      rots.insert(min_first(o));
    });
    timer.check();
    choices.push_back({f, {rots.begin(), rots.end()}});
  }
  return any_planar(frame, choices, budget, timer);
}

}  // namespace

std::set<graph::RotationSystem> oracle_planar_rotations(const graph::Graph& g, std::uint64_t max_states) {
  std::vector<std::pair<int, std::vector<Order>>> choices;
  std::uint64_t total = 1;
  for (int v : g.vertices()) {
    const auto rs = vertex_rotations(g, v);
    if (total > max_states / rs.size()) throw Error(ErrorCode::kBudgetExceeded, "too many rotation systems");
    total *= rs.size();
    choices.push_back({v, {rs.begin(), rs.end()}});
  }
  std::set<graph::RotationSystem> out;
  std::vector<std::size_t> at(choices.size(), 0);
  while (true) {
    graph::RotationSystem rs;
    for (std::size_t k = 0; k < choices.size(); ++k) rs[choices[k].first] = choices[k].second[at[k]];
    if (graph::check_rotation_planarity(g, rs)) out.insert(std::move(rs));
    std::size_t k = 0;
    while (k < choices.size() && ++at[k] == choices[k].second.size()) at[k++] = 0;
    if (k == choices.size()) return out;
  }
}

bool oracle_rci(const FlatClusteredGraph& fcg, const OracleBudget& budget) { return run(fcg, Mode::kRci, budget); }

bool oracle_rows_equal_columns(const FlatClusteredGraph& fcg, const OracleBudget& budget) {
  return run(fcg, Mode::kRowsEqualColumns, budget);
}

bool oracle_polylink(const FlatClusteredGraph& fcg, const OracleBudget& budget) {
  return run(fcg, Mode::kPolyLink, budget);
}

bool oracle_simfpq(const sim::Instance& inst) { return sim::solve_exhaustive(inst).has_value(); }

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

enum class Kind { kNodeTrix, kPolyLink, kClique };

FlatClusteredGraph random_instance(Rng& rng, const FixtureShape& shape, Kind kind) {
  while (true) {
    FlatClusteredGraph out;
    const std::size_t k = pick(rng, shape.min_clusters, shape.max_clusters);
    const std::size_t u = pick(rng, 0, shape.max_unclustered);
    if (k + u < 2) continue;
    std::vector<std::vector<int>> members;  // per frame vertex
    int next = 0;
    for (std::size_t i = 0; i < k + u; ++i) {
      const std::size_t size = i < k ? pick(rng, 1, shape.max_cluster_size) : 1;
      std::vector<int> vs;
      for (std::size_t j = 0; j < size; ++j) {
        out.graph.add_vertex(next);
        vs.push_back(next++);
      }
      if (i < k) {
        graph::Cluster c;
        c.id = static_cast<int>(i) + 1;
        c.vertices = vs;
        out.clusters.push_back(std::move(c));
      }
      members.push_back(std::move(vs));
    }
    for (auto& c : out.clusters) {
      if (kind != Kind::kPolyLink) continue;
      const int pairs = static_cast<int>(pick(rng, 1, static_cast<std::size_t>(shape.max_pairs)));
      c.sigma = 2 * pairs;
      std::vector<int> vs = c.vertices;
      std::shuffle(vs.begin(), vs.end(), rng);
      const std::size_t groups = pick(rng, 1, std::min<std::size_t>(vs.size(), static_cast<std::size_t>(pairs)));
      c.groups.assign(groups, {});
      for (std::size_t j = 0; j < vs.size(); ++j) c.groups[j < groups ? j : pick(rng, 0, groups - 1)].vertices.push_back(vs[j]);
      for (auto& g : c.groups) {
        for (int p = 0; p < pairs; ++p) {
          if (pick(rng, 0, 1) == 1) g.pairs.push_back(p);
        }
        if (g.pairs.empty()) g.pairs.push_back(static_cast<int>(pick(rng, 0, static_cast<std::size_t>(pairs) - 1)));
      }
    }
    const auto draw_side = [&](const graph::Cluster& c, int v) -> int {
      if (kind != Kind::kPolyLink) return static_cast<int>(pick(rng, 0, 3));
      for (const auto& g : c.groups) {
        if (std::find(g.vertices.begin(), g.vertices.end(), v) == g.vertices.end()) continue;
        const int p = g.pairs[pick(rng, 0, g.pairs.size() - 1)];
        return p + static_cast<int>(pick(rng, 0, 1)) * (c.sigma / 2);
      }
      return -1;
    };
    std::map<int, int> last_side;
    std::bernoulli_distribution flip(shape.antipodal_bias);
    const auto side_for = [&](int v) -> int {
      for (const auto& c : out.clusters) {
        if (std::find(c.vertices.begin(), c.vertices.end(), v) == c.vertices.end()) continue;
        const int sigma = kind == Kind::kPolyLink ? c.sigma : 4;
        if (last_side.contains(v) && flip(rng)) return last_side[v] = (last_side[v] + sigma / 2) % sigma;
        return last_side[v] = draw_side(c, v);
      }
      return -1;
    };
    const std::size_t m = pick(rng, shape.min_edges, shape.max_edges);
    graph::Graph frame;
    for (std::size_t i = 0; i < members.size(); ++i) frame.add_vertex(static_cast<int>(i));
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t a = pick(rng, 0, members.size() - 1);
      std::size_t b = pick(rng, 0, members.size() - 2);
      if (b >= a) ++b;
      const int x = members[a][pick(rng, 0, members[a].size() - 1)];
      const int y = members[b][pick(rng, 0, members[b].size() - 1)];
      const int e = out.graph.add_edge(x, y);
      frame.add_edge(e, static_cast<int>(a), static_cast<int>(b));
      for (int end : {x, y}) {
        const int s = side_for(end);
        if (s >= 0) out.sides.push_back({e, end, s});
      }
    }
    if (!graph::is_biconnected(frame)) continue;
    for (const auto& c : out.clusters) {
      for (std::size_t a = 0; a < c.vertices.size(); ++a) {
        for (std::size_t b = a + 1; b < c.vertices.size(); ++b) {
          if (kind == Kind::kClique || pick(rng, 0, 2) == 0) out.graph.add_edge(c.vertices[a], c.vertices[b]);
        }
      }
    }
    return out;
  }
}

}  // namespace

FlatClusteredGraph random_nodetrix(Rng& rng, const FixtureShape& shape) {
  return random_instance(rng, shape, Kind::kNodeTrix);
}

FlatClusteredGraph random_polylink(Rng& rng, const FixtureShape& shape) {
  return random_instance(rng, shape, Kind::kPolyLink);
}

FlatClusteredGraph random_clique(Rng& rng, const FixtureShape& shape) {
  return random_instance(rng, shape, Kind::kClique);
}

}  // namespace hybridplan::oracle
