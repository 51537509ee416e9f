#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <tuple>

#include "acceptance.hpp"
#include "hybridplan/error.hpp"
#include "hybridplan/families.hpp"
#include "hybridplan/hybrid.hpp"
#include "hybridplan/oracle.hpp"
#include "hybridplan/planarity.hpp"
#include "support/clustered.hpp"

namespace acceptance {

using namespace hybridplan;
using graph::FlatClusteredGraph;
using hybrid::Witness;

namespace {

constexpr double kRciSeconds = 600;
constexpr int kMinRandom = 500;
constexpr double kMaxSlope = 2.5;
constexpr double kMaxRunSeconds = 60;

std::string describe(std::initializer_list<std::pair<const char*, long long>> items) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : items) {
    out << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return out.str();
}

bool witness_ok(const FlatClusteredGraph& fcg, const Witness& w) {
  if (!graph::is_planar(w.expanded.graph)) return false;
  if (!graph::check_rotation_planarity(w.expanded.graph, w.expanded.rotation)) return false;
  for (const auto& o : w.orders) {
    for (int s = 0; s < o.sigma / 2; ++s) {
      std::vector<int> back = o.side_vertices[s + o.sigma / 2];
      std::reverse(back.begin(), back.end());
      if (back != o.side_vertices[s]) return false;
    }
    for (int s = 0; s < o.sigma; ++s) {
      for (int e : o.side_edges[s]) {
        const auto& ed = fcg.graph.edge(e);
        const bool here = (fcg.side_of(e, ed.u) == s && fcg.cluster_of(ed.u)) ||
                          (fcg.side_of(e, ed.v) == s && fcg.cluster_of(ed.v));
        if (!here) return false;
      }
    }
  }
  return true;
}

struct Tally {
  long long checked = 0, planar = 0, disagreements = 0, bad_witness = 0, skipped = 0;

  // Runs one comparison; `algorithm` returns the witness, `oracle` the verdict.
  void compare(const FlatClusteredGraph& fcg, const std::function<std::optional<Witness>()>& algorithm,
               const std::function<bool()>& oracle) {
    bool expect = false;
    try {
      expect = oracle();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExceeded) throw;
      ++skipped;
      return;
    }
    const auto w = algorithm();
    ++checked;
    if (w.has_value() != expect) ++disagreements;
    if (w) {
      ++planar;
      if (!witness_ok(fcg, *w)) ++bad_witness;
    }
  }
  bool clean() const { return disagreements == 0 && bad_witness == 0; }
};

// A cluster of the exhaustive family; unclustered vertices have no sides.
struct Part {
  int size = 1;
  bool clustered = true;
};

// Inter-cluster edges grouped by the pair of parts they join.
struct Group {
  int a = 0, b = 0, count = 1;
};

struct Shape {
  std::vector<Part> parts;
  std::vector<Group> groups;
};

// Every instance of the shape up to rotating each cluster by a quarter turn
// and up to reordering parallel edges. An edge type is (endpoint in a, side
// at a, endpoint in b, side at b).
class Enumerator {
 public:
  explicit Enumerator(Shape shape) : shape_(std::move(shape)) {
    for (const auto& g : shape_.groups) {
      std::vector<Type> types;
      const Part& pa = shape_.parts[g.a];
      const Part& pb = shape_.parts[g.b];
      for (int u = 0; u < pa.size; ++u) {
        for (int su = 0; su < (pa.clustered ? 4 : 1); ++su) {
          for (int v = 0; v < pb.size; ++v) {
            for (int sv = 0; sv < (pb.clustered ? 4 : 1); ++sv) types.push_back({u, su, v, sv});
          }
        }
      }
      types_.push_back(std::move(types));
    }
    int next = 0;
    for (const auto& p : shape_.parts) {
      first_vertex_.push_back(next);
      next += p.size;
    }
    vertices_ = next;
  }

  void for_each(const std::function<void(const FlatClusteredGraph&)>& visit) {
    chosen_.assign(shape_.groups.size(), {});
    visit_ = &visit;
    recurse(0, 0, 0);
  }

 private:
  struct Type {
    int u, su, v, sv;
    bool operator<(const Type& o) const { return std::tie(u, su, v, sv) < std::tie(o.u, o.su, o.v, o.sv); }
    bool operator==(const Type& o) const = default;
  };

  void recurse(std::size_t group, int picked, std::size_t from) {
    if (group == shape_.groups.size()) {
      if (canonical()) (*visit_)(build());
      return;
    }
    if (picked == shape_.groups[group].count) {
      recurse(group + 1, 0, 0);
      return;
    }
    for (std::size_t t = from; t < types_[group].size(); ++t) {
      chosen_[group].push_back(t);
      recurse(group, picked + 1, t);
      chosen_[group].pop_back();
    }
  }

  std::vector<std::vector<Type>> rotated(const std::vector<int>& turn) const {
    std::vector<std::vector<Type>> out;
    for (std::size_t g = 0; g < chosen_.size(); ++g) {
      const Group& gr = shape_.groups[g];
      std::vector<Type> ts;
      for (std::size_t t : chosen_[g]) {
        Type x = types_[g][t];
        if (shape_.parts[gr.a].clustered) x.su = (x.su + turn[gr.a]) % 4;
        if (shape_.parts[gr.b].clustered) x.sv = (x.sv + turn[gr.b]) % 4;
        ts.push_back(x);
      }
      std::sort(ts.begin(), ts.end());
      out.push_back(std::move(ts));
    }
    return out;
  }

  bool canonical() const {
    std::vector<int> turn(shape_.parts.size(), 0);
    const auto mine = rotated(turn);
    while (true) {
      std::size_t i = 0;
      while (i < turn.size() && (!shape_.parts[i].clustered || ++turn[i] == 4)) turn[i++] = 0;
      if (i == turn.size()) return true;
      if (rotated(turn) < mine) return false;
    }
  }

  FlatClusteredGraph build() const {
    std::vector<std::vector<int>> clusters;
    for (std::size_t p = 0; p < shape_.parts.size(); ++p) {
      if (!shape_.parts[p].clustered) continue;
      std::vector<int> vs;
      for (int i = 0; i < shape_.parts[p].size; ++i) vs.push_back(first_vertex_[p] + i);
      clusters.push_back(vs);
    }
    std::vector<testgen::SidedEdge> edges;
    for (std::size_t g = 0; g < chosen_.size(); ++g) {
      const Group& gr = shape_.groups[g];
      for (std::size_t t : chosen_[g]) {
        const Type& x = types_[g][t];
        edges.push_back({first_vertex_[gr.a] + x.u, shape_.parts[gr.a].clustered ? x.su : -1,
                         first_vertex_[gr.b] + x.v, shape_.parts[gr.b].clustered ? x.sv : -1});
      }
    }
    return testgen::clustered(vertices_, clusters, edges);
  }

  Shape shape_;
  std::vector<std::vector<Type>> types_;
  std::vector<int> first_vertex_;
  int vertices_ = 0;
  std::vector<std::vector<std::size_t>> chosen_;
  const std::function<void(const FlatClusteredGraph&)>* visit_ = nullptr;
};

std::vector<Shape> exhaustive_shapes() {
  std::vector<Shape> out;
  auto two = [&](int a, int b, int m, bool clustered_b = true) {
    out.push_back({{{a, true}, {b, clustered_b}}, {{0, 1, m}}});
  };
  for (int m = 2; m <= 6; ++m) two(1, 1, m);
  for (int m = 2; m <= 6; ++m) two(1, 2, m);
  for (int m = 2; m <= 4; ++m) two(2, 2, m);
  for (int m = 2; m <= 4; ++m) two(2, 1, m, false);
  for (int a = 1; a <= 2; ++a) {
    for (int b = a; b <= 2; ++b) {
      for (int c = b; c <= 2; ++c) out.push_back({{{a}, {b}, {c}}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}});
    }
  }
  // Triangles with parallel edges: (1,1,1) up to five edges, (1,1,2) and
  // (1,2,2) with one doubled side.
  const auto triangle = [&](std::vector<int> sizes, std::vector<int> counts) {
    out.push_back({{{sizes[0]}, {sizes[1]}, {sizes[2]}}, {{0, 1, counts[0]}, {1, 2, counts[1]}, {2, 0, counts[2]}}});
  };
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; a + b <= 4; ++b) {
      for (int c = 1; a + b + c <= 5; ++c) {
        if (a + b + c >= 4) triangle({1, 1, 1}, {a, b, c});
      }
    }
  }
  for (const auto& sizes : std::vector<std::vector<int>>{{1, 1, 2}, {1, 2, 2}}) {
    for (int doubled = 0; doubled < 3; ++doubled) {
      std::vector<int> counts{1, 1, 1};
      counts[doubled] = 2;
      triangle(sizes, counts);
    }
  }
  return out;
}

}  // namespace

Outcome rci_differential() {
  Timer timer;
  Tally exhaustive, random;
  for (const Shape& shape : exhaustive_shapes()) {
    Enumerator(shape).for_each([&](const FlatClusteredGraph& fcg) {
      exhaustive.compare(fcg, [&] { return hybrid::test_rci_nt(fcg); }, [&] { return oracle::oracle_rci(fcg); });
    });
  }
  oracle::Rng rng(107);
  for (int trial = 0; random.checked < 2 * kMinRandom; ++trial) {
    oracle::FixtureShape sh;
    if (trial % 2) {
      sh.max_clusters = 3;
      sh.min_edges = 4;
      sh.antipodal_bias = 0.5;
    }
    const auto fcg = oracle::random_nodetrix(rng, sh);
    random.compare(fcg, [&] { return hybrid::test_rci_nt(fcg); }, [&] { return oracle::oracle_rci(fcg); });
  }
  const double secs = timer.seconds();
  return {exhaustive.clean() && random.clean() && exhaustive.skipped == 0 && random.checked >= kMinRandom &&
              secs < kRciSeconds,
          describe({{"exhaustive", exhaustive.checked},
                    {"planar", exhaustive.planar},
                    {"random", random.checked},
                    {"planar", random.planar},
                    {"skipped", exhaustive.skipped + random.skipped},
                    {"disagreements", exhaustive.disagreements + random.disagreements},
                    {"bad witnesses", exhaustive.bad_witness + random.bad_witness}})};
}

Outcome polylink_differential() {
  oracle::Rng rng(108);
  oracle::FixtureShape dense;
  dense.max_clusters = 3;
  dense.min_edges = 4;
  dense.antipodal_bias = 0.5;
  Tally poly, clique, sigma4;
  long long sigma4_oracle_mismatch = 0;
  for (int trial = 0; poly.checked < 2 * kMinRandom; ++trial) {
    const auto fcg = oracle::random_polylink(rng, trial % 2 ? dense : oracle::FixtureShape{});
    poly.compare(fcg, [&] { return hybrid::test_polylink(fcg); }, [&] { return oracle::oracle_polylink(fcg); });
  }
  for (int trial = 0; clique.checked < 2 * kMinRandom; ++trial) {
    const auto fcg = oracle::random_clique(rng, trial % 2 ? dense : oracle::FixtureShape{});
    const auto pl = hybrid::clique_to_polylink(fcg);
    clique.compare(
        pl, [&] { return hybrid::test_clique_planarity_fixed_sides(fcg); },
        [&] { return oracle::oracle_polylink(pl); });
  }
  for (int trial = 0; sigma4.checked < 2 * kMinRandom; ++trial) {
    const auto nt = oracle::random_nodetrix(rng, trial % 2 ? dense : oracle::FixtureShape{});
    auto pl = nt;
    for (auto& c : pl.clusters) c.sigma = 4;
    const bool expect = hybrid::test_rci_nt(nt).has_value();
    sigma4.compare(pl, [&] { return hybrid::test_polylink(pl); }, [&] { return expect; });
    try {
      if (oracle::oracle_polylink(pl) != oracle::oracle_rci(nt)) ++sigma4_oracle_mismatch;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExceeded) throw;
    }
  }
  return {poly.clean() && clique.clean() && sigma4.clean() && sigma4_oracle_mismatch == 0,
          describe({{"polylink", poly.checked},
                    {"clique", clique.checked},
                    {"sigma4", sigma4.checked},
                    {"skipped", poly.skipped + clique.skipped},
                    {"disagreements", poly.disagreements + clique.disagreements + sigma4.disagreements +
                                          sigma4_oracle_mismatch},
                    {"bad witnesses", poly.bad_witness + clique.bad_witness + sigma4.bad_witness}})};
}

Outcome cycle_scaling() {
  std::vector<std::pair<double, double>> points;
  double worst = 0;
  bool all_planar = true;
  std::ostringstream out;
  for (int n = 8; n <= 128; n *= 2) {
    const auto fcg = families::cycle_of_clusters(n);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      Timer t;
      const bool planar = hybrid::test_rci_nt(fcg).has_value();
      all_planar = all_planar && planar;
      best = std::min(best, t.seconds());
      if (best > kMaxRunSeconds) break;
    }
    worst = std::max(worst, best);
    points.emplace_back(n, best);
    out << "n=" << n << ":" << std::round(best * 1e4) / 10 << "ms ";
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += std::log(x);
    sy += std::log(y);
    sxx += std::log(x) * std::log(x);
    sxy += std::log(x) * std::log(y);
  }
  const double k = static_cast<double>(points.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out << "slope=" << std::round(slope * 100) / 100;
  return {slope <= kMaxSlope && worst <= kMaxRunSeconds && all_planar, out.str()};
}

Outcome distinguishing_instance() {
  constexpr int T = 0, R = 1, B = 2;
  const auto fcg = testgen::clustered(3, {{0}, {1, 2}}, {{0, B, 2, R}, {0, T, 1, T}, {2, T, 0, B}, {0, T, 1, R}});
  const bool rci = oracle::oracle_rci(fcg);
  const bool tied = oracle::oracle_rows_equal_columns(fcg);
  const auto w = hybrid::test_rci_nt(fcg);
  bool independent = false;
  if (w) {
    for (const auto& o : w->orders) {
      if (o.permutation.size() == 2 && o.permutation.at(0) != o.permutation.at(1)) independent = true;
    }
  }
  std::ostringstream out;
  out << "oracle_rci=" << rci << " rows_equal_columns=" << tied << " algorithm=" << w.has_value()
      << " witness_rows_differ=" << independent;
  return {rci && !tied && w && witness_ok(fcg, *w) && independent, out.str()};
}

}  // namespace acceptance
