#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>

#include "common.hpp"
#include "hybridplan/families.hpp"
#include "hybridplan/hybrid.hpp"
#include "hybridplan/io.hpp"
#include "hybridplan/one_fixed.hpp"
#include "json.hpp"

namespace hpcli {

using namespace hybridplan;
using nlohmann::json;

namespace {

const char* model_name(Model m) {
  switch (m) {
    case Model::kNodeTrix:
      return "nodetrix";
    case Model::kPolyLink:
      return "polylink";
    case Model::kClique:
      return "clique";
  }
  return "?";
}

std::optional<hybrid::Witness> run_algorithm(Model m, const graph::FlatClusteredGraph& fcg,
                                             const hybrid::TestOptions& opt, hybrid::Diagnostics* diag) {
  switch (m) {
    case Model::kNodeTrix:
      return hybrid::test_rci_nt(fcg, opt, diag);
    case Model::kPolyLink:
      return hybrid::test_polylink(fcg, opt, diag);
    case Model::kClique:
      return hybrid::test_clique_planarity_fixed_sides(fcg, opt, diag);
  }
  return std::nullopt;
}

bool run_oracle(Model m, const graph::FlatClusteredGraph& fcg, const oracle::OracleBudget& budget) {
  switch (m) {
    case Model::kNodeTrix:
      return oracle::oracle_rci(fcg, budget);
    case Model::kPolyLink:
      return oracle::oracle_polylink(fcg, budget);
    case Model::kClique:
      return oracle::oracle_polylink(hybrid::clique_to_polylink(fcg), budget);
  }
  return false;
}

}  // namespace

int run_test(const TestArgs& args) {
  RunReport report;
  Stopwatch parse;
  const auto fcg = io::clustered_from_json(read_file(args.input));
  report.timings_ms.push_back({"parse", parse.ms()});
  report.stats["n"] = static_cast<long long>(fcg.graph.num_vertices());
  report.stats["clusters"] = static_cast<long long>(fcg.clusters.size());
  report.stats["edges"] = static_cast<long long>(fcg.graph.num_edges());
  spdlog::info("{}: {} vertices, {} edges, {} clusters", args.input, fcg.graph.num_vertices(),
               fcg.graph.num_edges(), fcg.clusters.size());
  bool planar = false;
  if (args.oracle) {
    Stopwatch t;
    planar = run_oracle(args.model, fcg, args.budget);
    report.timings_ms.push_back({"oracle", t.ms()});
  } else {
    hybrid::TestOptions opt;
    opt.one_fixed.solve = args.solve;
    // Fixedness is costly to compute; skip it on large inputs.
    opt.one_fixed.check_fixedness = fcg.graph.num_edges() <= 64;
    hybrid::Diagnostics diag;
    Stopwatch t;
    const auto w = run_algorithm(args.model, fcg, opt, &diag);
    report.timings_ms.push_back({"test", t.ms()});
    planar = w.has_value();
    report.stats["frame_vertices"] = static_cast<long long>(diag.frame_vertices);
    report.stats["frame_edges"] = static_cast<long long>(diag.frame_edges);
    report.stats["search_nodes"] = static_cast<long long>(diag.one_fixed.stats.search_nodes);
    if (opt.one_fixed.check_fixedness) {
      report.stats["constraint_fixedness"] = diag.max_constraint_fixedness;
      report.stats["joined_fixedness"] = diag.one_fixed.joined_fixedness;
      report.stats["normalized_fixedness"] = diag.one_fixed.normalized_fixedness;
    }
    if (w) {
      Stopwatch out;
      if (!args.witness.empty()) write_file(args.witness, hybrid::witness_to_json(*w));
      if (!args.svg.empty()) write_file(args.svg, hybrid::render_svg(*w));
      report.timings_ms.push_back({"output", out.ms()});
    } else if (!args.witness.empty() || !args.svg.empty()) {
      spdlog::warn("no witness: the instance is not planar");
    }
  }
  report.verdict = planar ? "planar" : "not-planar";
  std::cout << report.render(args.format);
  return planar ? kPlanar : kNotPlanar;
}

int run_constrained(const ConstrainedArgs& args) {
  RunReport report;
  Stopwatch parse;
  const auto g = io::graph_from_json(read_file(args.input));
  std::map<int, one_fixed::Constraint> constraints;
  if (!args.constraints.empty()) {
    json j;
    try {
      j = json::parse(read_file(args.constraints));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, e.what());
    }
    for (const auto& [key, value] : j.items()) {
      one_fixed::Constraint c;
      c.instance = sim::instance_from_json(value.dump());
      constraints.emplace(std::stoi(key), std::move(c));
    }
  }
  report.timings_ms.push_back({"parse", parse.ms()});
  report.stats["n"] = static_cast<long long>(g.num_vertices());
  report.stats["edges"] = static_cast<long long>(g.num_edges());
  report.stats["constraints"] = static_cast<long long>(constraints.size());
  one_fixed::Options opt;
  opt.solve = args.solve;
  one_fixed::Diagnostics diag;
  Stopwatch t;
  std::optional<graph::RotationSystem> rs;
  try {
    rs = one_fixed::test_one_fixed_planarity(g, constraints, opt, &diag);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPlanar) throw;
  }
  report.timings_ms.push_back({"test", t.ms()});
  report.stats["search_nodes"] = static_cast<long long>(diag.stats.search_nodes);
  report.verdict = rs ? "planar" : "not-planar";
  if (rs && !args.witness.empty()) {
    json out = json::object();
    for (const auto& [v, r] : *rs) out[std::to_string(v)] = r;
    write_file(args.witness, out.dump(2) + "\n");
  }
  std::cout << report.render(args.format);
  return rs ? kPlanar : kNotPlanar;
}

namespace {

struct Verdicts {
  bool algorithm = false;
  bool oracle = false;
  std::string failure;  // algorithm crashed
  bool disagree() const { return !failure.empty() || algorithm != oracle; }
};

// nullopt when the instance is out of scope for the comparison.
std::optional<Verdicts> compare(const FuzzArgs& args, const graph::FlatClusteredGraph& fcg) {
  Verdicts v;
  try {
    v.oracle = run_oracle(args.model, fcg, args.budget);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBudgetExceeded) return std::nullopt;
    throw;
  }
  hybrid::TestOptions opt;
  opt.dag.rigid_coherence = args.mutate == "rigid-coherence";
  try {
    v.algorithm = run_algorithm(args.model, fcg, opt, nullptr).has_value();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFrameNotBiconnected) return std::nullopt;
    v.failure = e.what();
  }
  return v;
}

graph::FlatClusteredGraph without_edge(const graph::FlatClusteredGraph& fcg, int edge) {
  graph::FlatClusteredGraph out;
  out.clusters = fcg.clusters;
  for (int v : fcg.graph.vertices()) out.graph.add_vertex(v);
  for (const auto& e : fcg.graph.edges()) {
    if (e.id != edge) out.graph.add_edge(e.id, e.u, e.v);
  }
  for (const auto& s : fcg.sides) {
    if (s.edge != edge) out.sides.push_back(s);
  }
  return out;
}

// Greedily drops edges while the disagreement persists.
graph::FlatClusteredGraph minimize(const FuzzArgs& args, graph::FlatClusteredGraph fcg) {
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (const auto& e : fcg.graph.edges()) {
      if (args.model == Model::kClique && !fcg.is_inter_cluster(e)) continue;
      auto smaller = without_edge(fcg, e.id);
      const auto v = compare(args, smaller);
      if (v && v->disagree()) {
        fcg = std::move(smaller);
        shrunk = true;
        break;
      }
    }
  }
  return fcg;
}

std::string counterexample_json(const FuzzArgs& args, const graph::FlatClusteredGraph& fcg, const Verdicts& v) {
  json j;
  j["model"] = model_name(args.model);
  j["instance"] = json::parse(io::to_json(fcg));
  j["algorithm"] = v.algorithm;
  j["oracle"] = v.oracle;
  if (!v.failure.empty()) j["failure"] = v.failure;
  if (!args.mutate.empty()) j["mutate"] = args.mutate;
  return j.dump(2) + "\n";
}

}  // namespace

int run_fuzz(const FuzzArgs& args_in) {
  FuzzArgs args = args_in;
  RunReport report;
  report.seed = args.seed;
  if (!args.replay.empty()) {
    const json j = json::parse(read_file(args.replay));
    const std::string m = j.at("model");
    args.model = m == "polylink" ? Model::kPolyLink : m == "clique" ? Model::kClique : Model::kNodeTrix;
    if (j.contains("mutate")) args.mutate = j.at("mutate");
    const auto fcg = io::clustered_from_json(j.at("instance").dump());
    const auto v = compare(args, fcg);
    const bool reproduced = v && v->disagree();
    report.verdict = reproduced ? "error" : "planar";
    report.message = reproduced ? "disagreement reproduced" : "no disagreement";
    std::cout << report.render(args.format);
    return reproduced ? kNotPlanar : kPlanar;
  }
  oracle::Rng rng(args.seed);
  Stopwatch t;
  long long compared = 0;
  long long positive = 0;
  long long skipped = 0;
  for (int trial = 0; trial < args.trials; ++trial) {
    const auto fcg = args.model == Model::kPolyLink ? oracle::random_polylink(rng, args.shape)
                     : args.model == Model::kClique ? oracle::random_clique(rng, args.shape)
                                                    : oracle::random_nodetrix(rng, args.shape);
    const auto v = compare(args, fcg);
    if (!v) {
      ++skipped;
      continue;
    }
    ++compared;
    positive += v->oracle ? 1 : 0;
    if (v->disagree()) {
      spdlog::warn("trial {}: algorithm {} oracle {}; minimizing", trial, v->algorithm, v->oracle);
      const auto small = minimize(args, fcg);
      write_file(args.out, counterexample_json(args, small, *compare(args, small)));
      report.verdict = "error";
      report.message = "disagreement at trial " + std::to_string(trial) + ", saved to " + args.out;
      report.stats["compared"] = compared;
      report.timings_ms.push_back({"fuzz", t.ms()});
      std::cout << report.render(args.format);
      return kNotPlanar;
    }
  }
  report.verdict = "planar";
  report.message = "no disagreements";
  report.stats["compared"] = compared;
  report.stats["oracle_positive"] = positive;
  report.stats["skipped"] = skipped;
  report.timings_ms.push_back({"fuzz", t.ms()});
  std::cout << report.render(args.format);
  return kPlanar;
}

int run_bench(const BenchArgs& args) {
  std::vector<std::pair<double, double>> points;
  json rows = json::array();
  if (args.format == "csv") std::cout << "n,vertices,edges,ms,verdict\n";
  for (int n = args.min; n <= args.max; n *= 2) {
    const auto fcg = families::make_family(args.family, n);
    double best = -1;
    bool planar = false;
    for (int r = 0; r < std::max(1, args.repeat); ++r) {
      Stopwatch t;
      planar = hybrid::test_rci_nt(fcg).has_value();
      const double ms = t.ms();
      best = best < 0 ? ms : std::min(best, ms);
    }
    const double vertices = static_cast<double>(fcg.graph.num_vertices());
    points.push_back({vertices, best});
    if (args.format == "csv") {
      std::cout << n << ',' << fcg.graph.num_vertices() << ',' << fcg.graph.num_edges() << ',' << best << ','
                << (planar ? "planar" : "not-planar") << "\n";
    } else {
      rows.push_back({{"n", n}, {"vertices", fcg.graph.num_vertices()}, {"edges", fcg.graph.num_edges()},
                      {"ms", best}, {"planar", planar}});
    }
    if (n <= 0) break;
  }
  const double slope = loglog_slope(points);
  if (args.format == "csv") {
    std::cout << "# slope," << slope << "\n";
  } else {
    std::cout << json{{"family", args.family}, {"runs", rows}, {"slope", slope}}.dump(2) << "\n";
  }
  return kPlanar;
}

}  // namespace hpcli
