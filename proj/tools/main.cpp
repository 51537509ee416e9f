#include <spdlog/spdlog.h>

#include <iostream>
#include <tuple>

#include "CLI11.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace {

void add_budget(CLI::App* app, hybridplan::oracle::OracleBudget& b) {
  app->add_option("--budget-clusters", b.max_clusters, "Oracle: maximum number of clusters");
  app->add_option("--budget-cluster-size", b.max_cluster_size, "Oracle: maximum cluster size");
  app->add_option("--budget-edges", b.max_edges, "Oracle: maximum inter-cluster edges");
  app->add_option("--budget-states", b.max_states, "Oracle: maximum enumerated rotation tuples");
  app->add_option("--budget-seconds", b.max_seconds, "Oracle: wall-clock cap");
}

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  hpcli::init_logging();
  CLI::App app{"Hybrid planarity testing for NodeTrix, PolyLink and clique clusters"};
  app.require_subcommand(1);

  hpcli::ConstrainedArgs constrained;
  auto* c = app.add_subcommand("test-constrained", "Planarity with per-vertex 1-fixed rotation constraints");
  c->add_option("input", constrained.input, "Graph JSON")->required();
  c->add_option("--constraints", constrained.constraints, "JSON object: vertex id -> constraint instance");
  c->add_option("--witness", constrained.witness, "Write the rotation system here");
  c->add_option("--budget-search", constrained.solve.node_budget, "Solver search node budget");
  add_format(c, constrained.format);

  std::map<std::string, hpcli::TestArgs> tests;
  const std::vector<std::tuple<std::string, hpcli::Model, std::string>> kinds{
      {"test-rcint", hpcli::Model::kNodeTrix, "NodeTrix planarity with fixed sides, rows and columns independent"},
      {"test-polylink", hpcli::Model::kPolyLink, "PolyLink planarity with fixed sides"},
      {"test-clique", hpcli::Model::kClique, "Clique planarity with fixed sides"}};
  std::map<std::string, CLI::App*> test_apps;
  for (const auto& [name, model, help] : kinds) {
    auto& t = tests[name];
    t.model = model;
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("input", t.input, "Clustered graph JSON")->required();
    sub->add_option("--witness", t.witness, "Write the witness JSON here");
    sub->add_option("--svg", t.svg, "Write an SVG drawing of the witness here");
    sub->add_flag("--oracle", t.oracle, "Use the brute-force oracle (small inputs only)");
    sub->add_option("--budget-search", t.solve.node_budget, "Solver search node budget");
    add_budget(sub, t.budget);
    add_format(sub, t.format);
    test_apps[name] = sub;
  }

  hpcli::FuzzArgs fuzz;
  std::string fuzz_model = "nodetrix";
  auto* f = app.add_subcommand("fuzz", "Differential test of the algorithm against the oracle");
  f->add_option("--model", fuzz_model, "Instance model")->check(CLI::IsMember({"nodetrix", "polylink", "clique"}));
  f->add_option("--seed", fuzz.seed, "Random seed");
  f->add_option("--trials", fuzz.trials, "Number of random instances");
  f->add_option("--out", fuzz.out, "Counterexample file written on disagreement");
  f->add_option("--replay", fuzz.replay, "Re-run a saved counterexample instead of fuzzing");
  f->add_option("--mutate", fuzz.mutate, "Test the harness with a broken algorithm")
      ->check(CLI::IsMember({"rigid-coherence"}));
  f->add_option("--max-edges", fuzz.shape.max_edges, "Largest instance edge count");
  f->add_option("--antipodal-bias", fuzz.shape.antipodal_bias, "Bias towards coherence constraints");
  add_budget(f, fuzz.budget);
  add_format(f, fuzz.format);

  hpcli::BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Wall-clock scaling on an instance family");
  b->add_option("--family", bench.family, "Instance family")
      ->check(CLI::IsMember({"cycle", "cycle-of-clusters", "grid", "grid-frame", "bundles", "parallel-bundles"}));
  b->add_option("--min", bench.min, "Smallest n");
  b->add_option("--max", bench.max, "Largest n (sizes double from --min)");
  b->add_option("--repeat", bench.repeat, "Runs per size; the fastest is reported");
  b->add_option("--format", bench.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hpcli::kInputError;
  }

  try {
    if (c->parsed()) return hpcli::run_constrained(constrained);
    for (auto& [name, sub] : test_apps) {
      if (sub->parsed()) return hpcli::run_test(tests[name]);
    }
    if (f->parsed()) {
      fuzz.model = fuzz_model == "polylink" ? hpcli::Model::kPolyLink
                   : fuzz_model == "clique" ? hpcli::Model::kClique
                                            : hpcli::Model::kNodeTrix;
      return hpcli::run_fuzz(fuzz);
    }
    if (b->parsed()) return hpcli::run_bench(bench);
  } catch (const hybridplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hpcli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hpcli::kInternal;
  }
  return hpcli::kInputError;
}
