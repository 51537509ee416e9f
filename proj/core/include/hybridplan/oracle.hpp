#pragma once

#include <cstdint>
#include <random>
#include <set>

#include "hybridplan/graph.hpp"
#include "hybridplan/sim_fpq.hpp"

namespace hybridplan::oracle {

struct OracleBudget {
  std::size_t max_clusters = 4;
  std::size_t max_cluster_size = 3;
  std::size_t max_edges = 8;
  std::uint64_t max_states = 10'000'000;
  double max_seconds = 60.0;
};

// All planar rotation systems, each cyclic order starting at its smallest
// edge id. Throws BudgetExceeded when there are more than max_states systems.
std::set<graph::RotationSystem> oracle_planar_rotations(const graph::Graph& g,
                                                        std::uint64_t max_states = 10'000'000);

// Brute force over per-pair vertex permutations and per-side edge orders of
// every cluster and over rotations of unclustered vertices, checked by face
// tracing on the collapsed graph. Throws BudgetExceeded.
bool oracle_rci(const graph::FlatClusteredGraph& fcg, const OracleBudget& budget = {});
// Same, with one permutation per cluster shared by rows and columns.
bool oracle_rows_equal_columns(const graph::FlatClusteredGraph& fcg, const OracleBudget& budget = {});
bool oracle_polylink(const graph::FlatClusteredGraph& fcg, const OracleBudget& budget = {});
bool oracle_simfpq(const sim::Instance& inst);

using Rng = std::mt19937_64;

struct FixtureShape {
  std::size_t min_clusters = 2;
  std::size_t max_clusters = 4;
  std::size_t max_cluster_size = 3;
  std::size_t max_unclustered = 1;
  std::size_t min_edges = 2;
  std::size_t max_edges = 8;
  int max_pairs = 3;  // PolyLink: sigma up to 2 * max_pairs
  // Chance that an endpoint goes to the side opposite to the previous
  // endpoint of the same vertex; makes coherence constraints common.
  double antipodal_bias = 0.0;
};

// Random instances with biconnected frames. NodeTrix sides are 0..3; the
// PolyLink variant also draws sigma, groups and pairs; clique instances make
// every cluster complete.
graph::FlatClusteredGraph random_nodetrix(Rng& rng, const FixtureShape& shape = {});
graph::FlatClusteredGraph random_polylink(Rng& rng, const FixtureShape& shape = {});
graph::FlatClusteredGraph random_clique(Rng& rng, const FixtureShape& shape = {});

}  // namespace hybridplan::oracle
