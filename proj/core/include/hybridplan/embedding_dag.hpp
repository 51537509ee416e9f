#pragma once

#include <map>
#include <vector>

#include "hybridplan/graph.hpp"
#include "hybridplan/sim_fpq.hpp"
#include "hybridplan/spqr.hpp"

namespace hybridplan::embedding {

// Orders of the result are exactly the rotations at v over all planar
// embeddings of g; leaves are the edge ids incident to v.
fpq::FpqTree embedding_tree(const graph::Graph& g, const spqr::SpqrTree& tree, int v);

struct ConsistencySink {
  int node = -1;      // instance node
  int skeleton = -1;  // SPQR node the sink belongs to
  spqr::NodeType type = spqr::NodeType::kP;
  int first_pole = -1;
  int second_pole = -1;
};

struct EmbeddingDag {
  sim::Instance instance;
  std::map<int, int> source_of_vertex;
  std::map<int, int> vertex_of_source;
  std::vector<ConsistencySink> sinks;

  // The source of v together with its children and the arcs from it.
  sim::Instance restriction(int vertex) const;
};

// Throws NotBiconnected or NotPlanar.
EmbeddingDag build_embedding_dag(const graph::Graph& g);

// Throws InvalidSolution when sol does not solve the DAG.
graph::RotationSystem solutions_to_rotation(const graph::Graph& g, const EmbeddingDag& dag,
                                            const sim::Solution& sol);

}  // namespace hybridplan::embedding
