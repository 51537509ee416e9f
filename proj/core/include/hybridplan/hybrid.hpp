#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridplan/graph.hpp"
#include "hybridplan/one_fixed.hpp"

namespace hybridplan::hybrid {

// Multigraph with one vertex per cluster and one per unclustered vertex; its
// edges are the inter-cluster edges of the input with their original ids.
struct FrameGraph {
  graph::Graph graph;
  std::map<int, int> frame_of_vertex;   // input vertex -> frame vertex
  std::map<int, std::size_t> cluster_of_frame;  // cluster frame vertices only
  std::map<int, int> vertex_of_frame;   // unclustered frame vertices only
  struct EdgeOrigin {
    int u = -1;  // input endpoints
    int v = -1;
    std::optional<int> side_u;
    std::optional<int> side_v;
  };
  std::map<int, EdgeOrigin> origin;

  // Frame vertex id of cluster i.
  int cluster_vertex(std::size_t i) const;
};

FrameGraph equipped_frame_graph(const graph::FlatClusteredGraph& fcg);

struct Attachment {
  int edge = -1;
  int vertex = -1;  // cluster vertex the edge leaves from
  int side = -1;
};

// Side structure of one cluster: sides 0..sigma-1 clockwise, side s paired
// with s + sigma/2. Pair p is named by its lower side.
struct ClusterSides {
  int cluster_id = 0;
  int sigma = 4;
  std::vector<int> vertices;
  std::map<int, std::vector<int>> pair_vertices;
  std::vector<Attachment> attachments;

  int pair_of(int side) const { return side % (sigma / 2); }
  int antipode(int side) const { return (side + sigma / 2) % sigma; }
};

// Throws MissingSideAnnotation or InvalidSideStructure.
ClusterSides nodetrix_sides(const graph::FlatClusteredGraph& fcg, std::size_t cluster);
ClusterSides polylink_sides(const graph::FlatClusteredGraph& fcg, std::size_t cluster);

struct ConstraintDag {
  one_fixed::Constraint constraint;
  ClusterSides sides;
  std::map<int, Attachment> leaf;            // leaf (edge id) -> attachment
  std::map<int, int> coherence_node;         // pair -> instance node
  std::map<int, std::vector<int>> coherence_vertices;  // pair -> vertex per sink leaf
};

struct DagOptions {
  // Coherence trees become F-nodes fixing the input vertex order.
  bool rigid_coherence = false;
};

ConstraintDag constraint_dag(const ClusterSides& sides, const DagOptions& options = {});
ConstraintDag constraint_dag_nodetrix(const graph::FlatClusteredGraph& fcg, std::size_t cluster);
ConstraintDag constraint_dag_polylink(const graph::FlatClusteredGraph& fcg, std::size_t cluster);

struct ClusterOrder {
  int cluster_id = 0;
  int sigma = 4;
  std::vector<std::vector<int>> side_vertices;  // clockwise vertex order per side
  std::vector<std::vector<int>> side_edges;     // clockwise edge order per side
  std::map<int, std::vector<int>> permutation;  // pair -> order on its lower side
};

// Cuts the cyclic edge order around a cluster into its sides.
// Throws InternalError if `rotation` does not respect the side blocks.
ClusterOrder extract_order(const ClusterSides& sides, const std::vector<int>& rotation);

struct Expansion {
  graph::Graph graph;
  graph::RotationSystem rotation;
  std::map<int, std::string> label;
};

struct Witness {
  FrameGraph frame;
  graph::RotationSystem frame_rotation;
  std::vector<ClusterSides> sides;
  std::vector<ClusterOrder> orders;  // parallel to sides
  Expansion expanded;
};

// Wheel gadget per cluster with slots in the given order; throws InternalError
// if the result is not planar under its induced rotation.
Expansion expand_witness(const graph::FlatClusteredGraph& fcg, const FrameGraph& frame,
                         const graph::RotationSystem& frame_rotation, const std::vector<ClusterSides>& sides,
                         const std::vector<ClusterOrder>& orders);

struct TestOptions {
  one_fixed::Options one_fixed;
  DagOptions dag;
};

struct Diagnostics {
  one_fixed::Diagnostics one_fixed;
  int max_constraint_fixedness = 0;
  std::size_t frame_vertices = 0;
  std::size_t frame_edges = 0;
};

// nullopt means the instance is not planar in the model. Throws
// FrameNotBiconnected when the frame (without isolated vertices) is not
// biconnected, plus the side structure errors.
std::optional<Witness> test_rci_nt(const graph::FlatClusteredGraph& fcg, const TestOptions& options = {},
                                   Diagnostics* diagnostics = nullptr);
std::optional<Witness> test_polylink(const graph::FlatClusteredGraph& fcg, const TestOptions& options = {},
                                     Diagnostics* diagnostics = nullptr);

// Clusters must be cliques (NotAClique). Sides are Top/Right/Bottom/Left.
graph::FlatClusteredGraph clique_to_polylink(const graph::FlatClusteredGraph& fcg);
std::optional<Witness> test_clique_planarity_fixed_sides(const graph::FlatClusteredGraph& fcg,
                                                         const TestOptions& options = {},
                                                         Diagnostics* diagnostics = nullptr);

std::string witness_to_json(const Witness& w);
std::string render_svg(const Witness& w);

}  // namespace hybridplan::hybrid
