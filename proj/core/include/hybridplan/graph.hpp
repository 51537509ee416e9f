#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hybridplan::graph {

struct Edge {
  int id = 0;
  int u = 0;
  int v = 0;

  int other(int w) const { return w == u ? v : u; }
  bool operator==(const Edge&) const = default;
};

// Undirected multigraph without self-loops. Vertices and edges are addressed by
// stable non-negative ids; insertion order is preserved by the accessors.
class Graph {
 public:
  Graph() = default;

  void add_vertex(int id);
  void add_edge(int id, int u, int v);
  // Adds an edge with the next unused id and returns it.
  int add_edge(int u, int v);

  const std::vector<int>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  bool has_vertex(int id) const { return vertex_index_.contains(id); }
  bool has_edge(int id) const { return edge_index_.contains(id); }
  const Edge& edge(int id) const;
  // Incident edge ids in insertion order.
  std::span<const int> incident(int v) const;
  std::size_t degree(int v) const { return incident(v).size(); }
  int max_edge_id() const { return max_edge_id_; }

 private:
  std::vector<int> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<int, std::size_t> vertex_index_;
  std::unordered_map<int, std::size_t> edge_index_;
  std::vector<std::vector<int>> incidence_;
  int max_edge_id_ = -1;
};

// Cyclic order of incident edge ids per vertex.
using RotationSystem = std::map<int, std::vector<int>>;

RotationSystem reflect(const RotationSystem& rs);

// Side labels are plain integers; NodeTrix uses Top=0, Right=1, Bottom=2,
// Left=3 in clockwise order, PolyLink uses 0..sigma-1 clockwise.
enum NodeTrixSide : int { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };

struct Cluster {
  int id = 0;
  std::vector<int> vertices;
  // PolyLink only: number of polygon sides and the vertex groups per side
  // pair. A pair is named by its lower side index s < sigma / 2.
  int sigma = 4;
  struct Group {
    std::vector<int> vertices;
    std::vector<int> pairs;
  };
  std::vector<Group> groups;
};

struct SideAnnotation {
  int edge = 0;
  int endpoint = 0;
  int side = 0;
};

struct FlatClusteredGraph {
  Graph graph;
  std::vector<Cluster> clusters;
  std::vector<SideAnnotation> sides;

  // Cluster index of a vertex, or nullopt for unclustered vertices.
  std::optional<std::size_t> cluster_of(int vertex) const;
  std::optional<int> side_of(int edge, int endpoint) const;
  bool is_inter_cluster(const Edge& e) const;
  // Throws on overlapping clusters, unknown vertices, or sides on intra edges.
  void validate() const;
};

}  // namespace hybridplan::graph
