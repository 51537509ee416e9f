#pragma once

#include <optional>

#include "hybridplan/graph.hpp"

namespace hybridplan::graph {

bool is_connected(const Graph& g);
bool is_biconnected(const Graph& g);
bool is_planar(const Graph& g);

// Rotation system of some planar embedding, or nullopt if g is not planar.
std::optional<RotationSystem> planar_embedding(const Graph& g);

// Face tracing: true iff V - E + F = 2 on every connected component.
// Throws MismatchedRotation when rs does not list exactly the incident edges
// of every vertex.
bool check_rotation_planarity(const Graph& g, const RotationSystem& rs);

// Number of faces traced from rs (rs must cover g).
int count_faces(const Graph& g, const RotationSystem& rs);

}  // namespace hybridplan::graph
