#pragma once

#include <string>
#include <vector>

#include "hybridplan/graph.hpp"

namespace hybridplan::families {

// Clusters of four vertices on a cycle; each vertex sends one edge from its
// Right side to the same row of the next cluster's Left side. About n
// vertices (at least two clusters).
graph::FlatClusteredGraph cycle_of_clusters(int n);

// Two-vertex clusters on a grid, neighbours joined by two edges
// (Right to Left, Bottom to Top).
graph::FlatClusteredGraph grid_frame(int n);

// Two clusters joined by a bundle of edges cycling through Top and Bottom.
graph::FlatClusteredGraph parallel_bundles(int n);

// Throws ParseError for an unknown family name.
graph::FlatClusteredGraph make_family(const std::string& name, int n);
std::vector<std::string> family_names();

}  // namespace hybridplan::families
