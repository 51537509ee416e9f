#pragma once

#include <string>
#include <string_view>

#include "hybridplan/graph.hpp"

namespace hybridplan::io {

// {"vertices":[ids], "edges":[{"id","u","v"}]} plus, for clustered graphs,
// "clusters":[{"id","vertices","sigma"?,"groups"?:[{"vertices","pairs"}]}]
// and "sides":[{"edge","endpoint","side"}]. A side is an index or one of
// Top/Right/Bottom/Left. Throws ParseError.
graph::Graph graph_from_json(std::string_view text);
graph::FlatClusteredGraph clustered_from_json(std::string_view text);

std::string to_json(const graph::Graph& g);
std::string to_json(const graph::FlatClusteredGraph& fcg);

}  // namespace hybridplan::io
