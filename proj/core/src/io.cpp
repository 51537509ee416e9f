#include "hybridplan/io.hpp"

#include "hybridplan/error.hpp"
#include "json.hpp"

namespace hybridplan::io {

namespace {

using nlohmann::json;

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

graph::Graph read_graph(const json& j) {
  graph::Graph g;
  for (int v : j.at("vertices")) g.add_vertex(v);
  for (const auto& e : j.at("edges")) {
    const int u = e.at("u");
    const int v = e.at("v");
    if (!g.has_vertex(u) || !g.has_vertex(v)) throw Error(ErrorCode::kParseError, "edge to unknown vertex");
    if (e.contains("id")) {
      g.add_edge(e.at("id").get<int>(), u, v);
    } else {
      g.add_edge(u, v);
    }
  }
  return g;
}

int read_side(const json& s) {
  if (s.is_number_integer()) return s.get<int>();
  const std::string name = s.get<std::string>();
  if (name == "T" || name == "Top" || name == "top") return graph::kTop;
  if (name == "R" || name == "Right" || name == "right") return graph::kRight;
  if (name == "B" || name == "Bottom" || name == "bottom") return graph::kBottom;
  if (name == "L" || name == "Left" || name == "left") return graph::kLeft;
  throw Error(ErrorCode::kParseError, "unknown side " + name);
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

json write_graph(const graph::Graph& g) {
  json j;
  j["vertices"] = g.vertices();
  json es = json::array();
  for (const auto& e : g.edges()) es.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}});
  j["edges"] = es;
  return j;
}

}  // namespace

graph::Graph graph_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] { return read_graph(j); });
}

graph::FlatClusteredGraph clustered_from_json(std::string_view text) {
  const json j = parse(text);
  auto fcg = guarded([&] {
    graph::FlatClusteredGraph out;
    out.graph = read_graph(j);
    for (const auto& c : j.value("clusters", json::array())) {
      graph::Cluster cl;
      cl.id = c.at("id");
      cl.vertices = c.at("vertices").get<std::vector<int>>();
      cl.sigma = c.value("sigma", 4);
      for (const auto& grp : c.value("groups", json::array())) {
        cl.groups.push_back({grp.at("vertices").get<std::vector<int>>(), grp.at("pairs").get<std::vector<int>>()});
      }
      out.clusters.push_back(std::move(cl));
    }
    for (const auto& s : j.value("sides", json::array())) {
      out.sides.push_back({s.at("edge").get<int>(), s.at("endpoint").get<int>(), read_side(s.at("side"))});
    }
    return out;
  });
  fcg.validate();
  return fcg;
}

std::string to_json(const graph::Graph& g) { return write_graph(g).dump(2) + "\n"; }

std::string to_json(const graph::FlatClusteredGraph& fcg) {
  json j = write_graph(fcg.graph);
  json cs = json::array();
  for (const auto& c : fcg.clusters) {
    json cj{{"id", c.id}, {"vertices", c.vertices}, {"sigma", c.sigma}};
    if (!c.groups.empty()) {
      json gs = json::array();
      for (const auto& g : c.groups) gs.push_back({{"vertices", g.vertices}, {"pairs", g.pairs}});
      cj["groups"] = gs;
    }
    cs.push_back(cj);
  }
  j["clusters"] = cs;
  json ss = json::array();
  for (const auto& s : fcg.sides) ss.push_back({{"edge", s.edge}, {"endpoint", s.endpoint}, {"side", s.side}});
  j["sides"] = ss;
  return j.dump(2) + "\n";
}

}  // namespace hybridplan::io
