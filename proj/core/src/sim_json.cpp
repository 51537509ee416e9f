#include <json.hpp>

#include "hybridplan/error.hpp"
#include "hybridplan/sim_fpq.hpp"

namespace hybridplan::sim {

using nlohmann::ordered_json;

namespace {

std::string leaf_text(const Instance& inst, int leaf) {
  auto it = inst.leaf_names.find(leaf);
  return it != inst.leaf_names.end() ? it->second : std::to_string(leaf);
}

}  // namespace

std::string to_json(const Instance& inst) {
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (const FpqTree& t : inst.trees()) j["nodes"].push_back(t.to_string(inst.leaf_names));
  j["arcs"] = ordered_json::array();
  for (const Arc& a : inst.arcs()) {
    ordered_json phi = ordered_json::object();
    for (const auto& [from, to] : a.phi) phi[leaf_text(inst, from)] = leaf_text(inst, to);
    j["arcs"].push_back({{"tail", a.tail}, {"head", a.head}, {"phi", phi}, {"reversing", a.reversing}});
  }
  return j.dump(2);
}

Instance instance_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw Error(ErrorCode::kParseError, "instance needs a \"nodes\" array");
  }
  fpq::LeafNames names;
  bool named = false;
  Instance inst;
  auto leaf_id = [&](const std::string& s) {
    const bool numeric = !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (numeric) return std::stoi(s);
    named = true;
    auto id = names.find(s);
    if (!id) throw Error(ErrorCode::kParseError, "phi mentions unknown leaf " + s);
    return *id;
  };
  try {
    for (const auto& node : j["nodes"]) {
      const std::string notation = node.get<std::string>();
      const std::size_t before = names.names().size();
      inst.add_node(fpq::parse_tree(notation, names));
      if (names.names().size() != before) named = true;
    }
    if (j.contains("arcs")) {
      for (const auto& a : j["arcs"]) {
        Arc arc;
        arc.tail = a.at("tail").get<int>();
        arc.head = a.at("head").get<int>();
        arc.reversing = a.value("reversing", false);
        for (const auto& [from, to] : a.at("phi").items()) {
          const std::string target = to.is_string() ? to.get<std::string>() : std::to_string(to.get<int>());
          arc.phi[leaf_id(from)] = leaf_id(target);
        }
        inst.add_arc(std::move(arc));
      }
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed instance: ") + e.what());
  }
  if (named) inst.leaf_names = names.names();
  return inst;
}

}  // namespace hybridplan::sim
