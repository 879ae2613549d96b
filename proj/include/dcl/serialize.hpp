// JSON encoding of graphs, morphisms and typed instances. Keys and lists
// come out sorted, so equal values serialize to identical bytes.

#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "dcl/graph.hpp"
#include "dcl/slice.hpp"

namespace dcl {

using json = nlohmann::json;

inline json to_json(const Graph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes()) nodes.push_back(n);
  json arrows = json::array();
  for (const auto& a : g.arrows()) arrows.push_back({{"id", a.id}, {"src", a.src}, {"tgt", a.tgt}});
  return {{"nodes", nodes}, {"arrows", arrows}};
}

// Node and arrow tables only, without the endpoint graphs.
inline json maps_to_json(const GraphMorphism& f) {
  json nodes = json::object(), arrows = json::object();
  for (std::size_t i = 0; i < f.dom().node_count(); ++i)
    nodes[f.dom().node(i)] = f.cod().node(f.node_image(i));
  for (std::size_t i = 0; i < f.dom().arrow_count(); ++i)
    arrows[f.dom().arrow(i).id] = f.cod().arrow(f.arrow_image(i)).id;
  return {{"nodes", nodes}, {"arrows", arrows}};
}

inline json to_json(const GraphMorphism& f) {
  json j = maps_to_json(f);
  j["dom"] = to_json(f.dom());
  j["cod"] = to_json(f.cod());
  return j;
}

inline json to_json(const TypedInstance& t) {
  return {{"schema", to_json(t.schema())},
          {"carrier", to_json(t.carrier())},
          {"typing", maps_to_json(t.typing())}};
}

inline std::string canonical_bytes(const json& j) { return j.dump(); }
inline std::string canonical_bytes(const Graph& g) { return to_json(g).dump(); }
inline std::string canonical_bytes(const TypedInstance& t) { return to_json(t).dump(); }

}  // namespace dcl
