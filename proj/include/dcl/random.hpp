// Seeded pseudorandom graphs, instances and morphisms for property harnesses.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/slice.hpp"

namespace dcl {

using Rng = std::mt19937_64;

inline std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Graph random_graph(Rng& rng, std::size_t max_nodes, std::size_t max_arrows,
                          const std::string& prefix = "") {
  std::size_t n = draw(rng, 1, std::max<std::size_t>(1, max_nodes));
  std::size_t m = draw(rng, 0, max_arrows);
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(prefix + "v" + std::to_string(i));
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < m; ++i) {
    arrows.push_back(Arrow{prefix + "a" + std::to_string(i), nodes[draw(rng, 0, n - 1)],
                           nodes[draw(rng, 0, n - 1)]});
  }
  return Graph(nodes, arrows);
}

// A random instance over the schema: nodes get random types, links get a
// random schema arrow and endpoints from the matching fibers (created when
// a fiber is empty). Element count is capped by max_nodes unless a link
// needs a fresh endpoint.
inline TypedInstance random_instance(Rng& rng, const Graph& schema, std::size_t max_nodes,
                                     std::size_t max_arrows, const std::string& prefix = "x") {
  if (schema.empty()) return TypedInstance::empty_over(schema);
  std::vector<std::string> nodes;
  std::map<std::string, std::string> ntype, atype;
  std::vector<std::vector<std::string>> fiber(schema.node_count());
  auto add_node = [&](std::size_t type) {
    std::string id = prefix + std::to_string(nodes.size());
    nodes.push_back(id);
    ntype[id] = schema.node(type);
    fiber[type].push_back(id);
    return id;
  };
  std::size_t n = draw(rng, 0, max_nodes);
  for (std::size_t i = 0; i < n; ++i) add_node(draw(rng, 0, schema.node_count() - 1));
  std::vector<Arrow> arrows;
  if (schema.arrow_count() > 0) {
    std::size_t m = draw(rng, 0, max_arrows);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t a = draw(rng, 0, schema.arrow_count() - 1);
      auto pick = [&](std::size_t type) {
        if (fiber[type].empty()) return add_node(type);
        return fiber[type][draw(rng, 0, fiber[type].size() - 1)];
      };
      std::string s = pick(schema.src(a));
      std::string t = pick(schema.tgt(a));
      std::string id = prefix + "l" + std::to_string(i);
      arrows.push_back(Arrow{id, s, t});
      atype[id] = schema.arrow(a).id;
    }
  }
  Graph x(nodes, arrows);
  return TypedInstance(GraphMorphism::from_ids(x, schema, ntype, atype));
}

// A random morphism into cod (its domain is freshly generated).
inline GraphMorphism random_morphism_into(Rng& rng, const Graph& cod, std::size_t max_nodes,
                                          std::size_t max_arrows, const std::string& prefix = "x") {
  return random_instance(rng, cod, max_nodes, max_arrows, prefix).typing();
}

// A random sub-instance of t with its inclusion into t.
inline SliceMorphism random_subinstance(Rng& rng, const TypedInstance& t) {
  const Graph& x = t.carrier();
  std::vector<std::string> nodes;
  std::set<std::string> kept;
  for (const auto& n : x.nodes()) {
    if (draw(rng, 0, 3) > 0) {
      nodes.push_back(n);
      kept.insert(n);
    }
  }
  std::vector<std::string> arrows;
  for (const auto& a : x.arrows()) {
    if (kept.count(a.src) && kept.count(a.tgt) && draw(rng, 0, 3) > 0) arrows.push_back(a.id);
  }
  GraphMorphism inc = subgraph_inclusion(x, nodes, arrows);
  return SliceMorphism(TypedInstance(compose(inc, t.typing())), t, inc);
}

// t enlarged by fresh elements (ids prefixed), with the inclusion of t.
inline SliceMorphism random_extension(Rng& rng, const TypedInstance& t, std::size_t max_nodes,
                                      std::size_t max_arrows, const std::string& prefix) {
  const Graph& s = t.schema();
  if (s.empty()) return identity(t);
  std::vector<std::string> nodes = t.carrier().nodes();
  std::vector<Arrow> arrows = t.carrier().arrows();
  std::map<std::string, std::string> nt, at;
  std::vector<std::vector<std::string>> fiber(s.node_count());
  for (std::size_t i = 0; i < t.carrier().node_count(); ++i) {
    nt[t.carrier().node(i)] = s.node(t.typing().node_image(i));
    fiber[t.typing().node_image(i)].push_back(t.carrier().node(i));
  }
  for (std::size_t i = 0; i < t.carrier().arrow_count(); ++i)
    at[t.carrier().arrow(i).id] = s.arrow(t.typing().arrow_image(i)).id;
  std::size_t fresh = 0;
  auto add_node = [&](std::size_t type) {
    std::string id = prefix + std::to_string(fresh++);
    nodes.push_back(id);
    nt[id] = s.node(type);
    fiber[type].push_back(id);
    return id;
  };
  std::size_t n = draw(rng, 0, max_nodes);
  for (std::size_t i = 0; i < n; ++i) add_node(draw(rng, 0, s.node_count() - 1));
  if (s.arrow_count() > 0) {
    std::size_t m = draw(rng, 0, max_arrows);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t a = draw(rng, 0, s.arrow_count() - 1);
      auto pick = [&](std::size_t type) {
        if (fiber[type].empty()) return add_node(type);
        return fiber[type][draw(rng, 0, fiber[type].size() - 1)];
      };
      std::string src = pick(s.src(a));
      std::string tgt = pick(s.tgt(a));
      std::string id = prefix + "l" + std::to_string(i);
      arrows.push_back(Arrow{id, src, tgt});
      at[id] = s.arrow(a).id;
    }
  }
  Graph big(nodes, arrows);
  TypedInstance ext(GraphMorphism::from_ids(big, s, nt, at));
  GraphMorphism inc = subgraph_inclusion(big, t.carrier().nodes(), [&] {
    std::vector<std::string> ids;
    for (const auto& a : t.carrier().arrows()) ids.push_back(a.id);
    return ids;
  }());
  return SliceMorphism(t, ext, GraphMorphism(t.carrier(), big, inc.node_map(), inc.arrow_map()));
}

// Deletions then insertions: source <- kept part -> kept part plus fresh elements.
inline Delta random_delta(Rng& rng, const TypedInstance& source, const std::string& prefix) {
  SliceMorphism del = random_subinstance(rng, source);
  SliceMorphism ins = random_extension(rng, del.from(), 2, 2, prefix);
  return Delta(del, ins);
}

// A random morphism between given graphs, or nullopt if none was found.
inline std::optional<GraphMorphism> random_morphism_between(Rng& rng, const Graph& dom,
                                                            const Graph& cod,
                                                            std::size_t limit = 2000) {
  auto all = enumerate_homomorphisms(dom, cod, limit);
  if (all.morphisms.empty()) return std::nullopt;
  return all.morphisms[draw(rng, 0, all.morphisms.size() - 1)];
}

}  // namespace dcl
