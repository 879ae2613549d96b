// Finite directed multigraphs and their morphisms.
//
// A Graph is an immutable value: node ids and arrow ids are opaque strings,
// kept sorted, and the two id spaces are disjoint. Copies share storage.
// A GraphMorphism stores its maps as index vectors into the sorted id lists
// of its domain and codomain.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dcl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

struct Arrow {
  std::string id;
  std::string src;
  std::string tgt;

  auto operator<=>(const Arrow&) const = default;
};

class Graph {
 public:
  Graph() : rep_(empty_rep()) {}

  Graph(std::vector<std::string> nodes, std::vector<Arrow> arrows) {
    auto rep = std::make_shared<Rep>();
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
      throw GraphError("duplicate node id '" +
                       *std::adjacent_find(nodes.begin(), nodes.end()) + "'");
    }
    std::sort(arrows.begin(), arrows.end(),
              [](const Arrow& a, const Arrow& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < arrows.size(); ++i) {
      if (arrows[i].id == arrows[i - 1].id) {
        throw GraphError("duplicate arrow id '" + arrows[i].id + "'");
      }
    }
    rep->nodes = std::move(nodes);
    rep->arrows = std::move(arrows);
    for (std::size_t i = 0; i < rep->nodes.size(); ++i) {
      rep->node_ix.emplace(rep->nodes[i], i);
    }
    rep->out.resize(rep->nodes.size());
    rep->in.resize(rep->nodes.size());
    for (std::size_t i = 0; i < rep->arrows.size(); ++i) {
      const Arrow& a = rep->arrows[i];
      if (rep->node_ix.count(a.id) != 0) {
        throw GraphError("id '" + a.id + "' used for both a node and an arrow");
      }
      auto s = rep->node_ix.find(a.src);
      auto t = rep->node_ix.find(a.tgt);
      if (s == rep->node_ix.end()) {
        throw GraphError("arrow '" + a.id + "' has unknown source '" + a.src + "'");
      }
      if (t == rep->node_ix.end()) {
        throw GraphError("arrow '" + a.id + "' has unknown target '" + a.tgt + "'");
      }
      rep->arrow_ix.emplace(a.id, i);
      rep->src.push_back(s->second);
      rep->tgt.push_back(t->second);
      rep->out[s->second].push_back(i);
      rep->in[t->second].push_back(i);
      rep->between[{s->second, t->second}].push_back(i);
    }
    rep_ = std::move(rep);
  }

  const std::vector<std::string>& nodes() const noexcept { return rep_->nodes; }
  const std::vector<Arrow>& arrows() const noexcept { return rep_->arrows; }
  std::size_t node_count() const noexcept { return rep_->nodes.size(); }
  std::size_t arrow_count() const noexcept { return rep_->arrows.size(); }
  bool empty() const noexcept { return rep_->nodes.empty(); }

  std::optional<std::size_t> find_node(std::string_view id) const {
    auto it = rep_->node_ix.find(std::string(id));
    if (it == rep_->node_ix.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_arrow(std::string_view id) const {
    auto it = rep_->arrow_ix.find(std::string(id));
    if (it == rep_->arrow_ix.end()) return std::nullopt;
    return it->second;
  }
  bool has_node(std::string_view id) const { return find_node(id).has_value(); }
  bool has_arrow(std::string_view id) const { return find_arrow(id).has_value(); }

  std::size_t node_index(std::string_view id) const {
    if (auto i = find_node(id)) return *i;
    throw GraphError("unknown node '" + std::string(id) + "'");
  }
  std::size_t arrow_index(std::string_view id) const {
    if (auto i = find_arrow(id)) return *i;
    throw GraphError("unknown arrow '" + std::string(id) + "'");
  }

  const std::string& node(std::size_t i) const { return rep_->nodes.at(i); }
  const Arrow& arrow(std::size_t i) const { return rep_->arrows.at(i); }
  std::size_t src(std::size_t arrow) const { return rep_->src[arrow]; }
  std::size_t tgt(std::size_t arrow) const { return rep_->tgt[arrow]; }
  const std::vector<std::size_t>& out_arrows(std::size_t node) const { return rep_->out[node]; }
  const std::vector<std::size_t>& in_arrows(std::size_t node) const { return rep_->in[node]; }

  // Arrows from s to t, ascending by index.
  std::span<const std::size_t> arrows_between(std::size_t s, std::size_t t) const {
    auto it = rep_->between.find({s, t});
    if (it == rep_->between.end()) return {};
    return it->second;
  }

  bool same_storage(const Graph& other) const noexcept { return rep_ == other.rep_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.rep_ == b.rep_ ||
           (a.rep_->nodes == b.rep_->nodes && a.rep_->arrows == b.rep_->arrows);
  }

 private:
  struct Rep {
    std::vector<std::string> nodes;
    std::vector<Arrow> arrows;
    std::unordered_map<std::string, std::size_t> node_ix;
    std::unordered_map<std::string, std::size_t> arrow_ix;
    std::vector<std::size_t> src;
    std::vector<std::size_t> tgt;
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::vector<std::size_t>> in;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> between;
  };

  static std::shared_ptr<const Rep> empty_rep() {
    static const auto rep = std::make_shared<const Rep>();
    return rep;
  }

  std::shared_ptr<const Rep> rep_;
};

// Short label for error messages.
inline std::string describe(const Graph& g) {
  std::string s = "graph{" + std::to_string(g.node_count()) + " nodes, " +
                  std::to_string(g.arrow_count()) + " arrows";
  std::size_t shown = 0;
  for (const auto& n : g.nodes()) {
    s += (shown == 0 ? ": " : ",") + n;
    if (++shown == 4) {
      if (g.node_count() > 4) s += ",...";
      break;
    }
  }
  return s + "}";
}

class GraphMorphism {
 public:
  GraphMorphism() : GraphMorphism(Graph{}, Graph{}, {}, {}) {}
  GraphMorphism(Graph dom, Graph cod, std::vector<std::size_t> node_map,
                std::vector<std::size_t> arrow_map)
      : dom_(std::move(dom)),
        cod_(std::move(cod)),
        node_map_(std::move(node_map)),
        arrow_map_(std::move(arrow_map)) {
    if (node_map_.size() != dom_.node_count() || arrow_map_.size() != dom_.arrow_count()) {
      throw GraphError("morphism maps are not total on the domain");
    }
    for (auto n : node_map_) {
      if (n >= cod_.node_count()) throw GraphError("node image out of range");
    }
    for (std::size_t a = 0; a < arrow_map_.size(); ++a) {
      std::size_t b = arrow_map_[a];
      if (b >= cod_.arrow_count()) throw GraphError("arrow image out of range");
      if (node_map_[dom_.src(a)] != cod_.src(b) || node_map_[dom_.tgt(a)] != cod_.tgt(b)) {
        throw GraphError("morphism does not preserve incidence at arrow '" +
                         dom_.arrow(a).id + "'");
      }
    }
  }

  // Build from id tables; every domain element must be mapped.
  static GraphMorphism from_ids(Graph dom, Graph cod,
                                const std::map<std::string, std::string>& nodes,
                                const std::map<std::string, std::string>& arrows) {
    std::vector<std::size_t> nm(dom.node_count());
    std::vector<std::size_t> am(dom.arrow_count());
    for (std::size_t i = 0; i < dom.node_count(); ++i) {
      auto it = nodes.find(dom.node(i));
      if (it == nodes.end()) throw GraphError("node '" + dom.node(i) + "' is not mapped");
      nm[i] = cod.node_index(it->second);
    }
    for (std::size_t i = 0; i < dom.arrow_count(); ++i) {
      auto it = arrows.find(dom.arrow(i).id);
      if (it == arrows.end()) {
        throw GraphError("arrow '" + dom.arrow(i).id + "' is not mapped");
      }
      am[i] = cod.arrow_index(it->second);
    }
    for (const auto& [k, v] : nodes) {
      if (!dom.has_node(k)) throw GraphError("mapped node '" + k + "' is not in the domain");
    }
    for (const auto& [k, v] : arrows) {
      if (!dom.has_arrow(k)) throw GraphError("mapped arrow '" + k + "' is not in the domain");
    }
    return GraphMorphism(std::move(dom), std::move(cod), std::move(nm), std::move(am));
  }

  const Graph& dom() const noexcept { return dom_; }
  const Graph& cod() const noexcept { return cod_; }
  const std::vector<std::size_t>& node_map() const noexcept { return node_map_; }
  const std::vector<std::size_t>& arrow_map() const noexcept { return arrow_map_; }

  std::size_t node_image(std::size_t i) const { return node_map_[i]; }
  std::size_t arrow_image(std::size_t i) const { return arrow_map_[i]; }
  const std::string& node_image(std::string_view id) const {
    return cod_.node(node_map_[dom_.node_index(id)]);
  }
  const std::string& arrow_image(std::string_view id) const {
    return cod_.arrow(arrow_map_[dom_.arrow_index(id)]).id;
  }

  bool is_injective() const {
    auto distinct = [](std::vector<std::size_t> v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    return distinct(node_map_) && distinct(arrow_map_);
  }
  bool is_surjective() const {
    std::vector<bool> n(cod_.node_count()), a(cod_.arrow_count());
    for (auto i : node_map_) n[i] = true;
    for (auto i : arrow_map_) a[i] = true;
    return std::all_of(n.begin(), n.end(), [](bool b) { return b; }) &&
           std::all_of(a.begin(), a.end(), [](bool b) { return b; });
  }
  bool is_isomorphism() const { return is_injective() && is_surjective(); }

  friend bool operator==(const GraphMorphism& a, const GraphMorphism& b) {
    return a.node_map_ == b.node_map_ && a.arrow_map_ == b.arrow_map_ && a.dom_ == b.dom_ &&
           a.cod_ == b.cod_;
  }

 private:
  Graph dom_;
  Graph cod_;
  std::vector<std::size_t> node_map_;
  std::vector<std::size_t> arrow_map_;
};

inline GraphMorphism identity(const Graph& g) {
  std::vector<std::size_t> n(g.node_count()), a(g.arrow_count());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = i;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  return GraphMorphism(g, g, std::move(n), std::move(a));
}

// Diagrammatic order: compose(f, g) = f;g, first f then g.
inline GraphMorphism compose(const GraphMorphism& f, const GraphMorphism& g) {
  if (!(f.cod() == g.dom())) {
    throw CompositionError("cannot compose: codomain " + describe(f.cod()) +
                           " differs from domain " + describe(g.dom()));
  }
  std::vector<std::size_t> n(f.dom().node_count()), a(f.dom().arrow_count());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = g.node_image(f.node_image(i));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = g.arrow_image(f.arrow_image(i));
  return GraphMorphism(f.dom(), g.cod(), std::move(n), std::move(a));
}

// Inverse of a bijective morphism.
inline GraphMorphism inverse(const GraphMorphism& f) {
  if (!f.is_isomorphism()) throw GraphError("morphism is not invertible");
  std::vector<std::size_t> n(f.cod().node_count()), a(f.cod().arrow_count());
  for (std::size_t i = 0; i < f.dom().node_count(); ++i) n[f.node_image(i)] = i;
  for (std::size_t i = 0; i < f.dom().arrow_count(); ++i) a[f.arrow_image(i)] = i;
  return GraphMorphism(f.cod(), f.dom(), std::move(n), std::move(a));
}

// The unique morphism out of the empty graph.
inline GraphMorphism initial_morphism(const Graph& cod) {
  return GraphMorphism(Graph{}, cod, {}, {});
}

// One node with one loop; every graph maps to it uniquely.
inline const Graph& terminal_graph() {
  static const Graph g({"*"}, {Arrow{"*loop", "*", "*"}});
  return g;
}

inline GraphMorphism terminal_morphism(const Graph& dom) {
  return GraphMorphism(dom, terminal_graph(), std::vector<std::size_t>(dom.node_count(), 0),
                       std::vector<std::size_t>(dom.arrow_count(), 0));
}

// Subgraph inclusion given the kept ids; throws if the ids are not closed.
inline GraphMorphism subgraph_inclusion(const Graph& g, const std::vector<std::string>& nodes,
                                        const std::vector<std::string>& arrows) {
  std::vector<Arrow> kept;
  for (const auto& id : arrows) kept.push_back(g.arrow(g.arrow_index(id)));
  Graph sub(nodes, std::move(kept));
  std::map<std::string, std::string> nm, am;
  for (const auto& n : sub.nodes()) nm[n] = n;
  for (const auto& a : sub.arrows()) am[a.id] = a.id;
  return GraphMorphism::from_ids(std::move(sub), g, nm, am);
}

}  // namespace dcl
