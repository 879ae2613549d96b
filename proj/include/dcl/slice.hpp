// Typed instances (objects of the slice over a schema graph), slice
// morphisms, restriction by pullback, the indexed presentation, deltas
// (spans of slice morphisms) and the dom/cod fibration lifts.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dcl/canonical.hpp"
#include "dcl/graph.hpp"
#include "dcl/hom_search.hpp"
#include "dcl/limits.hpp"

namespace dcl {

class TypedInstance {
 public:
  TypedInstance() : typing_(identity(Graph{})) {}
  explicit TypedInstance(GraphMorphism typing) : typing_(std::move(typing)) {}

  // The empty instance over a schema.
  static TypedInstance empty_over(const Graph& schema) {
    return TypedInstance(initial_morphism(schema));
  }

  const Graph& carrier() const noexcept { return typing_.dom(); }
  const Graph& schema() const noexcept { return typing_.cod(); }
  const GraphMorphism& typing() const noexcept { return typing_; }

  // Schema type of a carrier element, by id.
  const std::string& node_type(std::string_view id) const { return typing_.node_image(id); }
  const std::string& arrow_type(std::string_view id) const { return typing_.arrow_image(id); }

  friend bool operator==(const TypedInstance& a, const TypedInstance& b) {
    return a.typing_ == b.typing_;
  }

 private:
  GraphMorphism typing_;
};

class SliceMorphism {
 public:
  SliceMorphism() = default;
  SliceMorphism(TypedInstance from, TypedInstance to, GraphMorphism map)
      : from_(std::move(from)), to_(std::move(to)), map_(std::move(map)) {
    if (!(from_.schema() == to_.schema())) {
      throw MismatchError("slice morphism between instances over different schemas");
    }
    if (!(map_.dom() == from_.carrier()) || !(map_.cod() == to_.carrier())) {
      throw MismatchError("slice morphism map does not connect the instance carriers");
    }
    if (!(compose(map_, to_.typing()) == from_.typing())) {
      throw MismatchError("slice morphism does not commute with the typings");
    }
  }

  const TypedInstance& from() const noexcept { return from_; }
  const TypedInstance& to() const noexcept { return to_; }
  const GraphMorphism& map() const noexcept { return map_; }

  friend bool operator==(const SliceMorphism& a, const SliceMorphism& b) {
    return a.map_ == b.map_ && a.from_ == b.from_ && a.to_ == b.to_;
  }

 private:
  TypedInstance from_;
  TypedInstance to_;
  GraphMorphism map_;
};

inline SliceMorphism identity(const TypedInstance& t) {
  return SliceMorphism(t, t, identity(t.carrier()));
}

inline SliceMorphism compose(const SliceMorphism& f, const SliceMorphism& g) {
  if (!(f.to() == g.from())) {
    throw CompositionError("cannot compose slice morphisms: intermediate instances differ");
  }
  return SliceMorphism(f.from(), g.to(), compose(f.map(), g.map()));
}

// Restriction of t along m: the pullback of (t.typing, m), typed over dom(m).
struct Restriction {
  TypedInstance instance;
  GraphMorphism projection;  // restricted carrier -> t.carrier
  Pullback square;
};

inline Restriction restrict_along(const TypedInstance& t, const GraphMorphism& m) {
  if (!(t.schema() == m.cod())) {
    throw MismatchError("cannot restrict: instance schema " + describe(t.schema()) +
                        " is not the codomain " + describe(m.cod()));
  }
  Pullback pb = pullback(t.typing(), m);
  return Restriction{TypedInstance(pb.right), pb.left, pb};
}

inline TypedInstance restrict(const TypedInstance& t, const GraphMorphism& m) {
  return restrict_along(t, m).instance;
}

// Canonical representative of the isomorphism class of t over its schema:
// carrier elements are colored by their types before canonical labeling.
struct CanonicalInstance {
  TypedInstance instance;
  GraphMorphism relabeling;  // t.carrier -> instance.carrier, commutes with typings
};

inline CanonicalInstance canonicalize(const TypedInstance& t,
                                      std::size_t size_guard = default_size_guard()) {
  const Graph& x = t.carrier();
  std::vector<std::string> ncol(x.node_count()), acol(x.arrow_count());
  for (std::size_t i = 0; i < ncol.size(); ++i) ncol[i] = t.schema().node(t.typing().node_image(i));
  for (std::size_t i = 0; i < acol.size(); ++i)
    acol[i] = t.schema().arrow(t.typing().arrow_image(i)).id;
  GraphMorphism iso = canonical_relabeling(x, ncol, acol, size_guard);
  TypedInstance canon(compose(inverse(iso), t.typing()));
  return CanonicalInstance{std::move(canon), std::move(iso)};
}

// Candidates preserving typing, for iso/hom searches between typed carriers.
inline HomConstraints typed_constraints(const TypedInstance& from, const TypedInstance& to) {
  HomConstraints c = HomConstraints::none(from.carrier());
  std::map<std::size_t, std::vector<std::size_t>> nodes_of, arrows_of;
  for (std::size_t j = 0; j < to.carrier().node_count(); ++j)
    nodes_of[to.typing().node_image(j)].push_back(j);
  for (std::size_t j = 0; j < to.carrier().arrow_count(); ++j)
    arrows_of[to.typing().arrow_image(j)].push_back(j);
  for (std::size_t i = 0; i < from.carrier().node_count(); ++i)
    c.node_candidates[i] = nodes_of[from.typing().node_image(i)];
  for (std::size_t i = 0; i < from.carrier().arrow_count(); ++i)
    c.arrow_candidates[i] = arrows_of[from.typing().arrow_image(i)];
  return c;
}

// An isomorphism of typed instances (commuting with the typings), if any.
inline std::optional<SliceMorphism> find_typed_isomorphism(const TypedInstance& a,
                                                           const TypedInstance& b) {
  if (!(a.schema() == b.schema())) return std::nullopt;
  auto iso = find_isomorphism(a.carrier(), b.carrier(), typed_constraints(a, b));
  if (!iso) return std::nullopt;
  return SliceMorphism(a, b, *iso);
}

// Indexed presentation: a set per schema node and a span of sets per arrow.
struct Link {
  std::string id;
  std::string src;
  std::string tgt;
  auto operator<=>(const Link&) const = default;
};

struct IndexedSemantics {
  Graph schema;
  std::map<std::string, std::set<std::string>> node_sets;
  std::map<std::string, std::set<Link>> arrow_spans;
};

inline IndexedSemantics to_indexed(const TypedInstance& t) {
  IndexedSemantics ix{t.schema(), {}, {}};
  for (const auto& n : t.schema().nodes()) ix.node_sets[n];
  for (const auto& a : t.schema().arrows()) ix.arrow_spans[a.id];
  const Graph& x = t.carrier();
  for (std::size_t i = 0; i < x.node_count(); ++i) {
    ix.node_sets[t.schema().node(t.typing().node_image(i))].insert(x.node(i));
  }
  for (std::size_t i = 0; i < x.arrow_count(); ++i) {
    const Arrow& a = x.arrow(i);
    ix.arrow_spans[t.schema().arrow(t.typing().arrow_image(i)).id].insert(
        Link{a.id, a.src, a.tgt});
  }
  return ix;
}

// Total graph of the indexed data. Element ids are kept when they are
// globally unique; otherwise every element is renamed to "(element|type)".
inline TypedInstance from_indexed(const IndexedSemantics& ix) {
  const Graph& g = ix.schema;
  for (const auto& [n, s] : ix.node_sets) g.node_index(n);
  for (const auto& [a, s] : ix.arrow_spans) g.arrow_index(a);

  std::set<std::string> seen;
  bool unique = true;
  for (const auto& [n, elems] : ix.node_sets)
    for (const auto& e : elems) unique = seen.insert(e).second && unique;
  for (const auto& [a, links] : ix.arrow_spans)
    for (const auto& l : links) unique = seen.insert(l.id).second && unique;
  auto name = [&](const std::string& e, const std::string& type) {
    return unique ? e : pair_id(e, type);
  };

  std::vector<std::string> nodes;
  std::map<std::string, std::string> ntype, atype;
  for (const auto& [n, elems] : ix.node_sets) {
    for (const auto& e : elems) {
      nodes.push_back(name(e, n));
      ntype[nodes.back()] = n;
    }
  }
  std::vector<Arrow> arrows;
  for (const auto& [a, links] : ix.arrow_spans) {
    const Arrow& sa = g.arrow(g.arrow_index(a));
    for (const auto& l : links) {
      auto it_s = ix.node_sets.find(sa.src);
      auto it_t = ix.node_sets.find(sa.tgt);
      if (it_s == ix.node_sets.end() || !it_s->second.count(l.src) ||
          it_t == ix.node_sets.end() || !it_t->second.count(l.tgt)) {
        throw GraphError("link '" + l.id + "' of '" + a +
                         "' has an endpoint outside the span feet");
      }
      arrows.push_back(Arrow{name(l.id, a), name(l.src, sa.src), name(l.tgt, sa.tgt)});
      atype[arrows.back().id] = a;
    }
  }
  Graph x(std::move(nodes), std::move(arrows));
  return TypedInstance(GraphMorphism::from_ids(x, g, ntype, atype));
}

// A delta is a span source <-left- apex -right-> target of slice morphisms.
class Delta {
 public:
  Delta(SliceMorphism left, SliceMorphism right) : left_(std::move(left)), right_(std::move(right)) {
    if (!(left_.from() == right_.from())) throw MismatchError("delta legs have different apexes");
  }

  const TypedInstance& apex() const noexcept { return left_.from(); }
  const TypedInstance& source() const noexcept { return left_.to(); }
  const TypedInstance& target() const noexcept { return right_.to(); }
  const SliceMorphism& left() const noexcept { return left_; }
  const SliceMorphism& right() const noexcept { return right_; }

  bool legs_monic() const { return left_.map().is_injective() && right_.map().is_injective(); }

 private:
  SliceMorphism left_;
  SliceMorphism right_;
};

inline Delta identity_delta(const TypedInstance& t) { return Delta(identity(t), identity(t)); }

// Replaces the apex by its canonical representative.
inline Delta with_canonical_apex(const Delta& d) {
  CanonicalInstance c = canonicalize(d.apex());
  GraphMorphism back = inverse(c.relabeling);
  return Delta(SliceMorphism(c.instance, d.source(), compose(back, d.left().map())),
               SliceMorphism(c.instance, d.target(), compose(back, d.right().map())));
}

inline Delta compose_delta(const Delta& d1, const Delta& d2) {
  if (!(d1.target() == d2.source())) {
    throw CompositionError("cannot compose deltas: target of the first is not the source of the second");
  }
  Pullback pb = pullback(d1.right().map(), d2.left().map());
  TypedInstance apex(compose(pb.left, d1.apex().typing()));
  Delta raw(SliceMorphism(apex, d1.source(), compose(pb.left, d1.left().map())),
            SliceMorphism(apex, d2.target(), compose(pb.right, d2.right().map())));
  return with_canonical_apex(raw);
}

// Apex isomorphism commuting with both legs, if the deltas are equivalent.
inline std::optional<GraphMorphism> delta_equivalence(const Delta& a, const Delta& b) {
  if (!(a.source() == b.source()) || !(a.target() == b.target())) return std::nullopt;
  const Graph& x = a.apex().carrier();
  const Graph& y = b.apex().carrier();
  HomConstraints c = HomConstraints::none(x);
  for (std::size_t i = 0; i < x.node_count(); ++i) {
    std::vector<std::size_t> cands;
    for (std::size_t j = 0; j < y.node_count(); ++j) {
      if (b.left().map().node_image(j) == a.left().map().node_image(i) &&
          b.right().map().node_image(j) == a.right().map().node_image(i))
        cands.push_back(j);
    }
    c.node_candidates[i] = std::move(cands);
  }
  for (std::size_t i = 0; i < x.arrow_count(); ++i) {
    std::vector<std::size_t> cands;
    for (std::size_t j = 0; j < y.arrow_count(); ++j) {
      if (b.left().map().arrow_image(j) == a.left().map().arrow_image(i) &&
          b.right().map().arrow_image(j) == a.right().map().arrow_image(i))
        cands.push_back(j);
    }
    c.arrow_candidates[i] = std::move(cands);
  }
  return find_isomorphism(x, y, c);
}

inline bool equivalent(const Delta& a, const Delta& b) { return delta_equivalence(a, b).has_value(); }

enum class Direction { forward, backward };

// forward: (id, f) from f.from to f.to; backward: (f, id) from f.to to f.from.
inline Delta delta_of(const SliceMorphism& f, Direction dir) {
  return dir == Direction::forward ? Delta(identity(f.from()), f) : Delta(f, identity(f.from()));
}

// Cartesian lift of t along q: A -> B in the codomain fibration.
struct CodLift {
  TypedInstance lifted;      // over A
  GraphMorphism projection;  // lifted.carrier -> t.carrier, over q
  Pullback square;

  // The unique u': Y -> lifted.carrier with u';projection = u and
  // u';lifted.typing = y, for any u: Y -> t.carrier, y: Y -> A with u;t = y;q.
  GraphMorphism factor(const GraphMorphism& u, const GraphMorphism& y) const {
    return square.mediate(u, y);
  }
};

inline CodLift cod_lift(const TypedInstance& t, const GraphMorphism& q) {
  Restriction r = restrict_along(t, q);
  return CodLift{std::move(r.instance), std::move(r.projection), std::move(r.square)};
}

// Split lift of the domain fibration: precompose the typing with p.
inline SliceMorphism dom_lift(const TypedInstance& t, const GraphMorphism& p) {
  if (!(p.cod() == t.carrier())) {
    throw MismatchError("dom lift: morphism does not land in the instance carrier");
  }
  return SliceMorphism(TypedInstance(compose(p, t.typing())), t, p);
}

}  // namespace dcl
