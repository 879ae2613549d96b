// Constraint symbols: arity graphs with decision-procedure semantics and
// witness extraction, regular (injectivity) and lifting constraints, and
// signatures with dependency arrows.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dcl/canonical.hpp"
#include "dcl/graph.hpp"
#include "dcl/hom_search.hpp"
#include "dcl/serialize.hpp"
#include "dcl/slice.hpp"

namespace dcl {

class SignatureError : public Error {
 public:
  using Error::Error;
};

enum class Status { valid, invalid, unknown };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::valid: return "Valid";
    case Status::invalid: return "Invalid";
    case Status::unknown: return "Unknown";
  }
  return "?";
}

// Conjunction where Unknown poisons everything but Invalid.
inline Status conjoin(Status a, Status b) {
  if (a == Status::invalid || b == Status::invalid) return Status::invalid;
  if (a == Status::unknown || b == Status::unknown) return Status::unknown;
  return Status::valid;
}

struct Interval {
  std::size_t lo = 0;
  std::optional<std::size_t> hi;  // nullopt: unbounded

  bool contains(std::size_t k) const { return k >= lo && (!hi || k <= *hi); }
  auto operator<=>(const Interval&) const = default;
};

namespace semantics {

// Distinct targets per source element along `arrow` must fall in an interval.
struct Multiplicity {
  std::vector<Interval> intervals;
  std::string arrow = "r";
};

// Distinct elements of the key node have distinct tuples of attribute values.
struct Key {
  std::vector<std::string> attributes;
};

// Every sub-link a->b has a sup-link a->b.
struct Subset {
  std::string sub = "r1";
  std::string sup = "r2";
};

// Pairs related by p1;p2 are related by q1;q2.
struct CompositeSubset4 {
  std::string p1 = "p1", p2 = "p2", q1 = "q1", q2 = "q2";
};

// Distinct apex elements never share a (leg1 target, leg2 target) pair.
struct JointlyMonic {
  std::string leg1 = "01";
  std::string leg2 = "02";
};

// The composites p1;p2 and q1;q2 relate the same pairs.
struct Commutativity {
  std::string p1 = "p1", p2 = "p2", q1 = "q1", q2 = "q2";
};

// Injectivity with respect to a slice morphism over the arity.
struct Regular {
  SliceMorphism formula;
};

// Lifting against m: W -> R over n: R -> arity.
struct Lifting {
  GraphMorphism m;
  GraphMorphism n;
};

struct TableEntry {
  std::string id;
  TypedInstance instance;  // canonical
};

// Extensional semantics: the finite set of valid instances up to iso.
struct Table {
  std::vector<TableEntry> entries;
};

}  // namespace semantics

using Semantics =
    std::variant<semantics::Multiplicity, semantics::Key, semantics::Subset,
                 semantics::CompositeSubset4, semantics::JointlyMonic, semantics::Commutativity,
                 semantics::Regular, semantics::Lifting, semantics::Table>;

inline std::string kind_name(const Semantics& s) {
  static const char* names[] = {"multiplicity", "key",     "subset",  "composite_subset4",
                                "jointly_monic", "commutativity", "regular", "lifting", "table"};
  return names[s.index()];
}

// Outcome of evaluating a semantics on an instance over the arity.
struct Evaluation {
  Status status = Status::valid;
  json witness = json::object();
  std::vector<std::string> offending;  // element ids of the evaluated instance
  std::string reason;
};

struct ConstraintSymbol {
  std::string name;
  Graph arity;
  Semantics semantics;
};

// ---------------------------------------------------------------------------
// Standard arity shapes.

namespace arity {

// A -r-> B
inline Graph arrow() { return Graph({"A", "B"}, {Arrow{"r", "A", "B"}}); }

// A =r1,r2=> B
inline Graph parallel_pair() {
  return Graph({"A", "B"}, {Arrow{"r1", "A", "B"}, Arrow{"r2", "A", "B"}});
}

// K -a<i>-> V<i>, i = 1..k
inline Graph key(std::size_t k) {
  std::vector<std::string> nodes{"K"};
  std::vector<Arrow> arrows;
  for (std::size_t i = 1; i <= k; ++i) {
    nodes.push_back("V" + std::to_string(i));
    arrows.push_back(Arrow{"a" + std::to_string(i), "K", nodes.back()});
  }
  return Graph(nodes, arrows);
}

// 1 <-01- 0 -02-> 2
inline Graph span() {
  return Graph({"0", "1", "2"}, {Arrow{"01", "0", "1"}, Arrow{"02", "0", "2"}});
}

// A -p1-> B -p2-> D and A -q1-> C -q2-> D
inline Graph square() {
  return Graph({"A", "B", "C", "D"}, {Arrow{"p1", "A", "B"}, Arrow{"p2", "B", "D"},
                                      Arrow{"q1", "A", "C"}, Arrow{"q2", "C", "D"}});
}

}  // namespace arity

// ---------------------------------------------------------------------------
// Lifting search, shared by regular and lifting semantics.

namespace detail {

struct Buckets {
  std::vector<std::vector<std::size_t>> nodes;   // schema node -> carrier nodes
  std::vector<std::vector<std::size_t>> arrows;  // schema arrow -> carrier arrows

  explicit Buckets(const TypedInstance& t)
      : nodes(t.schema().node_count()), arrows(t.schema().arrow_count()) {
    for (std::size_t i = 0; i < t.carrier().node_count(); ++i)
      nodes[t.typing().node_image(i)].push_back(i);
    for (std::size_t i = 0; i < t.carrier().arrow_count(); ++i)
      arrows[t.typing().arrow_image(i)].push_back(i);
  }
};

inline json table_json(const Graph& dom, const Graph& cod, const std::vector<std::size_t>& nm,
                       const std::vector<std::size_t>& am) {
  json nodes = json::object(), arrows = json::object();
  for (std::size_t i = 0; i < nm.size(); ++i) nodes[dom.node(i)] = cod.node(nm[i]);
  for (std::size_t i = 0; i < am.size(); ++i) arrows[dom.arrow(i).id] = cod.arrow(am[i]).id;
  return {{"nodes", nodes}, {"arrows", arrows}};
}

}  // namespace detail

// For every x: W -> X with x;t = m;n, search l: R -> X with m;l = x and
// l;t = n. Unknown if more than `limit` testing maps exist.
inline Evaluation check_lifting(const TypedInstance& t, const GraphMorphism& m,
                                const GraphMorphism& n, std::size_t limit = kDefaultHomLimit) {
  if (!(m.cod() == n.dom())) throw MismatchError("lifting pair does not compose");
  if (!(n.cod() == t.schema())) {
    throw MismatchError("lifting constraint is over " + describe(n.cod()) +
                        ", instance is over " + describe(t.schema()));
  }
  const Graph& w = m.dom();
  const Graph& r = m.cod();
  const Graph& x_graph = t.carrier();
  detail::Buckets buckets(t);

  HomConstraints xc = HomConstraints::none(w);
  for (std::size_t i = 0; i < w.node_count(); ++i)
    xc.node_candidates[i] = buckets.nodes[n.node_image(m.node_image(i))];
  for (std::size_t i = 0; i < w.arrow_count(); ++i)
    xc.arrow_candidates[i] = buckets.arrows[n.arrow_image(m.arrow_image(i))];

  std::vector<std::vector<std::size_t>> pre_nodes(r.node_count()), pre_arrows(r.arrow_count());
  for (std::size_t i = 0; i < w.node_count(); ++i) pre_nodes[m.node_image(i)].push_back(i);
  for (std::size_t i = 0; i < w.arrow_count(); ++i) pre_arrows[m.arrow_image(i)].push_back(i);

  Evaluation ev;
  json lifts = json::array();
  std::size_t tested = 0;
  search_homomorphisms(w, x_graph, xc, [&](const auto& xn, const auto& xa) {
    if (++tested > limit) {
      ev.status = Status::unknown;
      ev.reason = "more than " + std::to_string(limit) + " testing maps";
      return false;
    }
    HomConstraints lc = HomConstraints::none(r);
    bool consistent = true;
    for (std::size_t j = 0; j < r.node_count() && consistent; ++j) {
      if (pre_nodes[j].empty()) {
        lc.node_candidates[j] = buckets.nodes[n.node_image(j)];
      } else {
        std::size_t v = xn[pre_nodes[j].front()];
        for (auto p : pre_nodes[j]) consistent = consistent && xn[p] == v;
        lc.node_candidates[j] = std::vector<std::size_t>{v};
      }
    }
    for (std::size_t j = 0; j < r.arrow_count() && consistent; ++j) {
      if (pre_arrows[j].empty()) {
        lc.arrow_candidates[j] = buckets.arrows[n.arrow_image(j)];
      } else {
        std::size_t v = xa[pre_arrows[j].front()];
        for (auto p : pre_arrows[j]) consistent = consistent && xa[p] == v;
        lc.arrow_candidates[j] = std::vector<std::size_t>{v};
      }
    }
    std::optional<GraphMorphism> lift;
    if (consistent) lift = first_homomorphism(r, x_graph, lc);
    json x_json = detail::table_json(w, x_graph, xn, xa);
    if (!lift) {
      ev.status = Status::invalid;
      ev.reason = "testing map has no lift";
      ev.witness = {{"unliftable", x_json}};
      std::set<std::string> off;
      for (auto v : xn) off.insert(x_graph.node(v));
      for (auto a : xa) off.insert(x_graph.arrow(a).id);
      ev.offending.assign(off.begin(), off.end());
      return false;
    }
    lifts.push_back({{"x", x_json},
                     {"lift", detail::table_json(r, x_graph, lift->node_map(), lift->arrow_map())}});
    return true;
  });
  if (ev.status == Status::valid) ev.witness = {{"lifts", lifts}};
  return ev;
}

// t is injective w.r.t. the formula f: every x: dom f -> t factors as f;y.
inline Evaluation check_injectivity(const TypedInstance& t, const SliceMorphism& formula,
                                    std::size_t limit = kDefaultHomLimit) {
  if (!(formula.to().schema() == t.schema())) {
    throw MismatchError("formula lives over " + describe(formula.to().schema()) +
                        ", instance is over " + describe(t.schema()));
  }
  Evaluation ev = check_lifting(t, formula.map(), formula.to().typing(), limit);
  if (ev.status == Status::valid) {
    json fac = json::array();
    for (const auto& l : ev.witness["lifts"]) fac.push_back({{"x", l["x"]}, {"y", l["lift"]}});
    ev.witness = {{"factorizations", fac}};
  } else if (ev.status == Status::invalid) {
    ev.witness = {{"unfactorizable", ev.witness["unliftable"]}};
  }
  return ev;
}

// (m, n) = (f, codomain typing of f).
inline semantics::Lifting regular_to_lifting(const semantics::Regular& c) {
  return semantics::Lifting{c.formula.map(), c.formula.to().typing()};
}

// The formula m, as a slice morphism from m;n to n.
inline semantics::Regular lifting_to_regular(const semantics::Lifting& l) {
  return semantics::Regular{
      SliceMorphism(TypedInstance(compose(l.m, l.n)), TypedInstance(l.n), l.m)};
}

// ---------------------------------------------------------------------------
// Well-formedness of a symbol against its arity.

namespace detail {

inline std::size_t role_arrow(const Graph& g, const std::string& sym, const std::string& id) {
  auto a = g.find_arrow(id);
  if (!a) throw SignatureError("symbol '" + sym + "': arity has no arrow '" + id + "'");
  return *a;
}

inline void check_intervals(const std::string& sym, const std::vector<Interval>& iv) {
  if (iv.empty()) throw SignatureError("symbol '" + sym + "': no multiplicity intervals");
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (iv[i].hi && *iv[i].hi < iv[i].lo)
      throw SignatureError("symbol '" + sym + "': empty interval");
    if (i > 0 && (!iv[i - 1].hi || *iv[i - 1].hi >= iv[i].lo))
      throw SignatureError("symbol '" + sym + "': intervals must be sorted and disjoint");
  }
}

}  // namespace detail

inline semantics::Table make_table(const Graph& arity, std::vector<semantics::TableEntry> entries) {
  std::set<std::string> ids, bytes;
  for (auto& e : entries) {
    if (!(e.instance.schema() == arity)) {
      throw SignatureError("table entry '" + e.id + "' is not typed over the arity");
    }
    e.instance = canonicalize(e.instance).instance;
    if (!ids.insert(e.id).second) throw SignatureError("duplicate table entry id '" + e.id + "'");
    if (!bytes.insert(canonical_bytes(e.instance)).second) {
      throw SignatureError("table entry '" + e.id + "' duplicates another entry");
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return semantics::Table{std::move(entries)};
}

inline void validate_symbol(const ConstraintSymbol& c) {
  const Graph& g = c.arity;
  const std::string& s = c.name;
  auto square_roles = [&](const std::string& p1, const std::string& p2, const std::string& q1,
                          const std::string& q2) {
    auto a1 = detail::role_arrow(g, s, p1), a2 = detail::role_arrow(g, s, p2);
    auto b1 = detail::role_arrow(g, s, q1), b2 = detail::role_arrow(g, s, q2);
    if (g.tgt(a1) != g.src(a2) || g.tgt(b1) != g.src(b2) || g.src(a1) != g.src(b1) ||
        g.tgt(a2) != g.tgt(b2)) {
      throw SignatureError("symbol '" + s + "': roles do not form two paths with shared ends");
    }
  };
  std::visit(
      [&](const auto& sem) {
        using T = std::decay_t<decltype(sem)>;
        if constexpr (std::is_same_v<T, semantics::Multiplicity>) {
          detail::role_arrow(g, s, sem.arrow);
          detail::check_intervals(s, sem.intervals);
        } else if constexpr (std::is_same_v<T, semantics::Key>) {
          if (sem.attributes.empty()) throw SignatureError("symbol '" + s + "': empty key");
          auto k = g.src(detail::role_arrow(g, s, sem.attributes.front()));
          for (const auto& a : sem.attributes) {
            if (g.src(detail::role_arrow(g, s, a)) != k)
              throw SignatureError("symbol '" + s + "': key attributes must share their source");
          }
        } else if constexpr (std::is_same_v<T, semantics::Subset>) {
          auto a = detail::role_arrow(g, s, sem.sub), b = detail::role_arrow(g, s, sem.sup);
          if (g.src(a) != g.src(b) || g.tgt(a) != g.tgt(b))
            throw SignatureError("symbol '" + s + "': subset roles must be parallel");
        } else if constexpr (std::is_same_v<T, semantics::CompositeSubset4> ||
                             std::is_same_v<T, semantics::Commutativity>) {
          square_roles(sem.p1, sem.p2, sem.q1, sem.q2);
        } else if constexpr (std::is_same_v<T, semantics::JointlyMonic>) {
          auto a = detail::role_arrow(g, s, sem.leg1), b = detail::role_arrow(g, s, sem.leg2);
          if (g.src(a) != g.src(b))
            throw SignatureError("symbol '" + s + "': legs must share their source");
        } else if constexpr (std::is_same_v<T, semantics::Regular>) {
          if (!(sem.formula.to().schema() == g))
            throw SignatureError("symbol '" + s + "': formula is not over the arity");
        } else if constexpr (std::is_same_v<T, semantics::Lifting>) {
          if (!(sem.n.cod() == g) || !(sem.m.cod() == sem.n.dom()))
            throw SignatureError("symbol '" + s + "': lifting pair is not over the arity");
        } else if constexpr (std::is_same_v<T, semantics::Table>) {
          std::set<std::string> ids;
          for (const auto& e : sem.entries) {
            if (!(e.instance.schema() == g))
              throw SignatureError("symbol '" + s + "': table entry not over the arity");
            if (!ids.insert(e.id).second)
              throw SignatureError("symbol '" + s + "': duplicate table entry id");
          }
        }
      },
      c.semantics);
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace detail {

// Links of a schema arrow as (source element, target element, link) indices.
struct LinkTable {
  const TypedInstance& t;
  Buckets b;
  explicit LinkTable(const TypedInstance& inst) : t(inst), b(inst) {}

  const std::vector<std::size_t>& links(std::string_view arrow) const {
    return b.arrows[t.schema().arrow_index(arrow)];
  }
  const std::vector<std::size_t>& elements(std::size_t schema_node) const {
    return b.nodes[schema_node];
  }
  std::size_t src(std::size_t link) const { return t.carrier().src(link); }
  std::size_t tgt(std::size_t link) const { return t.carrier().tgt(link); }
  const std::string& node(std::size_t i) const { return t.carrier().node(i); }
  const std::string& link_id(std::size_t i) const { return t.carrier().arrow(i).id; }

  // Distinct targets reached from each element along the arrow.
  std::map<std::size_t, std::set<std::size_t>> image(std::string_view arrow) const {
    std::map<std::size_t, std::set<std::size_t>> out;
    for (auto l : links(arrow)) out[src(l)].insert(tgt(l));
    return out;
  }

  // Pairs related by the composite p;q, each with one witnessing link pair.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> composite(
      std::string_view p, std::string_view q) const {
    std::map<std::size_t, std::vector<std::size_t>> q_from;
    for (auto l : links(q)) q_from[src(l)].push_back(l);
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> out;
    for (auto l : links(p)) {
      for (auto k : q_from[tgt(l)]) out.try_emplace({src(l), tgt(k)}, l, k);
    }
    return out;
  }
};

inline Evaluation eval_multiplicity(const semantics::Multiplicity& m, const TypedInstance& t) {
  LinkTable lt(t);
  auto img = lt.image(m.arrow);
  Evaluation ev;
  json counts = json::object();
  for (auto a : lt.elements(t.schema().src(t.schema().arrow_index(m.arrow)))) {
    std::size_t k = img.count(a) ? img[a].size() : 0;
    counts[lt.node(a)] = k;
    bool ok = std::any_of(m.intervals.begin(), m.intervals.end(),
                          [&](const Interval& i) { return i.contains(k); });
    if (!ok) ev.offending.push_back(lt.node(a));
  }
  ev.witness = {{"counts", counts}};
  if (!ev.offending.empty()) {
    ev.status = Status::invalid;
    ev.reason = "target count outside the allowed intervals";
  }
  return ev;
}

inline Evaluation eval_key(const semantics::Key& k, const TypedInstance& t) {
  LinkTable lt(t);
  std::vector<std::map<std::size_t, std::set<std::size_t>>> imgs;
  for (const auto& a : k.attributes) imgs.push_back(lt.image(a));
  std::size_t key_node = t.schema().src(t.schema().arrow_index(k.attributes.front()));
  std::map<std::vector<std::vector<std::string>>, std::string> seen;
  Evaluation ev;
  json tuples = json::object();
  for (auto e : lt.elements(key_node)) {
    std::vector<std::vector<std::string>> tuple;
    for (auto& img : imgs) {
      std::vector<std::string> vals;
      for (auto v : img[e]) vals.push_back(lt.node(v));
      tuple.push_back(vals);
    }
    tuples[lt.node(e)] = tuple;
    auto [it, fresh] = seen.emplace(tuple, lt.node(e));
    if (!fresh) {
      ev.offending.push_back(it->second);
      ev.offending.push_back(lt.node(e));
    }
  }
  std::sort(ev.offending.begin(), ev.offending.end());
  ev.offending.erase(std::unique(ev.offending.begin(), ev.offending.end()), ev.offending.end());
  ev.witness = {{"tuples", tuples}};
  if (!ev.offending.empty()) {
    ev.status = Status::invalid;
    ev.reason = "distinct elements share a key tuple";
  }
  return ev;
}

inline Evaluation eval_subset(const semantics::Subset& s, const TypedInstance& t) {
  LinkTable lt(t);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> sup;
  for (auto l : lt.links(s.sup)) sup.try_emplace({lt.src(l), lt.tgt(l)}, l);
  Evaluation ev;
  json inclusion = json::object();
  for (auto l : lt.links(s.sub)) {
    auto it = sup.find({lt.src(l), lt.tgt(l)});
    if (it == sup.end()) {
      ev.offending.push_back(lt.link_id(l));
    } else {
      inclusion[lt.link_id(l)] = lt.link_id(it->second);
    }
  }
  ev.witness = {{"inclusion", inclusion}};
  if (!ev.offending.empty()) {
    ev.status = Status::invalid;
    ev.reason = "link without a parallel link of the including arrow";
  }
  return ev;
}

inline json composite_json(
    const LinkTable& lt,
    const std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>& c) {
  json out = json::object();
  for (const auto& [pair, links] : c) {
    out[pair_id(lt.node(pair.first), lt.node(pair.second))] =
        json::array({lt.link_id(links.first), lt.link_id(links.second)});
  }
  return out;
}

inline Evaluation eval_composite(const std::string& p1, const std::string& p2,
                                 const std::string& q1, const std::string& q2,
                                 const TypedInstance& t, bool both_ways) {
  LinkTable lt(t);
  auto p = lt.composite(p1, p2);
  auto q = lt.composite(q1, q2);
  Evaluation ev;
  std::set<std::string> off;
  json cover = json::object();
  for (const auto& [pair, links] : p) {
    auto it = q.find(pair);
    if (it == q.end()) {
      off.insert(lt.node(pair.first));
      off.insert(lt.node(pair.second));
    } else {
      cover[pair_id(lt.node(pair.first), lt.node(pair.second))] =
          json::array({lt.link_id(it->second.first), lt.link_id(it->second.second)});
    }
  }
  if (both_ways) {
    for (const auto& [pair, links] : q) {
      if (!p.count(pair)) {
        off.insert(lt.node(pair.first));
        off.insert(lt.node(pair.second));
      }
    }
    ev.witness = {{"left", composite_json(lt, p)}, {"right", composite_json(lt, q)}};
  } else {
    ev.witness = {{"cover", cover}};
  }
  ev.offending.assign(off.begin(), off.end());
  if (!off.empty()) {
    ev.status = Status::invalid;
    ev.reason = both_ways ? "composites differ" : "composite pair not covered";
  }
  return ev;
}

inline Evaluation eval_jointly_monic(const semantics::JointlyMonic& j, const TypedInstance& t) {
  LinkTable lt(t);
  auto i1 = lt.image(j.leg1);
  auto i2 = lt.image(j.leg2);
  std::size_t apex = t.schema().src(t.schema().arrow_index(j.leg1));
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> owner;
  std::set<std::string> off;
  for (auto x : lt.elements(apex)) {
    for (auto u : i1[x]) {
      for (auto v : i2[x]) {
        auto [it, fresh] = owner.emplace(std::make_pair(u, v), x);
        if (!fresh && it->second != x) {
          off.insert(lt.node(it->second));
          off.insert(lt.node(x));
        }
      }
    }
  }
  Evaluation ev;
  ev.offending.assign(off.begin(), off.end());
  if (!off.empty()) {
    ev.status = Status::invalid;
    ev.reason = "distinct apex elements share a target pair";
  }
  return ev;
}

inline Evaluation eval_table(const semantics::Table& tab, const TypedInstance& canonical) {
  std::string bytes = canonical_bytes(canonical);
  Evaluation ev;
  for (const auto& e : tab.entries) {
    if (canonical_bytes(e.instance) == bytes) {
      ev.witness = {{"entry", e.id}};
      return ev;
    }
  }
  ev.status = Status::invalid;
  ev.reason = "instance matches no table entry";
  ev.witness = json::object();
  return ev;
}

}  // namespace detail

// Evaluates c on an instance that is already in canonical form.
inline Evaluation evaluate_canonical(const ConstraintSymbol& c, const TypedInstance& t,
                                     std::size_t limit = kDefaultHomLimit) {
  return std::visit(
      [&](const auto& sem) -> Evaluation {
        using T = std::decay_t<decltype(sem)>;
        if constexpr (std::is_same_v<T, semantics::Multiplicity>) {
          return detail::eval_multiplicity(sem, t);
        } else if constexpr (std::is_same_v<T, semantics::Key>) {
          return detail::eval_key(sem, t);
        } else if constexpr (std::is_same_v<T, semantics::Subset>) {
          return detail::eval_subset(sem, t);
        } else if constexpr (std::is_same_v<T, semantics::CompositeSubset4>) {
          return detail::eval_composite(sem.p1, sem.p2, sem.q1, sem.q2, t, false);
        } else if constexpr (std::is_same_v<T, semantics::Commutativity>) {
          return detail::eval_composite(sem.p1, sem.p2, sem.q1, sem.q2, t, true);
        } else if constexpr (std::is_same_v<T, semantics::JointlyMonic>) {
          return detail::eval_jointly_monic(sem, t);
        } else if constexpr (std::is_same_v<T, semantics::Regular>) {
          return check_injectivity(t, sem.formula, limit);
        } else if constexpr (std::is_same_v<T, semantics::Lifting>) {
          return check_lifting(t, sem.m, sem.n, limit);
        } else {
          return detail::eval_table(sem, t);
        }
      },
      c.semantics);
}

struct SymbolVerdict {
  Evaluation evaluation;
  CanonicalInstance canonical;  // the evaluated representative
};

// Evaluates on the canonical form of t; offending ids are reported in t's ids.
inline SymbolVerdict evaluate_detailed(const ConstraintSymbol& c, const TypedInstance& t,
                                       std::size_t limit = kDefaultHomLimit) {
  if (!(t.schema() == c.arity)) {
    throw MismatchError("instance schema " + describe(t.schema()) + " is not the arity of '" +
                        c.name + "' " + describe(c.arity));
  }
  CanonicalInstance ci = canonicalize(t);
  Evaluation ev = evaluate_canonical(c, ci.instance, limit);
  GraphMorphism back = inverse(ci.relabeling);
  for (auto& id : ev.offending) {
    const Graph& g = ci.instance.carrier();
    if (auto n = g.find_node(id)) {
      id = t.carrier().node(back.node_image(*n));
    } else if (auto a = g.find_arrow(id)) {
      id = t.carrier().arrow(back.arrow_image(*a)).id;
    }
  }
  std::sort(ev.offending.begin(), ev.offending.end());
  return SymbolVerdict{std::move(ev), std::move(ci)};
}

inline Evaluation evaluate(const ConstraintSymbol& c, const TypedInstance& t,
                           std::size_t limit = kDefaultHomLimit) {
  return evaluate_detailed(c, t, limit).evaluation;
}

// ---------------------------------------------------------------------------
// Signatures.

struct Dependency {
  std::string id;
  std::string from;         // the dependent symbol c
  std::string to;           // the contributing symbol c'
  GraphMorphism arity_map;  // arity(c') -> arity(c)
};

class Signature {
 public:
  void add_symbol(ConstraintSymbol c) {
    validate_symbol(c);
    if (symbols_.count(c.name)) throw SignatureError("duplicate symbol '" + c.name + "'");
    std::string name = c.name;
    symbols_.emplace(std::move(name), std::move(c));
  }

  void add_dependency(Dependency d) {
    const ConstraintSymbol& from = symbol(d.from);
    const ConstraintSymbol& to = symbol(d.to);
    if (!(d.arity_map.dom() == to.arity) || !(d.arity_map.cod() == from.arity)) {
      throw SignatureError("dependency '" + d.id + "': arity map must go from the arity of '" +
                           d.to + "' to the arity of '" + d.from + "'");
    }
    for (const auto& e : deps_) {
      if (e.id == d.id) throw SignatureError("duplicate dependency id '" + d.id + "'");
    }
    if (d.from == d.to || reaches(d.to, d.from)) {
      throw SignatureError("dependency '" + d.id + "' would create a cycle");
    }
    deps_.push_back(std::move(d));
    std::sort(deps_.begin(), deps_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  }

  bool has_symbol(const std::string& name) const { return symbols_.count(name) != 0; }
  const ConstraintSymbol& symbol(const std::string& name) const {
    auto it = symbols_.find(name);
    if (it == symbols_.end()) throw SignatureError("unknown constraint symbol '" + name + "'");
    return it->second;
  }
  const std::map<std::string, ConstraintSymbol>& symbols() const noexcept { return symbols_; }
  const std::vector<Dependency>& dependencies() const noexcept { return deps_; }

  std::vector<const Dependency*> dependencies_from(const std::string& name) const {
    std::vector<const Dependency*> out;
    for (const auto& d : deps_)
      if (d.from == name) out.push_back(&d);
    return out;
  }
  const Dependency& dependency(const std::string& id) const {
    for (const auto& d : deps_)
      if (d.id == id) return d;
    throw SignatureError("unknown dependency '" + id + "'");
  }

  bool acyclic() const {
    for (const auto& [name, c] : symbols_) {
      for (const auto* d : dependencies_from(name))
        if (reaches(d->to, name)) return false;
    }
    return true;
  }

 private:
  bool reaches(const std::string& a, const std::string& b) const {
    std::set<std::string> seen{a};
    std::vector<std::string> stack{a};
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      if (x == b) return true;
      for (const auto* d : dependencies_from(x))
        if (seen.insert(d->to).second) stack.push_back(d->to);
    }
    return false;
  }

  std::map<std::string, ConstraintSymbol> symbols_;
  std::vector<Dependency> deps_;
};

// ---------------------------------------------------------------------------
// Builtin library.

inline ConstraintSymbol multiplicity_symbol(const std::string& name, std::vector<Interval> iv) {
  return ConstraintSymbol{name, arity::arrow(), semantics::Multiplicity{std::move(iv), "r"}};
}

// Existence formula over A -r-> B: {a} into {a -r-> b}; injectivity is [1..*].
inline SliceMorphism existence_formula() {
  Graph arity = arity::arrow();
  Graph p({"a"}, {});
  Graph q({"a", "b"}, {Arrow{"l", "a", "b"}});
  TypedInstance tp(GraphMorphism::from_ids(p, arity, {{"a", "A"}}, {}));
  TypedInstance tq(GraphMorphism::from_ids(q, arity, {{"a", "A"}, {"b", "B"}}, {{"l", "r"}}));
  return SliceMorphism(tp, tq, GraphMorphism::from_ids(p, q, {{"a", "a"}}, {}));
}

// Uniqueness formula over A -r-> B: two links a->b1, a->b2 glued to two
// parallel links a->b, so a factorization exists iff b1 = b2; injectivity is [0..1].
inline SliceMorphism uniqueness_formula() {
  Graph arity = arity::arrow();
  Graph p({"a", "b1", "b2"}, {Arrow{"l1", "a", "b1"}, Arrow{"l2", "a", "b2"}});
  Graph q({"a", "b"}, {Arrow{"l1", "a", "b"}, Arrow{"l2", "a", "b"}});
  TypedInstance tp(GraphMorphism::from_ids(p, arity, {{"a", "A"}, {"b1", "B"}, {"b2", "B"}},
                                           {{"l1", "r"}, {"l2", "r"}}));
  TypedInstance tq(GraphMorphism::from_ids(q, arity, {{"a", "A"}, {"b", "B"}},
                                           {{"l1", "r"}, {"l2", "r"}}));
  return SliceMorphism(
      tp, tq,
      GraphMorphism::from_ids(p, q, {{"a", "a"}, {"b1", "b"}, {"b2", "b"}},
                              {{"l1", "l1"}, {"l2", "l2"}}));
}

// Builtin symbols: multiplicities, [=>], [=>]4, [key] over two attributes,
// [jm], [comm], and the two dependencies of [jm] on [1].
inline std::shared_ptr<const Signature> builtin_signature() {
  static const std::shared_ptr<const Signature> sig = [] {
    auto s = std::make_shared<Signature>();
    s->add_symbol(multiplicity_symbol("[1..*]", {{1, std::nullopt}}));
    s->add_symbol(multiplicity_symbol("[0..1]", {{0, 1}}));
    s->add_symbol(multiplicity_symbol("[1]", {{1, 1}}));
    s->add_symbol(multiplicity_symbol("[0..*]", {{0, std::nullopt}}));
    s->add_symbol(multiplicity_symbol("[1..4,6]", {{1, 4}, {6, 6}}));
    s->add_symbol(multiplicity_symbol("[1,2,4]", {{1, 2}, {4, 4}}));
    s->add_symbol({"[=>]", arity::parallel_pair(), semantics::Subset{}});
    s->add_symbol({"[=>]4", arity::square(), semantics::CompositeSubset4{}});
    s->add_symbol({"[key]", arity::key(2), semantics::Key{{"a1", "a2"}}});
    s->add_symbol({"[jm]", arity::span(), semantics::JointlyMonic{}});
    s->add_symbol({"[comm]", arity::square(), semantics::Commutativity{}});
    Graph one = arity::arrow();
    s->add_dependency({"d1", "[jm]", "[1]",
                       GraphMorphism::from_ids(one, arity::span(), {{"A", "0"}, {"B", "1"}},
                                               {{"r", "01"}})});
    s->add_dependency({"d2", "[jm]", "[1]",
                       GraphMorphism::from_ids(one, arity::span(), {{"A", "0"}, {"B", "2"}},
                                               {{"r", "02"}})});
    return s;
  }();
  return sig;
}

}  // namespace dcl
