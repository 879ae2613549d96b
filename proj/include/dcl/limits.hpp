// Pullbacks and pushouts of finite graphs, computed strictly.
//
// Pullback elements are pairs with ids "(a|b)". Pushout elements are classes
// of the tagged disjoint union ("0.<id>" from the first codomain, "1.<id>"
// from the second), named by their least member.

#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "dcl/graph.hpp"

namespace dcl {

namespace detail {

inline void append_escaped(std::string& out, std::string_view s) {
  for (char ch : s) {
    if (ch == '|' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
}

}  // namespace detail

// Injective pairing of ids: '|' and '\' inside components are escaped.
inline std::string pair_id(std::string_view a, std::string_view b) {
  std::string s = "(";
  detail::append_escaped(s, a);
  s.push_back('|');
  detail::append_escaped(s, b);
  s.push_back(')');
  return s;
}

struct Pullback {
  Graph apex;
  GraphMorphism left;   // apex -> dom(f)
  GraphMorphism right;  // apex -> dom(g)

  // The unique u' : Y -> apex with u';left = u and u';right = v.
  GraphMorphism mediate(const GraphMorphism& u, const GraphMorphism& v) const {
    if (!(u.dom() == v.dom()) || !(u.cod() == left.cod()) || !(v.cod() == right.cod())) {
      throw MismatchError("competitor span does not match the pullback feet");
    }
    const Graph& y = u.dom();
    std::vector<std::size_t> n(y.node_count()), a(y.arrow_count());
    for (std::size_t i = 0; i < n.size(); ++i) {
      auto idx = apex.find_node(pair_id(u.cod().node(u.node_image(i)),
                                        v.cod().node(v.node_image(i))));
      if (!idx) throw MismatchError("competitor span does not commute");
      n[i] = *idx;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto idx = apex.find_arrow(pair_id(u.cod().arrow(u.arrow_image(i)).id,
                                         v.cod().arrow(v.arrow_image(i)).id));
      if (!idx) throw MismatchError("competitor span does not commute");
      a[i] = *idx;
    }
    return GraphMorphism(y, apex, std::move(n), std::move(a));
  }
};

inline Pullback pullback(const GraphMorphism& f, const GraphMorphism& g) {
  if (!(f.cod() == g.cod())) {
    throw MismatchError("pullback of a non-cospan: " + describe(f.cod()) + " vs " +
                        describe(g.cod()));
  }
  const Graph& c = f.cod();
  const Graph& a = f.dom();
  const Graph& b = g.dom();
  std::vector<std::vector<std::size_t>> fa(c.node_count()), gb(c.node_count());
  for (std::size_t i = 0; i < a.node_count(); ++i) fa[f.node_image(i)].push_back(i);
  for (std::size_t i = 0; i < b.node_count(); ++i) gb[g.node_image(i)].push_back(i);
  std::vector<std::vector<std::size_t>> fe(c.arrow_count()), ge(c.arrow_count());
  for (std::size_t i = 0; i < a.arrow_count(); ++i) fe[f.arrow_image(i)].push_back(i);
  for (std::size_t i = 0; i < b.arrow_count(); ++i) ge[g.arrow_image(i)].push_back(i);

  std::vector<std::string> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> node_pairs;
  for (std::size_t k = 0; k < c.node_count(); ++k) {
    for (auto i : fa[k]) {
      for (auto j : gb[k]) {
        nodes.push_back(pair_id(a.node(i), b.node(j)));
        node_pairs.emplace_back(i, j);
      }
    }
  }
  std::vector<Arrow> arrows;
  std::vector<std::pair<std::size_t, std::size_t>> arrow_pairs;
  for (std::size_t k = 0; k < c.arrow_count(); ++k) {
    for (auto i : fe[k]) {
      for (auto j : ge[k]) {
        arrows.push_back(Arrow{pair_id(a.arrow(i).id, b.arrow(j).id),
                               pair_id(a.node(a.src(i)), b.node(b.src(j))),
                               pair_id(a.node(a.tgt(i)), b.node(b.tgt(j)))});
        arrow_pairs.emplace_back(i, j);
      }
    }
  }
  Graph p(nodes, arrows);
  std::vector<std::size_t> ln(p.node_count()), rn(p.node_count());
  std::vector<std::size_t> la(p.arrow_count()), ra(p.arrow_count());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    auto idx = p.node_index(nodes[k]);
    ln[idx] = node_pairs[k].first;
    rn[idx] = node_pairs[k].second;
  }
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    auto idx = p.arrow_index(arrows[k].id);
    la[idx] = arrow_pairs[k].first;
    ra[idx] = arrow_pairs[k].second;
  }
  return Pullback{p, GraphMorphism(p, a, std::move(ln), std::move(la)),
                  GraphMorphism(p, b, std::move(rn), std::move(ra))};
}

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
};

}  // namespace detail

struct Pushout {
  Graph apex;
  GraphMorphism from_first;   // cod(f) -> apex, parallel to g
  GraphMorphism from_second;  // cod(g) -> apex, parallel to f

  // The unique map apex -> Z agreeing with u on cod(f) and v on cod(g).
  GraphMorphism mediate(const GraphMorphism& u, const GraphMorphism& v) const {
    if (!(u.cod() == v.cod()) || !(u.dom() == from_first.dom()) ||
        !(v.dom() == from_second.dom())) {
      throw MismatchError("competitor cospan does not match the pushout");
    }
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> n(apex.node_count(), none), a(apex.arrow_count(), none);
    auto put = [&](std::vector<std::size_t>& m, std::size_t at, std::size_t val) {
      if (m[at] != none && m[at] != val) throw MismatchError("competitor cospan does not commute");
      m[at] = val;
    };
    for (std::size_t i = 0; i < u.dom().node_count(); ++i)
      put(n, from_first.node_image(i), u.node_image(i));
    for (std::size_t i = 0; i < v.dom().node_count(); ++i)
      put(n, from_second.node_image(i), v.node_image(i));
    for (std::size_t i = 0; i < u.dom().arrow_count(); ++i)
      put(a, from_first.arrow_image(i), u.arrow_image(i));
    for (std::size_t i = 0; i < v.dom().arrow_count(); ++i)
      put(a, from_second.arrow_image(i), v.arrow_image(i));
    return GraphMorphism(apex, u.cod(), std::move(n), std::move(a));
  }
};

inline Pushout pushout(const GraphMorphism& f, const GraphMorphism& g) {
  if (!(f.dom() == g.dom())) {
    throw MismatchError("pushout of a non-span: " + describe(f.dom()) + " vs " +
                        describe(g.dom()));
  }
  const Graph& a = f.cod();
  const Graph& b = g.cod();
  const std::size_t na = a.node_count(), ea = a.arrow_count();
  detail::UnionFind nodes_uf(na + b.node_count());
  detail::UnionFind arrows_uf(ea + b.arrow_count());
  for (std::size_t i = 0; i < f.dom().node_count(); ++i)
    nodes_uf.unite(f.node_image(i), na + g.node_image(i));
  for (std::size_t i = 0; i < f.dom().arrow_count(); ++i)
    arrows_uf.unite(f.arrow_image(i), ea + g.arrow_image(i));

  auto node_tag = [&](std::size_t k) {
    return k < na ? "0." + a.node(k) : "1." + b.node(k - na);
  };
  auto arrow_tag = [&](std::size_t k) {
    return k < ea ? "0." + a.arrow(k).id : "1." + b.arrow(k - ea).id;
  };
  // Representative name of each class: least tagged member.
  std::map<std::size_t, std::string> node_name, arrow_name;
  for (std::size_t k = 0; k < na + b.node_count(); ++k) {
    auto r = nodes_uf.find(k);
    auto t = node_tag(k);
    auto it = node_name.find(r);
    if (it == node_name.end() || t < it->second) node_name[r] = t;
  }
  for (std::size_t k = 0; k < ea + b.arrow_count(); ++k) {
    auto r = arrows_uf.find(k);
    auto t = arrow_tag(k);
    auto it = arrow_name.find(r);
    if (it == arrow_name.end() || t < it->second) arrow_name[r] = t;
  }
  std::vector<std::string> nodes;
  for (const auto& [r, name] : node_name) nodes.push_back(name);
  std::vector<Arrow> arrows;
  for (const auto& [r, name] : arrow_name) {
    std::size_t s, t;
    if (r < ea) {
      s = a.src(r);
      t = a.tgt(r);
    } else {
      s = na + b.src(r - ea);
      t = na + b.tgt(r - ea);
    }
    arrows.push_back(Arrow{name, node_name[nodes_uf.find(s)], node_name[nodes_uf.find(t)]});
  }
  Graph p(nodes, arrows);
  std::vector<std::size_t> an(na), aa(ea), bn(b.node_count()), ba(b.arrow_count());
  for (std::size_t k = 0; k < na; ++k) an[k] = p.node_index(node_name[nodes_uf.find(k)]);
  for (std::size_t k = 0; k < b.node_count(); ++k)
    bn[k] = p.node_index(node_name[nodes_uf.find(na + k)]);
  for (std::size_t k = 0; k < ea; ++k) aa[k] = p.arrow_index(arrow_name[arrows_uf.find(k)]);
  for (std::size_t k = 0; k < b.arrow_count(); ++k)
    ba[k] = p.arrow_index(arrow_name[arrows_uf.find(ea + k)]);
  return Pushout{p, GraphMorphism(a, p, std::move(an), std::move(aa)),
                 GraphMorphism(b, p, std::move(bn), std::move(ba))};
}

// Disjoint union with its two coprojections (pushout over the empty graph).
inline Pushout coproduct(const Graph& a, const Graph& b) {
  return pushout(initial_morphism(a), initial_morphism(b));
}

}  // namespace dcl
