// Backtracking search for graph homomorphisms.
//
// Nodes are assigned in domain index order (which is sorted id order), each
// over its candidates in ascending codomain order; arrows are assigned after
// all nodes. Results therefore come out in lexicographic order of
// (node map, arrow map). Incidence is forward-checked as soon as both ends
// of a domain arrow are placed.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "dcl/graph.hpp"

namespace dcl {

inline constexpr std::size_t kDefaultHomLimit = 100000;

// Per-element candidate restrictions. An empty optional means "anything".
struct HomConstraints {
  std::vector<std::optional<std::vector<std::size_t>>> node_candidates;
  std::vector<std::optional<std::vector<std::size_t>>> arrow_candidates;
  bool injective = false;

  static HomConstraints none(const Graph& dom) {
    HomConstraints c;
    c.node_candidates.resize(dom.node_count());
    c.arrow_candidates.resize(dom.arrow_count());
    return c;
  }
};

namespace detail {

template <class Visitor>
class HomSearcher {
 public:
  HomSearcher(const Graph& g, const Graph& h, const HomConstraints& c, Visitor& visit)
      : g_(g), h_(h), c_(c), visit_(visit) {
    node_map_.assign(g.node_count(), kUnset);
    arrow_map_.assign(g.arrow_count(), kUnset);
    used_nodes_.assign(h.node_count(), false);
    used_arrows_.assign(h.arrow_count(), false);
    closing_.resize(g.node_count());
    for (std::size_t a = 0; a < g.arrow_count(); ++a) {
      closing_[std::max(g.src(a), g.tgt(a))].push_back(a);
    }
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      std::vector<std::size_t> cands;
      if (i < c.node_candidates.size() && c.node_candidates[i]) {
        cands = *c.node_candidates[i];
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      } else {
        cands.resize(h.node_count());
        for (std::size_t j = 0; j < cands.size(); ++j) cands[j] = j;
      }
      node_cands_.push_back(std::move(cands));
    }
    arrow_allowed_.resize(g.arrow_count());
    for (std::size_t a = 0; a < g.arrow_count(); ++a) {
      if (a < c.arrow_candidates.size() && c.arrow_candidates[a]) {
        std::vector<bool> allowed(h.arrow_count(), false);
        for (auto b : *c.arrow_candidates[a]) {
          if (b < allowed.size()) allowed[b] = true;
        }
        arrow_allowed_[a] = std::move(allowed);
      }
    }
  }

  void run() {
    if (c_.injective &&
        (g_.node_count() > h_.node_count() || g_.arrow_count() > h_.arrow_count())) {
      return;
    }
    place_node(0);
  }

 private:
  static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

  bool arrow_ok(std::size_t a, std::size_t b) const {
    if (arrow_allowed_[a] && !(*arrow_allowed_[a])[b]) return false;
    if (c_.injective && used_arrows_[b]) return false;
    return true;
  }

  bool has_arrow_candidate(std::size_t a) const {
    for (auto b : h_.arrows_between(node_map_[g_.src(a)], node_map_[g_.tgt(a)])) {
      if (arrow_allowed_[a] && !(*arrow_allowed_[a])[b]) continue;
      return true;
    }
    return false;
  }

  // Returns false once the visitor asks to stop.
  bool place_node(std::size_t i) {
    if (i == g_.node_count()) return place_arrow(0);
    for (auto v : node_cands_[i]) {
      if (c_.injective && used_nodes_[v]) continue;
      node_map_[i] = v;
      bool ok = true;
      for (auto a : closing_[i]) {
        if (!has_arrow_candidate(a)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (c_.injective) used_nodes_[v] = true;
      bool go_on = place_node(i + 1);
      if (c_.injective) used_nodes_[v] = false;
      if (!go_on) return false;
    }
    node_map_[i] = kUnset;
    return true;
  }

  bool place_arrow(std::size_t a) {
    if (a == g_.arrow_count()) {
      return visit_(static_cast<const std::vector<std::size_t>&>(node_map_),
                    static_cast<const std::vector<std::size_t>&>(arrow_map_));
    }
    for (auto b : h_.arrows_between(node_map_[g_.src(a)], node_map_[g_.tgt(a)])) {
      if (!arrow_ok(a, b)) continue;
      arrow_map_[a] = b;
      if (c_.injective) used_arrows_[b] = true;
      bool go_on = place_arrow(a + 1);
      if (c_.injective) used_arrows_[b] = false;
      if (!go_on) return false;
    }
    return true;
  }

  const Graph& g_;
  const Graph& h_;
  const HomConstraints& c_;
  Visitor& visit_;
  std::vector<std::size_t> node_map_;
  std::vector<std::size_t> arrow_map_;
  std::vector<bool> used_nodes_;
  std::vector<bool> used_arrows_;
  std::vector<std::vector<std::size_t>> closing_;
  std::vector<std::vector<std::size_t>> node_cands_;
  std::vector<std::optional<std::vector<bool>>> arrow_allowed_;
};

}  // namespace detail

// Calls visit(node_map, arrow_map) for every homomorphism g -> h satisfying
// the constraints, in lexicographic order, until visit returns false.
template <class Visitor>
void search_homomorphisms(const Graph& g, const Graph& h, const HomConstraints& c,
                          Visitor&& visit) {
  detail::HomSearcher<std::remove_reference_t<Visitor>> s(g, h, c, visit);
  s.run();
}

struct HomEnumeration {
  std::vector<GraphMorphism> morphisms;
  bool truncated = false;
};

inline HomEnumeration enumerate_homomorphisms(const Graph& g, const Graph& h,
                                              const HomConstraints& c,
                                              std::size_t limit = kDefaultHomLimit) {
  HomEnumeration out;
  search_homomorphisms(g, h, c, [&](const auto& nm, const auto& am) {
    if (out.morphisms.size() == limit) {
      out.truncated = true;
      return false;
    }
    out.morphisms.emplace_back(g, h, nm, am);
    return true;
  });
  return out;
}

inline HomEnumeration enumerate_homomorphisms(const Graph& g, const Graph& h,
                                              std::size_t limit = kDefaultHomLimit) {
  return enumerate_homomorphisms(g, h, HomConstraints::none(g), limit);
}

inline std::optional<GraphMorphism> first_homomorphism(const Graph& g, const Graph& h,
                                                       const HomConstraints& c) {
  std::optional<GraphMorphism> found;
  search_homomorphisms(g, h, c, [&](const auto& nm, const auto& am) {
    found.emplace(g, h, nm, am);
    return false;
  });
  return found;
}

// Counts homomorphisms up to `limit`; returns limit + 1 if there are more.
inline std::size_t count_homomorphisms(const Graph& g, const Graph& h, const HomConstraints& c,
                                       std::size_t limit = kDefaultHomLimit) {
  std::size_t n = 0;
  search_homomorphisms(g, h, c, [&](const auto&, const auto&) { return ++n <= limit; });
  return n;
}

// Lexicographically least isomorphism satisfying the constraints, if any.
inline std::optional<GraphMorphism> find_isomorphism(const Graph& g, const Graph& h,
                                                     HomConstraints c) {
  if (g.node_count() != h.node_count() || g.arrow_count() != h.arrow_count()) {
    return std::nullopt;
  }
  c.injective = true;
  return first_homomorphism(g, h, c);
}

inline std::optional<GraphMorphism> find_isomorphism(const Graph& g, const Graph& h) {
  return find_isomorphism(g, h, HomConstraints::none(g));
}

}  // namespace dcl
