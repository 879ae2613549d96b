// Canonical forms of (optionally colored) finite multigraphs.
//
// Color refinement on in/out neighbourhoods, then individualization of the
// first non-singleton cell, recursively. Every discrete partition gives an
// ordering of the nodes; the canonical one is the ordering whose sorted
// arrow list (src position, tgt position, arrow color) is lexicographically
// least. Branches that differ by a transposition of twin nodes are skipped.
//
// Canonical ids are "n<k>" for nodes and "e<k>" for arrows, zero-padded so
// that id order equals position order.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dcl/graph.hpp"

namespace dcl {

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultSizeGuard = 64;

// Node-count cap for canonicalization and enumeration; DCL_SIZE_GUARD overrides.
inline std::size_t default_size_guard() {
  static const std::size_t guard = [] {
    if (const char* env = std::getenv("DCL_SIZE_GUARD")) {
      char* end = nullptr;
      auto v = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultSizeGuard;
  }();
  return guard;
}

namespace detail {

inline std::vector<std::size_t> color_ranks(const std::vector<std::string>& colors) {
  std::vector<std::string> sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> out(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    out[i] = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), colors[i]) - sorted.begin());
  }
  return out;
}

class Canonizer {
 public:
  using ArrowKey = std::tuple<std::size_t, std::size_t, std::size_t>;

  Canonizer(const Graph& g, std::vector<std::size_t> node_color,
            std::vector<std::size_t> arrow_color)
      : g_(g), ncol_(std::move(node_color)), acol_(std::move(arrow_color)) {
    const std::size_t n = g.node_count();
    for (std::size_t a = 0; a < g.arrow_count(); ++a) {
      ++counts_[ArrowKey{g.src(a), g.tgt(a), acol_[a]}];
    }
    twin_.assign(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (ncol_[u] == ncol_[v] && swap_is_automorphism(u, v)) twin_[u][v] = twin_[v][u] = true;
      }
    }
  }

  // Position of every node in the canonical order.
  std::vector<std::size_t> run() {
    search(refine(ncol_));
    return best_pos_;
  }

 private:
  bool swap_is_automorphism(std::size_t u, std::size_t v) const {
    auto sw = [&](std::size_t x) { return x == u ? v : (x == v ? u : x); };
    auto check = [&](std::size_t a) {
      ArrowKey k{g_.src(a), g_.tgt(a), acol_[a]};
      ArrowKey s{sw(g_.src(a)), sw(g_.tgt(a)), acol_[a]};
      auto it = counts_.find(s);
      return it != counts_.end() && it->second == counts_.at(k);
    };
    for (auto x : {u, v}) {
      for (auto a : g_.out_arrows(x))
        if (!check(a)) return false;
      for (auto a : g_.in_arrows(x))
        if (!check(a)) return false;
    }
    return true;
  }

  std::vector<std::size_t> refine(std::vector<std::size_t> colors) const {
    const std::size_t n = g_.node_count();
    std::size_t classes = distinct(colors);
    while (true) {
      std::vector<std::vector<std::size_t>> sig(n);
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t>& s = sig[v];
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> nb;
        for (auto a : g_.out_arrows(v)) nb.emplace_back(0, acol_[a], colors[g_.tgt(a)]);
        for (auto a : g_.in_arrows(v)) nb.emplace_back(1, acol_[a], colors[g_.src(a)]);
        std::sort(nb.begin(), nb.end());
        s.push_back(colors[v]);
        for (const auto& [d, c, w] : nb) {
          s.push_back(d);
          s.push_back(c);
          s.push_back(w);
        }
      }
      std::vector<std::vector<std::size_t>> uniq = sig;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (std::size_t v = 0; v < n; ++v) {
        colors[v] = static_cast<std::size_t>(
            std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
      }
      if (uniq.size() == classes) return colors;
      classes = uniq.size();
    }
  }

  static std::size_t distinct(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  }

  void search(const std::vector<std::size_t>& colors) {
    const std::size_t n = g_.node_count();
    std::vector<std::size_t> size(n, 0);
    for (auto c : colors) ++size[c];
    std::optional<std::size_t> cell;
    for (std::size_t c = 0; c < n; ++c) {
      if (size[c] > 1) {
        cell = c;
        break;
      }
    }
    if (!cell) {
      leaf(colors);
      return;
    }
    std::vector<std::size_t> tried;
    for (std::size_t v = 0; v < n; ++v) {
      if (colors[v] != *cell) continue;
      bool twin_of_tried = std::any_of(tried.begin(), tried.end(),
                                       [&](std::size_t u) { return twin_[u][v]; });
      if (twin_of_tried) continue;
      tried.push_back(v);
      std::vector<std::size_t> next(colors);
      for (std::size_t x = 0; x < n; ++x) {
        if (colors[x] > *cell) {
          ++next[x];
        } else if (colors[x] == *cell && x != v) {
          next[x] = *cell + 1;
        }
      }
      search(refine(std::move(next)));
    }
  }

  void leaf(const std::vector<std::size_t>& pos) {
    std::vector<ArrowKey> enc;
    enc.reserve(g_.arrow_count());
    for (std::size_t a = 0; a < g_.arrow_count(); ++a) {
      enc.emplace_back(pos[g_.src(a)], pos[g_.tgt(a)], acol_[a]);
    }
    std::sort(enc.begin(), enc.end());
    if (best_pos_.empty() || enc < best_enc_) {
      best_enc_ = std::move(enc);
      best_pos_ = pos;
    }
  }

  const Graph& g_;
  std::vector<std::size_t> ncol_;
  std::vector<std::size_t> acol_;
  std::map<ArrowKey, std::size_t> counts_;
  std::vector<std::vector<bool>> twin_;
  std::vector<ArrowKey> best_enc_;
  std::vector<std::size_t> best_pos_;
};

inline std::string padded(char prefix, std::size_t k, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t m = count > 0 ? count - 1 : 0; m >= 10; m /= 10) ++width;
  std::string digits = std::to_string(k);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

}  // namespace detail

// Isomorphism from g onto its canonical relabeling (the codomain). Node and
// arrow colors must be respected by the isomorphisms being factored out.
inline GraphMorphism canonical_relabeling(const Graph& g,
                                          const std::vector<std::string>& node_colors,
                                          const std::vector<std::string>& arrow_colors,
                                          std::size_t size_guard = default_size_guard()) {
  if (g.node_count() > size_guard) {
    throw SizeGuardError("canonicalization refused: " + std::to_string(g.node_count()) +
                         " nodes exceeds the size guard of " + std::to_string(size_guard));
  }
  auto ncol = detail::color_ranks(node_colors);
  auto acol = detail::color_ranks(arrow_colors);
  std::vector<std::size_t> pos;
  if (g.node_count() > 0) pos = detail::Canonizer(g, ncol, acol).run();

  const std::size_t n = g.node_count(), m = g.arrow_count();
  std::vector<std::string> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k] = detail::padded('n', k, n);

  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
  std::vector<Key> order;  // (src pos, tgt pos, color, original index)
  for (std::size_t a = 0; a < m; ++a) order.emplace_back(pos[g.src(a)], pos[g.tgt(a)], acol[a], a);
  std::sort(order.begin(), order.end());
  std::vector<Arrow> arrows(m);
  std::vector<std::size_t> amap(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& [s, t, c, a] = order[k];
    arrows[k] = Arrow{detail::padded('e', k, m), nodes[s], nodes[t]};
    amap[a] = k;
  }
  Graph canon(nodes, arrows);
  return GraphMorphism(g, canon, pos, amap);
}

struct CanonicalForm {
  Graph graph;
  GraphMorphism relabeling;  // input -> graph, an isomorphism
};

inline CanonicalForm canonicalize(const Graph& g, std::size_t size_guard = default_size_guard()) {
  auto iso = canonical_relabeling(g, std::vector<std::string>(g.node_count()),
                                  std::vector<std::string>(g.arrow_count()), size_guard);
  Graph canon = iso.cod();
  return CanonicalForm{std::move(canon), std::move(iso)};
}

}  // namespace dcl
