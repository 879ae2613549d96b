// Exhaustive enumeration of small typed instances over a schema.
//
// Every schema node gets a fiber of 0..size_bound elements, every schema
// arrow a multiset of 0..max_links (default size_bound) links between the
// matching fibers.
// The raw stream contains isomorphic duplicates; the canonical variant
// keeps one representative per isomorphism class.

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dcl/canonical.hpp"
#include "dcl/serialize.hpp"
#include "dcl/slice.hpp"

namespace dcl {

inline constexpr double kDefaultEnumerationCap = 5e6;

struct EnumerationOptions {
  std::size_t size_bound = 2;
  std::optional<std::size_t> max_parallel;  // carrier arrows per ordered element pair
  std::optional<std::size_t> max_links;     // links per schema arrow; default size_bound
  double max_candidates = kDefaultEnumerationCap;
};

namespace detail {

inline double multisets_up_to(double kinds, std::size_t k) {
  // sum_{j=0..k} C(kinds + j - 1, j)
  double total = 0, term = 1;
  for (std::size_t j = 0; j <= k; ++j) {
    if (j > 0) term = term * (kinds + j - 1) / j;
    total += term;
  }
  return total;
}

class InstanceEnumerator {
 public:
  InstanceEnumerator(const Graph& schema, const EnumerationOptions& opt,
                     std::function<bool(const TypedInstance&)> visit)
      : s_(schema), opt_(opt), visit_(std::move(visit)) {}

  void run() {
    fiber_.assign(s_.node_count(), 0);
    links_.assign(s_.arrow_count(), {});
    go_nodes(0);
  }

 private:
  bool go_nodes(std::size_t i) {
    if (i == s_.node_count()) {
      offset_.assign(s_.node_count(), 0);
      for (std::size_t n = 1; n < s_.node_count(); ++n) offset_[n] = offset_[n - 1] + fiber_[n - 1];
      parallel_.clear();
      return go_arrows(0, 0);
    }
    for (std::size_t k = 0; k <= opt_.size_bound; ++k) {
      fiber_[i] = k;
      if (!go_nodes(i + 1)) return false;
    }
    return true;
  }

  // Links of arrow a as non-decreasing pair codes, starting at `from`.
  bool go_arrows(std::size_t a, std::size_t from) {
    if (a == s_.arrow_count()) return emit();
    std::size_t pairs = fiber_[s_.src(a)] * fiber_[s_.tgt(a)];
    if (!go_arrows(a + 1, 0)) return false;
    if (links_[a].size() == opt_.max_links.value_or(opt_.size_bound)) return true;
    std::size_t width = fiber_[s_.tgt(a)];
    for (std::size_t p = from; p < pairs; ++p) {
      std::size_t& count = parallel_[{offset_[s_.src(a)] + p / width, offset_[s_.tgt(a)] + p % width}];
      if (opt_.max_parallel && count == *opt_.max_parallel) continue;
      ++count;
      links_[a].push_back(p);
      bool go_on = go_arrows(a, p);
      links_[a].pop_back();
      --count;
      if (!go_on) return false;
    }
    return true;
  }

  bool emit() {
    std::vector<std::string> nodes;
    std::map<std::string, std::string> nt, at;
    auto elem = [&](std::size_t n, std::size_t k) { return s_.node(n) + "." + std::to_string(k); };
    for (std::size_t n = 0; n < s_.node_count(); ++n) {
      for (std::size_t k = 0; k < fiber_[n]; ++k) {
        nodes.push_back(elem(n, k));
        nt[nodes.back()] = s_.node(n);
      }
    }
    std::vector<Arrow> arrows;
    for (std::size_t a = 0; a < s_.arrow_count(); ++a) {
      std::size_t width = fiber_[s_.tgt(a)];
      for (std::size_t j = 0; j < links_[a].size(); ++j) {
        std::size_t p = links_[a][j];
        Arrow l{s_.arrow(a).id + "." + std::to_string(j), elem(s_.src(a), p / width),
                elem(s_.tgt(a), p % width)};
        at[l.id] = s_.arrow(a).id;
        arrows.push_back(std::move(l));
      }
    }
    Graph x(std::move(nodes), std::move(arrows));
    return visit_(TypedInstance(GraphMorphism::from_ids(x, s_, nt, at)));
  }

  const Graph& s_;
  const EnumerationOptions& opt_;
  std::function<bool(const TypedInstance&)> visit_;
  std::vector<std::size_t> fiber_;
  std::vector<std::vector<std::size_t>> links_;
  std::vector<std::size_t> offset_;  // first global element index of each fiber
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> parallel_;
};

}  // namespace detail

// Upper estimate of the raw stream length.
inline double estimate_instances(const Graph& schema, const EnumerationOptions& opt) {
  // Fibers all at the bound maximize the per-arrow multiset counts.
  const std::size_t bound = opt.size_bound;
  const double kinds = static_cast<double>(bound * bound);
  double fibers = std::pow(static_cast<double>(bound + 1), static_cast<double>(schema.node_count()));
  double per_arrow = detail::multisets_up_to(kinds, opt.max_links.value_or(bound));
  if (opt.max_parallel) per_arrow = std::min(per_arrow, std::pow(static_cast<double>(*opt.max_parallel + 1), kinds));
  return fibers * std::pow(per_arrow, static_cast<double>(schema.arrow_count()));
}

// Calls visit on every raw instance until it returns false.
inline void enumerate_instances(const Graph& schema, const EnumerationOptions& opt,
                                std::function<bool(const TypedInstance&)> visit) {
  const double estimate = estimate_instances(schema, opt);
  if (estimate > opt.max_candidates) {
    throw SizeGuardError("enumeration refused: about " + std::to_string(static_cast<long long>(estimate)) +
                         " candidate instances at bound " + std::to_string(opt.size_bound));
  }
  detail::InstanceEnumerator(schema, opt, std::move(visit)).run();
}

// One canonical representative per isomorphism class, in first-seen order.
inline std::vector<TypedInstance> enumerate_canonical_instances(const Graph& schema,
                                                                const EnumerationOptions& opt) {
  std::vector<TypedInstance> out;
  std::set<std::string> seen;
  enumerate_instances(schema, opt, [&](const TypedInstance& t) {
    TypedInstance c = canonicalize(t).instance;
    if (seen.insert(canonical_bytes(c)).second) out.push_back(std::move(c));
    return true;
  });
  return out;
}

}  // namespace dcl
