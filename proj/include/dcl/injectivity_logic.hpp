// Injectivity logic: theories of formula morphisms, checkable derivations
// built with Axiom, Identity, Composition, Cancellation and Pushout, the
// coproduct script, a semantic entailment oracle over finite models, and a
// bounded breadth-first derivation search.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dcl/canonical.hpp"
#include "dcl/enumerate.hpp"
#include "dcl/limits.hpp"
#include "dcl/serialize.hpp"
#include "dcl/signature.hpp"
#include "dcl/slice.hpp"

namespace dcl {

class InferenceError : public Error {
 public:
  using Error::Error;
};

// A set of named formulas living in one ambient: the slice over `ambient`
// (plain graphs are the slice over the terminal graph).
class InjTheory {
 public:
  explicit InjTheory(Graph ambient, bool plain = false) : ambient_(std::move(ambient)), plain_(plain) {}

  static InjTheory plain_graphs() { return InjTheory(terminal_graph(), true); }

  const Graph& ambient() const noexcept { return ambient_; }
  bool plain() const noexcept { return plain_; }
  const std::map<std::string, SliceMorphism>& formulas() const noexcept { return formulas_; }

  void add(const std::string& name, const SliceMorphism& f) {
    if (!(f.to().schema() == ambient_)) {
      throw InferenceError("formula '" + name + "' does not live over the ambient " + describe(ambient_));
    }
    if (!formulas_.emplace(name, f).second) throw InferenceError("duplicate formula '" + name + "'");
  }

  // A plain graph morphism as a formula over the terminal graph.
  SliceMorphism lift(const GraphMorphism& f) const {
    if (!plain_) throw InferenceError("plain morphisms need the plain-graph ambient");
    return SliceMorphism(TypedInstance(terminal_morphism(f.dom())),
                         TypedInstance(terminal_morphism(f.cod())), f);
  }

  const SliceMorphism& formula(const std::string& name) const {
    auto it = formulas_.find(name);
    if (it == formulas_.end()) throw InferenceError("unknown formula '" + name + "'");
    return it->second;
  }

 private:
  Graph ambient_;
  bool plain_ = false;
  std::map<std::string, SliceMorphism> formulas_;
};

// Typed coproduct with its two injections.
struct InstanceCoproduct {
  TypedInstance sum;
  SliceMorphism first, second;
};

inline InstanceCoproduct coproduct(const TypedInstance& a, const TypedInstance& b) {
  if (!(a.schema() == b.schema())) throw MismatchError("coproduct of instances over different schemas");
  Pushout p = coproduct(a.carrier(), b.carrier());
  TypedInstance sum(p.mediate(a.typing(), b.typing()));
  return {sum, SliceMorphism(a, sum, p.from_first), SliceMorphism(b, sum, p.from_second)};
}

// Pushout of a span f, g of slice morphisms with a shared domain.
struct SlicePushout {
  TypedInstance apex;
  SliceMorphism from_first;   // cod f -> apex
  SliceMorphism from_second;  // cod g -> apex
};

inline SlicePushout pushout(const SliceMorphism& f, const SliceMorphism& g) {
  if (!(f.from() == g.from())) throw MismatchError("pushout of slice morphisms with different domains");
  Pushout p = pushout(f.map(), g.map());
  TypedInstance apex(p.mediate(f.to().typing(), g.to().typing()));
  return {apex, SliceMorphism(f.to(), apex, p.from_first), SliceMorphism(g.to(), apex, p.from_second)};
}

// Canonical key of a formula up to isomorphism of its domain and codomain
// (in the slice): the morphism is encoded as a coloured graph whose nodes
// are all elements of both sides.
inline std::string formula_key(const SliceMorphism& f, std::size_t size_guard = default_size_guard()) {
  const Graph& p = f.from().carrier();
  const Graph& q = f.to().carrier();
  const Graph& s = f.to().schema();
  std::vector<std::string> nodes, ncol;
  std::vector<Arrow> arrows;
  std::vector<std::string> acol;
  auto add = [&](const std::string& id, const std::string& col) {
    nodes.push_back(id);
    ncol.push_back(col);
  };
  for (std::size_t i = 0; i < p.node_count(); ++i) add("pn" + std::to_string(i), "P|" + s.node(f.from().typing().node_image(i)));
  for (std::size_t i = 0; i < q.node_count(); ++i) add("qn" + std::to_string(i), "Q|" + s.node(f.to().typing().node_image(i)));
  for (std::size_t i = 0; i < p.arrow_count(); ++i) add("pa" + std::to_string(i), "PA|" + s.arrow(f.from().typing().arrow_image(i)).id);
  for (std::size_t i = 0; i < q.arrow_count(); ++i) add("qa" + std::to_string(i), "QA|" + s.arrow(f.to().typing().arrow_image(i)).id);
  std::size_t k = 0;
  auto link = [&](const std::string& a, const std::string& b, const std::string& col) {
    arrows.push_back(Arrow{"k" + std::to_string(k++), a, b});
    acol.push_back(col);
  };
  for (std::size_t i = 0; i < p.arrow_count(); ++i) {
    link("pa" + std::to_string(i), "pn" + std::to_string(p.src(i)), "s");
    link("pa" + std::to_string(i), "pn" + std::to_string(p.tgt(i)), "t");
    link("pa" + std::to_string(i), "qa" + std::to_string(f.map().arrow_image(i)), "m");
  }
  for (std::size_t i = 0; i < q.arrow_count(); ++i) {
    link("qa" + std::to_string(i), "qn" + std::to_string(q.src(i)), "s");
    link("qa" + std::to_string(i), "qn" + std::to_string(q.tgt(i)), "t");
  }
  for (std::size_t i = 0; i < p.node_count(); ++i)
    link("pn" + std::to_string(i), "qn" + std::to_string(f.map().node_image(i)), "m");
  Graph g(nodes, arrows);
  // Graph orders elements by id; align the colors with its indices.
  std::vector<std::string> gn(g.node_count()), ga(g.arrow_count());
  for (std::size_t i = 0; i < nodes.size(); ++i) gn[g.node_index(nodes[i])] = ncol[i];
  for (std::size_t i = 0; i < arrows.size(); ++i) ga[g.arrow_index(arrows[i].id)] = acol[i];
  ncol = std::move(gn);
  acol = std::move(ga);
  GraphMorphism iso = canonical_relabeling(g, ncol, acol, size_guard);
  std::vector<std::string> cn(g.node_count()), ca(g.arrow_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) cn[iso.node_image(i)] = ncol[i];
  for (std::size_t i = 0; i < g.arrow_count(); ++i) ca[iso.arrow_image(i)] = acol[i];
  return to_json(iso.cod()).dump() + json(cn).dump() + json(ca).dump();
}

inline bool equivalent_formulas(const SliceMorphism& a, const SliceMorphism& b) {
  return a.to().schema() == b.to().schema() && formula_key(a) == formula_key(b);
}

// ---------------------------------------------------------------------------
// Derivations.

enum class Rule { axiom, identity, composition, cancellation, pushout };

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::axiom: return "Axiom";
    case Rule::identity: return "Identity";
    case Rule::composition: return "Composition";
    case Rule::cancellation: return "Cancellation";
    case Rule::pushout: return "Pushout";
  }
  return "?";
}

inline Rule rule_from_string(const std::string& s) {
  for (Rule r : {Rule::axiom, Rule::identity, Rule::composition, Rule::cancellation, Rule::pushout})
    if (to_string(r) == s) return r;
  throw InferenceError("unknown rule '" + s + "'");
}

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  Rule rule = Rule::axiom;
  SliceMorphism conclusion;
  std::vector<DerivationPtr> premises;
  std::string axiom;                  // Axiom: formula name
  std::optional<SliceMorphism> side;  // Pushout: map pushed along; Cancellation: second factor
  std::string macro;                  // "COPRODUCT" on the root of the coproduct script

  std::size_t height() const {
    std::size_t h = 0;
    for (const auto& p : premises) h = std::max(h, p->height() + 1);
    return h;
  }
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p->size();
    return n;
  }
  // Rule names in post-order, premises first.
  std::vector<std::string> script() const {
    std::vector<std::string> out;
    for (const auto& p : premises) {
      if (p->rule == Rule::axiom) continue;
      auto s = p->script();
      out.insert(out.end(), s.begin(), s.end());
    }
    if (rule != Rule::axiom) out.push_back(to_string(rule));
    return out;
  }
};

inline DerivationPtr axiom_rule(const InjTheory& th, const std::string& name) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::axiom;
  d->conclusion = th.formula(name);
  d->axiom = name;
  return d;
}

inline DerivationPtr identity_rule(const TypedInstance& a) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::identity;
  d->conclusion = identity(a);
  return d;
}

inline DerivationPtr composition_rule(const DerivationPtr& f1, const DerivationPtr& f2) {
  if (!(f1->conclusion.to() == f2->conclusion.from())) {
    throw InferenceError("Composition: codomain of the first formula is not the domain of the second");
  }
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::composition;
  d->conclusion = compose(f1->conclusion, f2->conclusion);
  d->premises = {f1, f2};
  return d;
}

// From a derived h and a factorization h = f1;f2, conclude f1.
inline DerivationPtr cancellation_rule(const DerivationPtr& h, const SliceMorphism& f1,
                                       const SliceMorphism& f2) {
  if (!(f1.to() == f2.from()) || !(compose(f1, f2) == h->conclusion)) {
    throw InferenceError("Cancellation: the recorded factors do not compose to the premise");
  }
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::cancellation;
  d->conclusion = f1;
  d->premises = {h};
  d->side = f2;
  return d;
}

// From a derived f: P -> Q and any g: P -> R, conclude R -> Q +_P R.
inline DerivationPtr pushout_rule(const DerivationPtr& f, const SliceMorphism& g) {
  if (!(f->conclusion.from() == g.from())) {
    throw InferenceError("Pushout: the map pushed along does not share the formula's domain");
  }
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::pushout;
  d->conclusion = pushout(f->conclusion, g).from_second;
  d->premises = {f};
  d->side = g;
  return d;
}

// Rechecks every node of the tree; returns the violated conditions.
inline std::vector<std::string> verify_derivation(const Derivation& d, const InjTheory& th) {
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(to_string(d.rule) + ": " + what);
  };
  if (!(d.conclusion.to().schema() == th.ambient())) bad.push_back("conclusion outside the ambient");
  auto arity = [&](std::size_t n, bool side) {
    expect(d.premises.size() == n, "expects " + std::to_string(n) + " premises");
    expect(d.side.has_value() == side, side ? "missing side data" : "unexpected side data");
    return d.premises.size() == n && d.side.has_value() == side;
  };
  try {
    switch (d.rule) {
      case Rule::axiom:
        if (arity(0, false)) {
          auto it = th.formulas().find(d.axiom);
          expect(it != th.formulas().end(), "'" + d.axiom + "' is not in the theory");
          if (it != th.formulas().end()) expect(it->second == d.conclusion, "conclusion differs from the axiom");
        }
        break;
      case Rule::identity:
        if (arity(0, false)) expect(d.conclusion == identity(d.conclusion.from()), "conclusion is not an identity");
        break;
      case Rule::composition:
        if (arity(2, false)) {
          const auto& a = d.premises[0]->conclusion;
          const auto& b = d.premises[1]->conclusion;
          expect(a.to() == b.from(), "premises do not compose");
          if (a.to() == b.from()) expect(compose(a, b) == d.conclusion, "conclusion is not the composite");
        }
        break;
      case Rule::cancellation:
        if (arity(1, true)) {
          expect(d.conclusion.to() == d.side->from(), "factors do not compose");
          if (d.conclusion.to() == d.side->from())
            expect(compose(d.conclusion, *d.side) == d.premises[0]->conclusion,
                   "factorization does not compose to the premise");
        }
        break;
      case Rule::pushout:
        if (arity(1, true)) {
          const auto& f = d.premises[0]->conclusion;
          expect(f.from() == d.side->from(), "span legs have different domains");
          if (f.from() == d.side->from()) {
            SlicePushout p = pushout(f, *d.side);
            expect(p.from_second == d.conclusion, "conclusion is not the pushout leg");
            expect(compose(f, p.from_first) == compose(*d.side, p.from_second), "square does not commute");
          }
        }
        break;
    }
  } catch (const Error& e) {
    bad.push_back(to_string(d.rule) + ": " + e.what());
  }
  if (d.macro == "COPRODUCT") {
    bool shape = d.rule == Rule::composition && d.premises.size() == 2 &&
                 d.premises[0]->rule == Rule::pushout && d.premises[1]->rule == Rule::pushout;
    expect(shape, "COPRODUCT macro must be Composition over two Pushouts");
  } else if (!d.macro.empty()) {
    bad.push_back("unknown macro '" + d.macro + "'");
  }
  for (const auto& p : d.premises) {
    auto sub = verify_derivation(*p, th);
    bad.insert(bad.end(), sub.begin(), sub.end());
  }
  return bad;
}

// f1 + f2 by the script: push f1 along the first injection, push f2 along
// the second injection followed by that leg, compose.
inline DerivationPtr coproduct_macro(const DerivationPtr& f1, const DerivationPtr& f2) {
  const SliceMorphism& a = f1->conclusion;
  const SliceMorphism& b = f2->conclusion;
  InstanceCoproduct sum = coproduct(a.from(), b.from());
  DerivationPtr first = pushout_rule(f1, sum.first);
  DerivationPtr second = pushout_rule(f2, compose(sum.second, first->conclusion));
  auto root = std::make_shared<Derivation>(*composition_rule(first, second));
  root->macro = "COPRODUCT";
  return root;
}

// The coproduct morphism f1 + f2 computed directly.
inline SliceMorphism coproduct_formula(const SliceMorphism& f1, const SliceMorphism& f2) {
  InstanceCoproduct dom = coproduct(f1.from(), f2.from());
  InstanceCoproduct cod = coproduct(f1.to(), f2.to());
  Pushout p = coproduct(f1.from().carrier(), f2.from().carrier());
  GraphMorphism m = p.mediate(compose(f1.map(), cod.first.map()), compose(f2.map(), cod.second.map()));
  return SliceMorphism(dom.sum, cod.sum, m);
}

// ---------------------------------------------------------------------------
// Semantic entailment over finite models.

struct SemanticOptions {
  std::size_t size_bound = 2;
  std::optional<std::size_t> max_parallel;
  std::size_t limit = kDefaultHomLimit;
};

struct SemanticResult {
  Status status = Status::valid;  // valid: entailed within the bound
  std::size_t instances = 0;      // canonical instances enumerated
  std::size_t models = 0;         // of those, injective for every theory formula
  std::optional<TypedInstance> countermodel;
  std::string reason;
};

// Canonical models of the theory within the bound; `uncertain` collects the
// instances where some theory check was Unknown.
struct ModelSet {
  std::vector<TypedInstance> models;
  std::vector<TypedInstance> uncertain;
  std::size_t instances = 0;
};

inline ModelSet theory_models(const InjTheory& th, const SemanticOptions& opt) {
  EnumerationOptions eo;
  eo.size_bound = opt.size_bound;
  eo.max_parallel = opt.max_parallel;
  ModelSet out;
  for (auto& t : enumerate_canonical_instances(th.ambient(), eo)) {
    ++out.instances;
    Status s = Status::valid;
    for (const auto& [name, f] : th.formulas()) {
      s = conjoin(s, check_injectivity(t, f, opt.limit).status);
      if (s == Status::invalid) break;
    }
    if (s == Status::valid) out.models.push_back(std::move(t));
    else if (s == Status::unknown) out.uncertain.push_back(std::move(t));
  }
  return out;
}

inline SemanticResult entails_on(const ModelSet& ms, const SliceMorphism& f, std::size_t limit) {
  SemanticResult r;
  r.instances = ms.instances;
  r.models = ms.models.size();
  for (const auto& m : ms.models) {
    Status s = check_injectivity(m, f, limit).status;
    if (s == Status::invalid) {
      r.status = Status::invalid;
      r.countermodel = m;
      r.reason = "a model of the theory is not injective for the formula";
      return r;
    }
    if (s == Status::unknown) r.status = Status::unknown;
  }
  for (const auto& m : ms.uncertain) {
    if (check_injectivity(m, f, limit).status != Status::valid) {
      r.status = Status::unknown;
      r.reason = "search limit reached on a candidate model";
    }
  }
  return r;
}

inline SemanticResult semantic_entails(const InjTheory& th, const SliceMorphism& f,
                                       const SemanticOptions& opt = {}) {
  if (!(f.to().schema() == th.ambient())) throw MismatchError("formula outside the theory's ambient");
  return entails_on(theory_models(th, opt), f, opt.limit);
}

// ---------------------------------------------------------------------------
// Bounded derivation search.

struct SearchOptions {
  std::size_t depth = 3;
  std::size_t size_bound = 3;      // per sort, for every materialized object; raised to fit the goal
  std::size_t max_formulas = 2000;
  std::size_t max_homs = 32;       // per (formula, object) pair
};

struct SearchResult {
  Status status = Status::unknown;  // valid: goal derived; never invalid
  DerivationPtr proof;
  std::vector<DerivationPtr> derived;  // all distinct formulas, in derivation order
  std::size_t rounds = 0;
  bool truncated = false;
  std::string reason;
};

// Largest fiber of the typing, over nodes and arrows.
inline std::size_t max_fiber(const TypedInstance& t) {
  std::vector<std::size_t> n(t.schema().node_count()), a(t.schema().arrow_count());
  std::size_t most = 0;
  for (std::size_t i = 0; i < t.carrier().node_count(); ++i)
    most = std::max(most, ++n[t.typing().node_image(i)]);
  for (std::size_t i = 0; i < t.carrier().arrow_count(); ++i)
    most = std::max(most, ++a[t.typing().arrow_image(i)]);
  return most;
}

inline bool within_bound(const TypedInstance& t, std::size_t bound) { return max_fiber(t) <= bound; }

namespace detail {

class DerivationSearch {
 public:
  DerivationSearch(const InjTheory& th, const SearchOptions& opt, const SliceMorphism* goal)
      : th_(th), opt_(opt), goal_(goal) {
    if (goal_) {
      goal_key_ = formula_key(*goal_);
      // The bound always admits the goal's own objects.
      opt_.size_bound = std::max({opt_.size_bound, max_fiber(goal_->from()), max_fiber(goal_->to())});
    }
  }

  SearchResult run() {
    if (goal_) {
      materialize(goal_->from());
      materialize(goal_->to());
    }
    for (const auto& [name, f] : th_.formulas()) {
      if (offer(axiom_rule(th_, name))) return finish();
    }
    for (std::size_t round = 1; round <= opt_.depth; ++round) {
      result_.rounds = round;
      if (step(round)) return finish();
    }
    result_.reason = result_.truncated ? "search caps reached before the goal was derived"
                                       : "goal not derived within the depth bound";
    return finish();
  }

 private:
  bool step(std::size_t round) {
    const std::vector<DerivationPtr> known = result_.derived;
    const std::vector<TypedInstance> objects = objects_;
    if (round == 1) {
      for (const auto& o : objects)
        if (offer(identity_rule(o))) return true;
    }
    // Composition of exactly matching ends.
    for (const auto& a : known)
      for (const auto& b : known)
        if (a->conclusion.to() == b->conclusion.from() && offer(composition_rule(a, b))) return true;
    // Pushout along every map into a materialized object.
    for (const auto& f : known) {
      for (const auto& r : objects) {
        for (const auto& g : typed_homs(f->conclusion.from(), r)) {
          SlicePushout p = pushout(f->conclusion, g);
          if (!within_bound(p.apex, opt_.size_bound)) continue;
          if (offer(pushout_rule(f, g))) return true;
        }
      }
    }
    // Cancellation through materialized objects.
    for (const auto& h : known) {
      const SliceMorphism& hm = h->conclusion;
      for (const auto& m : objects) {
        for (const auto& f1 : typed_homs(hm.from(), m)) {
          for (const auto& f2 : typed_homs(m, hm.to())) {
            if (compose(f1, f2) == hm && offer(cancellation_rule(h, f1, f2))) return true;
          }
        }
      }
    }
    return false;
  }

  std::vector<SliceMorphism> typed_homs(const TypedInstance& a, const TypedInstance& b) {
    auto e = enumerate_homomorphisms(a.carrier(), b.carrier(), typed_constraints(a, b), opt_.max_homs);
    if (e.truncated) result_.truncated = true;
    std::vector<SliceMorphism> out;
    for (auto& m : e.morphisms) out.emplace_back(a, b, std::move(m));
    return out;
  }

  void materialize(const TypedInstance& t) {
    if (!within_bound(t, opt_.size_bound)) return;
    if (seen_objects_.insert(canonical_bytes(t)).second) objects_.push_back(t);
  }

  // Adds a new formula; true when it is the goal.
  bool offer(const DerivationPtr& d) {
    std::string key;
    try {
      key = formula_key(d->conclusion);
    } catch (const SizeGuardError&) {
      result_.truncated = true;
      return false;
    }
    if (!keys_.insert(key).second) return false;
    if (result_.derived.size() >= opt_.max_formulas) {
      result_.truncated = true;
      keys_.erase(key);
      return false;
    }
    result_.derived.push_back(d);
    materialize(d->conclusion.from());
    materialize(d->conclusion.to());
    if (goal_ && key == goal_key_) {
      result_.proof = d;
      return true;
    }
    return false;
  }

  SearchResult finish() {
    if (result_.proof) {
      result_.status = Status::valid;
      result_.reason.clear();
    }
    return std::move(result_);
  }

  const InjTheory& th_;
  SearchOptions opt_;
  const SliceMorphism* goal_;
  std::string goal_key_;
  SearchResult result_;
  std::set<std::string> keys_;
  std::vector<TypedInstance> objects_;
  std::set<std::string> seen_objects_;
};

}  // namespace detail

// Derivable (with a proof of a formula isomorphic to the goal) or Unknown.
inline SearchResult bounded_entailment(const InjTheory& th, const SliceMorphism& goal,
                                       const SearchOptions& opt = {}) {
  if (!(goal.to().schema() == th.ambient())) throw MismatchError("goal outside the theory's ambient");
  return detail::DerivationSearch(th, opt, &goal).run();
}

// Every formula derivable within the bounds, without a goal.
inline SearchResult derivable_formulas(const InjTheory& th, const SearchOptions& opt = {}) {
  return detail::DerivationSearch(th, opt, nullptr).run();
}

}  // namespace dcl
