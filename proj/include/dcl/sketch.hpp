// Generalized sketches: a carrier graph with identity-carrying constraint
// declarations, dependency closure, declaration translation, sketch
// morphisms and default-multiplicity elaboration.

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/signature.hpp"

namespace dcl {

class SketchError : public Error {
 public:
  using Error::Error;
};

struct ConstraintDeclaration {
  std::string id;
  std::string label;
  GraphMorphism binding;  // arity(label) -> carrier
};

// A declaration/dependency pair whose closure condition is not met.
struct MissingClosure {
  std::string declaration;
  std::string dependency;
};

// Which declaration realizes the dependency lift of (declaration, dependency).
struct DependencyLift {
  std::string declaration;
  std::string dependency;
  std::string lifted;
};

class Sketch {
 public:
  Sketch(Graph carrier, std::shared_ptr<const Signature> signature,
         std::vector<ConstraintDeclaration> declarations, bool closed = false)
      : carrier_(std::move(carrier)), sig_(std::move(signature)), decls_(std::move(declarations)) {
    if (!sig_) throw SketchError("sketch without a signature");
    std::sort(decls_.begin(), decls_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      const auto& d = decls_[i];
      if (i > 0 && decls_[i - 1].id == d.id) throw SketchError("duplicate declaration id '" + d.id + "'");
      if (!sig_->has_symbol(d.label)) {
        throw SketchError("declaration '" + d.id + "' uses unknown symbol '" + d.label + "'");
      }
      if (!(d.binding.dom() == sig_->symbol(d.label).arity)) {
        throw SketchError("declaration '" + d.id + "': binding is not defined on the arity of '" +
                          d.label + "'");
      }
      if (!(d.binding.cod() == carrier_)) {
        throw SketchError("declaration '" + d.id + "': binding does not land in the carrier");
      }
    }
    if (closed) {
      auto missing = missing_closure();
      if (!missing.empty()) {
        throw SketchError("sketch marked closed lacks the lift of '" + missing.front().declaration +
                          "' along '" + missing.front().dependency + "'");
      }
      closed_ = true;
    }
  }

  const Graph& carrier() const noexcept { return carrier_; }
  const Signature& signature() const noexcept { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const noexcept { return sig_; }
  const std::vector<ConstraintDeclaration>& declarations() const noexcept { return decls_; }
  bool closed() const noexcept { return closed_; }

  const ConstraintDeclaration* find(const std::string& id) const {
    auto it = std::lower_bound(decls_.begin(), decls_.end(), id,
                               [](const auto& d, const std::string& k) { return d.id < k; });
    return it != decls_.end() && it->id == id ? &*it : nullptr;
  }
  const ConstraintDeclaration& declaration(const std::string& id) const {
    if (const auto* d = find(id)) return *d;
    throw SketchError("unknown declaration '" + id + "'");
  }

  // Least-id declaration with this label and binding, if any.
  const ConstraintDeclaration* find_extensional(const std::string& label,
                                                const GraphMorphism& binding) const {
    for (const auto& d : decls_)
      if (d.label == label && d.binding == binding) return &d;
    return nullptr;
  }

  std::vector<MissingClosure> missing_closure() const {
    std::vector<MissingClosure> out;
    for (const auto& d : decls_) {
      for (const auto* dep : sig_->dependencies_from(d.label)) {
        if (!find_extensional(dep->to, compose(dep->arity_map, d.binding)))
          out.push_back({d.id, dep->id});
      }
    }
    return out;
  }

  // Pairs of distinct ids carrying the same label and binding.
  std::vector<std::pair<std::string, std::string>> extensional_duplicates() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < decls_.size(); ++i)
      for (std::size_t j = i + 1; j < decls_.size(); ++j)
        if (decls_[i].label == decls_[j].label && decls_[i].binding == decls_[j].binding)
          out.emplace_back(decls_[i].id, decls_[j].id);
    return out;
  }

 private:
  Graph carrier_;
  std::shared_ptr<const Signature> sig_;
  std::vector<ConstraintDeclaration> decls_;
  bool closed_ = false;
};

// Adds the lift (dep.to, arity_map;binding) of every declaration along every
// dependency, until nothing is missing. New ids are "<parent>/<dependency>".
inline Sketch close_sketch(const Sketch& s) {
  std::vector<ConstraintDeclaration> decls = s.declarations();
  std::set<std::string> ids;
  for (const auto& d : decls) ids.insert(d.id);
  std::deque<std::size_t> work;
  for (std::size_t i = 0; i < decls.size(); ++i) work.push_back(i);
  while (!work.empty()) {
    ConstraintDeclaration d = decls[work.front()];
    work.pop_front();
    for (const auto* dep : s.signature().dependencies_from(d.label)) {
      GraphMorphism b = compose(dep->arity_map, d.binding);
      bool present = std::any_of(decls.begin(), decls.end(), [&](const auto& e) {
        return e.label == dep->to && e.binding == b;
      });
      if (present) continue;
      std::string id = d.id + "/" + dep->id;
      if (!ids.insert(id).second) {
        throw SketchError("closure id '" + id + "' is already taken by another declaration");
      }
      decls.push_back({id, dep->to, b});
      work.push_back(decls.size() - 1);
    }
  }
  return Sketch(s.carrier(), s.signature_ptr(), std::move(decls), true);
}

// For each declaration and dependency, the least-id declaration realizing the lift.
inline std::vector<DependencyLift> dependency_lifts(const Sketch& s) {
  std::vector<DependencyLift> out;
  for (const auto& d : s.declarations()) {
    for (const auto* dep : s.signature().dependencies_from(d.label)) {
      if (const auto* e = s.find_extensional(dep->to, compose(dep->arity_map, d.binding)))
        out.push_back({d.id, dep->id, e->id});
    }
  }
  return out;
}

// Same label, binding post-composed with f. The id gets a prime.
inline ConstraintDeclaration translate_declaration(const GraphMorphism& f,
                                                   const ConstraintDeclaration& d) {
  if (!(d.binding.cod() == f.dom())) {
    throw MismatchError("cannot translate '" + d.id + "': its binding lands in " +
                        describe(d.binding.cod()) + ", the map starts at " + describe(f.dom()));
  }
  return {d.id + "'", d.label, compose(d.binding, f)};
}

// All declarations of s translated along f, as a sketch over cod(f).
inline Sketch translate_sketch(const GraphMorphism& f, const Sketch& s) {
  std::vector<ConstraintDeclaration> out;
  for (const auto& d : s.declarations()) out.push_back(translate_declaration(f, d));
  return Sketch(f.cod(), s.signature_ptr(), std::move(out));
}

struct SketchMorphism {
  GraphMorphism graph_map;
  std::map<std::string, std::string> decl_map;
};

inline SketchMorphism identity(const Sketch& s) {
  SketchMorphism m{identity(s.carrier()), {}};
  for (const auto& d : s.declarations()) m.decl_map[d.id] = d.id;
  return m;
}

inline SketchMorphism compose(const SketchMorphism& f, const SketchMorphism& g) {
  SketchMorphism out{compose(f.graph_map, g.graph_map), {}};
  for (const auto& [d, e] : f.decl_map) {
    auto it = g.decl_map.find(e);
    if (it == g.decl_map.end()) {
      throw CompositionError("cannot compose sketch morphisms: '" + e + "' is not mapped");
    }
    out.decl_map[d] = it->second;
  }
  return out;
}

// Violations of totality, label preservation and binding coherence.
inline std::vector<std::string> check_sketch_morphism(const SketchMorphism& f, const Sketch& s,
                                                      const Sketch& t) {
  std::vector<std::string> v;
  if (!(f.graph_map.dom() == s.carrier())) v.push_back("graph map does not start at the source carrier");
  if (!(f.graph_map.cod() == t.carrier())) v.push_back("graph map does not end at the target carrier");
  if (!v.empty()) return v;
  for (const auto& d : s.declarations()) {
    auto it = f.decl_map.find(d.id);
    if (it == f.decl_map.end()) {
      v.push_back("declaration '" + d.id + "' is not mapped");
      continue;
    }
    const ConstraintDeclaration* e = t.find(it->second);
    if (!e) {
      v.push_back("declaration '" + d.id + "' maps to unknown '" + it->second + "'");
      continue;
    }
    if (e->label != d.label) {
      v.push_back("declaration '" + d.id + "' labelled " + d.label + " maps to '" + e->id +
                  "' labelled " + e->label);
    }
    if (!(e->binding == compose(d.binding, f.graph_map))) {
      v.push_back("binding of '" + e->id + "' is not the translated binding of '" + d.id + "'");
    }
  }
  for (const auto& [k, val] : f.decl_map) {
    if (!s.find(k)) v.push_back("mapped declaration '" + k + "' is not in the source sketch");
  }
  return v;
}

struct DefaultPolicy {
  std::set<std::string> associations;  // default [1..*]
  std::set<std::string> attributes;    // default [1]
};

// Binding of the arrow arity A -r-> B onto a carrier arrow.
inline GraphMorphism arrow_binding(const Graph& carrier, const std::string& arrow) {
  const Arrow& a = carrier.arrow(carrier.arrow_index(arrow));
  return GraphMorphism::from_ids(arity::arrow(), carrier, {{"A", a.src}, {"B", a.tgt}},
                                 {{"r", a.id}});
}

// Adds "[1..*]" to unconstrained associations and "[1]" to unconstrained
// attributes, with ids "default/<arrow>". Any multiplicity declaration on an
// arrow, "[0..*]" included, counts as a constraint.
inline Sketch elaborate_defaults(const Sketch& s, const DefaultPolicy& policy) {
  std::set<std::string> constrained;
  for (const auto& d : s.declarations()) {
    const auto& sem = s.signature().symbol(d.label).semantics;
    if (const auto* m = std::get_if<semantics::Multiplicity>(&sem)) {
      constrained.insert(d.binding.arrow_image(m->arrow));
    }
  }
  std::vector<ConstraintDeclaration> decls = s.declarations();
  for (const auto& a : s.carrier().arrows()) {
    bool assoc = policy.associations.count(a.id) != 0;
    bool attr = policy.attributes.count(a.id) != 0;
    if (assoc == attr) {
      throw SketchError("arrow '" + a.id + "' must be either an association or an attribute");
    }
    if (constrained.count(a.id)) continue;
    std::string label = assoc ? "[1..*]" : "[1]";
    if (!s.signature().has_symbol(label)) {
      throw SketchError("default policy needs the symbol " + label);
    }
    decls.push_back({"default/" + a.id, label, arrow_binding(s.carrier(), a.id)});
  }
  Sketch out(s.carrier(), s.signature_ptr(), std::move(decls));
  return s.closed() ? close_sketch(out) : out;
}

}  // namespace dcl
