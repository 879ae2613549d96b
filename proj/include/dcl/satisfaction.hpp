// Satisfaction with evidence: restriction along bindings, per-declaration
// verdicts, whole-sketch validation, instance migration, evidence
// propagation along dependencies, reducts along sketch morphisms, delta
// pullback, and the seeded Sat-axiom harness.

#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dcl/random.hpp"
#include "dcl/serialize.hpp"
#include "dcl/signature.hpp"
#include "dcl/sketch.hpp"
#include "dcl/slice.hpp"

namespace dcl {

struct Evidence {
  std::string declaration;
  TypedInstance restricted;  // canonical form of the restriction along the binding
  json witness;
};

struct Counterexample {
  TypedInstance restricted;            // canonical form of the restriction
  std::vector<std::string> offending;  // ids in the checked instance
  json witness;
};

struct Verdict {
  Status status = Status::unknown;
  std::string declaration;
  std::optional<Evidence> evidence;
  std::optional<Counterexample> counterexample;
  std::string reason;
};

// Verdict of a symbol on a restricted instance; offending ids are mapped
// back through `projection` when given.
inline Verdict package_verdict(const std::string& id, const ConstraintSymbol& c,
                               const TypedInstance& restricted,
                               const GraphMorphism* projection, std::size_t limit) {
  SymbolVerdict sv = evaluate_detailed(c, restricted, limit);
  Verdict v;
  v.status = sv.evaluation.status;
  v.declaration = id;
  v.reason = sv.evaluation.reason;
  if (v.status == Status::valid) {
    v.evidence = Evidence{id, sv.canonical.instance, sv.evaluation.witness};
  } else if (v.status == Status::invalid) {
    Counterexample ce{sv.canonical.instance, {}, sv.evaluation.witness};
    for (const auto& e : sv.evaluation.offending) {
      if (!projection) {
        ce.offending.push_back(e);
      } else if (auto n = restricted.carrier().find_node(e)) {
        ce.offending.push_back(projection->cod().node(projection->node_image(*n)));
      } else if (auto a = restricted.carrier().find_arrow(e)) {
        ce.offending.push_back(projection->cod().arrow(projection->arrow_image(*a)).id);
      }
    }
    std::sort(ce.offending.begin(), ce.offending.end());
    ce.offending.erase(std::unique(ce.offending.begin(), ce.offending.end()), ce.offending.end());
    v.counterexample = std::move(ce);
  }
  return v;
}

inline Verdict satisfies(const TypedInstance& t, const ConstraintDeclaration& d,
                         const Signature& sig, std::size_t limit = kDefaultHomLimit) {
  if (!(t.schema() == d.binding.cod())) {
    throw MismatchError("declaration '" + d.id + "' is bound into " + describe(d.binding.cod()) +
                        ", the instance is over " + describe(t.schema()));
  }
  Restriction r = restrict_along(t, d.binding);
  return package_verdict(d.id, sig.symbol(d.label), r.instance, &r.projection, limit);
}

struct ValidationReport {
  std::vector<Verdict> verdicts;  // declaration order
  Status overall = Status::valid;

  const Verdict& verdict(const std::string& id) const {
    for (const auto& v : verdicts)
      if (v.declaration == id) return v;
    throw Error("no verdict for declaration '" + id + "'");
  }
};

struct ValidationOptions {
  bool allow_unclosed = false;
  unsigned jobs = 1;
  std::size_t limit = kDefaultHomLimit;
};

inline ValidationReport validate_instance(const Sketch& s, const TypedInstance& t,
                                          const ValidationOptions& opt = {}) {
  if (!(t.schema() == s.carrier())) {
    throw MismatchError("instance is over " + describe(t.schema()) +
                        ", the sketch carrier is " + describe(s.carrier()));
  }
  if (!opt.allow_unclosed) {
    auto missing = s.missing_closure();
    if (!missing.empty()) {
      std::string msg = "sketch is not closed; missing lifts:";
      for (const auto& m : missing) msg += " " + m.declaration + "/" + m.dependency;
      throw SketchError(msg);
    }
  }
  const auto& decls = s.declarations();
  ValidationReport report;
  report.verdicts.resize(decls.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(decls.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < decls.size(); i = next++) {
      try {
        report.verdicts[i] = satisfies(t, decls[i], s.signature(), opt.limit);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(decls.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& v : report.verdicts) report.overall = conjoin(report.overall, v.status);
  return report;
}

// Model reduct along f: G -> G'.
inline TypedInstance migrate_instance(const GraphMorphism& f, const TypedInstance& t) {
  return restrict(t, f);
}

// Evidence bytes: the canonical restriction plus the witness.
inline std::string evidence_bytes(const Verdict& v) {
  if (v.evidence) return canonical_bytes(v.evidence->restricted) + v.evidence->witness.dump();
  if (v.counterexample)
    return canonical_bytes(v.counterexample->restricted) + v.counterexample->witness.dump();
  return "";
}

using Translation =
    std::function<ConstraintDeclaration(const GraphMorphism&, const ConstraintDeclaration&)>;

struct SatAxiomCheck {
  Verdict reduct_side;      // f*(t') against d
  Verdict translated_side;  // t' against f_*(d)
  bool verdicts_agree = false;
  bool evidence_equal = false;
  bool pass() const { return verdicts_agree && evidence_equal; }
};

inline SatAxiomCheck verify_sat_axiom(const GraphMorphism& f, const ConstraintDeclaration& d,
                                      const TypedInstance& t, const Signature& sig,
                                      const Translation& translate = translate_declaration) {
  SatAxiomCheck c;
  c.reduct_side = satisfies(migrate_instance(f, t), d, sig);
  ConstraintDeclaration pushed = translate(f, d);
  c.translated_side = satisfies(t, pushed, sig);
  c.verdicts_agree = c.reduct_side.status == c.translated_side.status;
  c.evidence_equal = evidence_bytes(c.reduct_side) == evidence_bytes(c.translated_side);
  return c;
}

// Verdict for (dep.to, arity_map;binding) obtained by restricting the
// evidence of a Valid verdict; the instance itself is not revisited.
inline Verdict propagate_evidence(const Verdict& v, const Dependency& dep, const Signature& sig) {
  if (v.status != Status::valid || !v.evidence) {
    throw Error("cannot propagate evidence of a verdict that is not Valid ('" + v.declaration + "')");
  }
  if (!(v.evidence->restricted.schema() == dep.arity_map.cod())) {
    throw MismatchError("dependency '" + dep.id + "' does not start at the evidence arity");
  }
  TypedInstance r = restrict(v.evidence->restricted, dep.arity_map);
  return package_verdict(v.declaration + "/" + dep.id, sig.symbol(dep.to), r, nullptr,
                         kDefaultHomLimit);
}

struct SketchReduct {
  TypedInstance instance;
  ValidationReport report;
};

// Reduct of a valid S'-instance along f: S -> S'. Verdicts are carried over
// from the target report (evidence reused) instead of being recomputed.
inline SketchReduct reduct_sketch_instance(const SketchMorphism& f, const Sketch& s,
                                           const Sketch& s2, const TypedInstance& t,
                                           const ValidationReport& report) {
  auto problems = check_sketch_morphism(f, s, s2);
  if (!problems.empty()) throw SketchError("not a sketch morphism: " + problems.front());
  if (report.overall != Status::valid) {
    throw Error("reduct needs a Valid report, got " + to_string(report.overall));
  }
  SketchReduct out{migrate_instance(f.graph_map, t), {}};
  for (const auto& d : s.declarations()) {
    const Verdict& src = report.verdict(f.decl_map.at(d.id));
    Verdict v = src;
    v.declaration = d.id;
    if (v.evidence) v.evidence->declaration = d.id;
    out.report.verdicts.push_back(std::move(v));
    out.report.overall = conjoin(out.report.overall, src.status);
  }
  return out;
}

// f*(d'): restrict source, target and apex along f; legs induced by the
// universal property of the restricted endpoints.
inline Delta pullback_delta(const GraphMorphism& f, const Delta& d) {
  if (!(d.apex().schema() == f.cod())) {
    throw MismatchError("delta is over " + describe(d.apex().schema()) + ", the map ends at " +
                        describe(f.cod()));
  }
  Restriction apex = restrict_along(d.apex(), f);
  Restriction src = restrict_along(d.source(), f);
  Restriction tgt = restrict_along(d.target(), f);
  GraphMorphism l = src.square.mediate(compose(apex.projection, d.left().map()), apex.square.right);
  GraphMorphism r = tgt.square.mediate(compose(apex.projection, d.right().map()), apex.square.right);
  return Delta(SliceMorphism(apex.instance, src.instance, l),
               SliceMorphism(apex.instance, tgt.instance, r));
}

// ---------------------------------------------------------------------------
// Seeded harness for the Sat-axiom.

struct SatAxiomTrial {
  std::size_t index = 0;
  GraphMorphism f;
  ConstraintDeclaration declaration;
  TypedInstance instance;
  SatAxiomCheck check;
};

struct HarnessOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t max_nodes = 5;
  std::size_t max_arrows = 6;
  bool break_translation = false;
  std::size_t kept_failures = 5;
};

struct HarnessSummary {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<SatAxiomTrial> failures;  // first few
};

// Label-swapping translation, for fault injection.
inline ConstraintDeclaration broken_translation(const GraphMorphism& f,
                                                const ConstraintDeclaration& d) {
  ConstraintDeclaration out = translate_declaration(f, d);
  if (out.label == "[1..*]") {
    out.label = "[0..1]";
  } else if (out.label == "[0..1]") {
    out.label = "[1..*]";
  }
  return out;
}

// A random (f: G -> G', d over G, t' over G') triple drawn from rng.
inline SatAxiomTrial random_triple(Rng& rng, const Signature& sig, std::size_t max_nodes,
                                   std::size_t max_arrows) {
  std::vector<const ConstraintSymbol*> symbols;
  for (const auto& [name, c] : sig.symbols()) symbols.push_back(&c);
  while (true) {
    Graph g2 = random_graph(rng, max_nodes, max_arrows, "t");
    Graph g = random_graph(rng, max_nodes, max_arrows, "s");
    auto f = random_morphism_between(rng, g, g2);
    if (!f) continue;
    const ConstraintSymbol& c = *symbols[draw(rng, 0, symbols.size() - 1)];
    auto b = random_morphism_between(rng, c.arity, g);
    if (!b) continue;
    SatAxiomTrial trial;
    trial.f = *f;
    trial.declaration = {"d", c.name, *b};
    trial.instance = random_instance(rng, g2, max_nodes + 1, max_arrows + 2, "x");
    return trial;
  }
}

inline HarnessSummary run_sat_axiom_harness(const HarnessOptions& opt, const Signature& sig) {
  Rng rng(opt.seed);
  HarnessSummary summary;
  Translation translate = opt.break_translation ? Translation(broken_translation)
                                                : Translation(translate_declaration);
  for (std::size_t i = 0; i < opt.trials; ++i) {
    SatAxiomTrial trial = random_triple(rng, sig, opt.max_nodes, opt.max_arrows);
    trial.index = i;
    trial.check = verify_sat_axiom(trial.f, trial.declaration, trial.instance, sig, translate);
    ++summary.trials;
    if (trial.check.pass()) {
      ++summary.passed;
    } else {
      ++summary.failed;
      if (summary.failures.size() < opt.kept_failures) summary.failures.push_back(std::move(trial));
    }
  }
  return summary;
}

}  // namespace dcl
