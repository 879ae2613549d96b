// Bounded check that validity restricts along every signature dependency.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcl/enumerate.hpp"
#include "dcl/signature.hpp"

namespace dcl {

struct SoundnessViolation {
  std::string dependency;
  TypedInstance witness;     // canonical valid instance of the dependent symbol
  TypedInstance restricted;  // its restriction along the arity map
  Evaluation evaluation;     // of the contributing symbol on the restriction
};

struct SoundnessReport {
  std::size_t size_bound = 0;
  std::map<std::string, std::size_t> valid_instances;  // per dependency
  std::map<std::string, std::size_t> violation_count;  // per dependency
  std::vector<SoundnessViolation> violations;          // first few per dependency

  bool sound() const { return violations.empty(); }
};

inline SoundnessReport verify_dependency_soundness(const Signature& sig, std::size_t size_bound,
                                                   std::size_t kept_per_dependency = 5) {
  SoundnessReport report;
  report.size_bound = size_bound;
  std::map<std::string, std::vector<TypedInstance>> valid_of;
  for (const auto& d : sig.dependencies()) {
    const ConstraintSymbol& from = sig.symbol(d.from);
    const ConstraintSymbol& to = sig.symbol(d.to);
    auto it = valid_of.find(d.from);
    if (it == valid_of.end()) {
      std::vector<TypedInstance> valid;
      EnumerationOptions opt;
      opt.size_bound = size_bound;
      for (auto& t : enumerate_canonical_instances(from.arity, opt)) {
        if (evaluate_canonical(from, t).status == Status::valid) valid.push_back(std::move(t));
      }
      it = valid_of.emplace(d.from, std::move(valid)).first;
    }
    report.valid_instances[d.id] = it->second.size();
    std::size_t& count = report.violation_count[d.id];
    for (const auto& t : it->second) {
      TypedInstance r = restrict(t, d.arity_map);
      Evaluation ev = evaluate(to, r);
      if (ev.status == Status::valid) continue;
      if (count++ < kept_per_dependency) {
        report.violations.push_back({d.id, t, r, std::move(ev)});
      }
    }
  }
  return report;
}

}  // namespace dcl
