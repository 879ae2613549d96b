// Command-line front end. Exit codes: 0 Valid, 1 Invalid, 2 Unknown, 3 input error.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dcl/dcl.hpp"

namespace {

using namespace dcl;

constexpr int kInputError = 3;

int exit_code(Status s) {
  switch (s) {
    case Status::valid: return 0;
    case Status::invalid: return 1;
    case Status::unknown: return 2;
  }
  return 2;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

struct Files {
  io::Loader loader;
  io::Reader reader{loader};
  io::Node load(const std::string& path) { return loader.resolve(loader.load(path)); }
  std::string kind(const io::Node& n) { return n.str_or("kind", ""); }
};

// --- check ---------------------------------------------------------------

struct CheckArgs {
  std::string sketch, instance;
  bool close = false, allow_unclosed = false;
  unsigned jobs = 1;
  std::size_t limit = kDefaultHomLimit;
};

int cmd_check(const CheckArgs& a) {
  Files f;
  Sketch s = f.reader.sketch(f.load(a.sketch));
  TypedInstance t = f.reader.instance(f.load(a.instance), &s.carrier());
  if (a.close) s = close_sketch(s);
  ValidationOptions opt;
  opt.allow_unclosed = a.allow_unclosed;
  opt.jobs = a.jobs;
  opt.limit = a.limit;
  ValidationReport r = validate_instance(s, t, opt);
  emit(io::write(r, s, a.sketch, a.instance));
  return exit_code(r.overall);
}

// --- migrate -------------------------------------------------------------

struct MigrateArgs {
  std::string map, payload, direction = "pull";
};

int cmd_migrate(const MigrateArgs& a) {
  Files f;
  GraphMorphism m = f.reader.morphism(f.load(a.map));
  io::Node p = f.load(a.payload);
  const std::string kind = f.kind(p);
  if (a.direction == "pull") {
    if (kind == "delta") {
      Delta d = f.reader.delta(p, &m.cod());
      emit(io::write(pullback_delta(m, d)));
      return 0;
    }
    if (kind != "instance") p.fail("pull expects an instance or a delta, found '" + kind + "'");
    TypedInstance t = f.reader.instance(p);
    if (!(t.schema() == m.cod())) p.fail("instance schema is not the codomain of the map");
    emit(io::write(migrate_instance(m, t)));
    return 0;
  }
  if (kind != "sketch") p.fail("push expects a sketch, found '" + kind + "'");
  Sketch s = f.reader.sketch(p);
  if (!(s.carrier() == m.dom())) p.fail("sketch carrier is not the domain of the map");
  emit(io::write(translate_sketch(m, s)));
  return 0;
}

// --- translate -----------------------------------------------------------

struct TranslateArgs {
  std::string signature, to = "lifting";
};

int cmd_translate(const TranslateArgs& a) {
  Files f;
  auto sig = f.reader.signature(f.load(a.signature));
  Signature out;
  for (const auto& [name, c] : sig->symbols()) {
    ConstraintSymbol t = c;
    if (a.to == "lifting") {
      if (const auto* r = std::get_if<semantics::Regular>(&c.semantics)) t.semantics = regular_to_lifting(*r);
    } else if (const auto* l = std::get_if<semantics::Lifting>(&c.semantics)) {
      t.semantics = lifting_to_regular(*l);
    }
    out.add_symbol(std::move(t));
  }
  for (const auto& d : sig->dependencies()) out.add_dependency(d);
  emit(io::write(out));
  return 0;
}

// --- satax ---------------------------------------------------------------

int cmd_satax(const HarnessOptions& opt) {
  HarnessSummary s = run_sat_axiom_harness(opt, *builtin_signature());
  json failures = json::array();
  for (const auto& t : s.failures) {
    failures.push_back({{"index", t.index},
                        {"map", io::write(t.f)},
                        {"declaration", io::write(t.declaration)},
                        {"label", t.declaration.label},
                        {"instance", io::write(t.instance)},
                        {"reduct_side", to_string(t.check.reduct_side.status)},
                        {"translated_side", to_string(t.check.translated_side.status)},
                        {"verdicts_agree", t.check.verdicts_agree},
                        {"evidence_equal", t.check.evidence_equal}});
  }
  emit({{"kind", "satax_summary"},
        {"seed", opt.seed},
        {"max_nodes", opt.max_nodes},
        {"max_arrows", opt.max_arrows},
        {"trials", s.trials},
        {"passed", s.passed},
        {"failed", s.failed},
        {"failures", failures}});
  return s.failed == 0 ? 0 : 1;
}

// --- infer ---------------------------------------------------------------

struct InferArgs {
  std::string theory, goal;
  SearchOptions opt;
};

int cmd_infer(const InferArgs& a) {
  Files f;
  InjTheory th = f.reader.theory(f.load(a.theory));
  SliceMorphism goal = f.reader.formula(f.load(a.goal), th);
  SearchResult r = bounded_entailment(th, goal, a.opt);
  json out = {{"kind", "inference"},
              {"status", r.status == Status::valid ? "Derivable" : "Unknown"},
              {"depth", a.opt.depth},
              {"size_bound", a.opt.size_bound},
              {"rounds", r.rounds},
              {"derived", r.derived.size()},
              {"truncated", r.truncated}};
  if (!r.reason.empty()) out["reason"] = r.reason;
  if (r.proof) {
    auto problems = verify_derivation(*r.proof, th);
    if (!problems.empty()) throw Error("proof failed re-verification: " + problems.front());
    out["script"] = r.proof->script();
    out["proof"] = io::write(*r.proof, th);
  } else {
    out["proof"] = nullptr;
  }
  emit(out);
  return r.status == Status::valid ? 0 : 2;
}

// --- canon, close, deps-check ----------------------------------------------

int cmd_canon(const std::string& path) {
  Files f;
  io::Node n = f.load(path);
  const std::string kind = f.kind(n);
  if (kind == "graph") {
    emit(io::write(canonicalize(f.reader.graph(n)).graph));
  } else if (kind == "instance") {
    emit(io::write(canonicalize(f.reader.instance(n)).instance));
  } else {
    n.fail("canon expects a graph or an instance, found '" + kind + "'");
  }
  return 0;
}

int cmd_close(const std::string& path) {
  Files f;
  emit(io::write(close_sketch(f.reader.sketch(f.load(path)))));
  return 0;
}

int cmd_deps_check(const std::string& path, std::size_t size) {
  Files f;
  auto sig = path == "builtin" ? builtin_signature() : f.reader.signature(f.load(path));
  SoundnessReport r = verify_dependency_soundness(*sig, size);
  json deps = json::array();
  for (const auto& d : sig->dependencies()) {
    deps.push_back({{"id", d.id},
                    {"from", d.from},
                    {"to", d.to},
                    {"valid_instances", r.valid_instances[d.id]},
                    {"violations", r.violation_count[d.id]}});
  }
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"dependency", v.dependency},
                          {"witness", io::write(v.witness)},
                          {"restricted", io::write(v.restricted)},
                          {"status", to_string(v.evaluation.status)},
                          {"reason", v.evaluation.reason}});
  }
  emit({{"kind", "soundness_report"},
        {"size_bound", r.size_bound},
        {"dependencies", deps},
        {"violations", violations},
        {"sound", r.sound()}});
  return r.sound() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagram constraint logic over finite multigraphs"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Validate an instance against a sketch");
  c->add_option("sketch", check.sketch, "Sketch file")->required();
  c->add_option("instance", check.instance, "Instance file")->required();
  c->add_flag("--close", check.close, "Close the sketch under dependencies first");
  c->add_flag("--allow-unclosed", check.allow_unclosed, "Accept a sketch that is not closed");
  c->add_option("--jobs", check.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c->add_option("--limit", check.limit, "Homomorphism budget per declaration");

  MigrateArgs migrate;
  auto* m = app.add_subcommand("migrate", "Pull instances or deltas back, push sketches forward");
  m->add_option("map", migrate.map, "Schema morphism file")->required();
  m->add_option("payload", migrate.payload, "Instance, delta or sketch file")->required();
  m->add_option("--direction", migrate.direction, "pull or push")->check(CLI::IsMember({"pull", "push"}));

  TranslateArgs translate;
  auto* tr = app.add_subcommand("translate", "Translate regular and lifting symbols of a signature");
  tr->add_option("signature", translate.signature, "Signature file")->required();
  tr->add_option("--to", translate.to, "lifting or regular")->check(CLI::IsMember({"lifting", "regular"}));

  HarnessOptions satax;
  satax.trials = 1000;
  auto* sa = app.add_subcommand("satax", "Run the satisfaction-axiom harness");
  sa->add_option("--trials", satax.trials, "Number of random triples");
  sa->add_option("--seed", satax.seed, "Random seed");
  sa->add_option("--max-nodes", satax.max_nodes, "Node cap for random graphs");
  sa->add_option("--max-arrows", satax.max_arrows, "Arrow cap for random graphs");
  sa->add_flag("--break-translation", satax.break_translation, "Swap [1..*] and [0..1] when translating");

  InferArgs infer;
  auto* in = app.add_subcommand("infer", "Bounded derivation search in injectivity logic");
  in->add_option("theory", infer.theory, "Theory file")->required();
  in->add_option("goal", infer.goal, "Goal formula file")->required();
  in->add_option("--depth", infer.opt.depth, "Rule rounds");
  in->add_option("--size", infer.opt.size_bound, "Elements per sort in materialized objects");
  in->add_option("--max-formulas", infer.opt.max_formulas, "Cap on distinct derived formulas");

  std::string canon_path;
  auto* ca = app.add_subcommand("canon", "Canonical form of a graph or instance");
  ca->add_option("file", canon_path, "Graph or instance file")->required();

  std::string close_path;
  auto* cl = app.add_subcommand("close", "Close a sketch under signature dependencies");
  cl->add_option("sketch", close_path, "Sketch file")->required();

  std::string deps_path = "builtin";
  std::size_t deps_size = 3;
  auto* dc = app.add_subcommand("deps-check", "Bounded soundness check of signature dependencies");
  dc->add_option("signature", deps_path, "Signature file, or builtin");
  dc->add_option("--size", deps_size, "Elements per arity node");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*c) return cmd_check(check);
    if (*m) return cmd_migrate(migrate);
    if (*tr) return cmd_translate(translate);
    if (*sa) return cmd_satax(satax);
    if (*in) return cmd_infer(infer);
    if (*ca) return cmd_canon(canon_path);
    if (*cl) return cmd_close(close_path);
    if (*dc) return cmd_deps_check(deps_path, deps_size);
  } catch (const SizeGuardError& e) {
    std::cerr << "dcl: " << e.what() << "\n";
    return exit_code(Status::unknown);
  } catch (const std::exception& e) {
    std::cerr << "dcl: error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
