// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "driver_vehicle.hpp"
#include "seed_theories.hpp"

using namespace dcl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Thrown by `require` to end a criterion with a message.
struct Failure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure{message};
}

std::shared_ptr<const Signature> sig() { return builtin_signature(); }

std::string verdict_bytes(const Verdict& v) { return to_string(v.status) + "|" + evidence_bytes(v); }

bool typed_iso(const TypedInstance& a, const TypedInstance& b) {
  return find_typed_isomorphism(a, b).has_value();
}

std::vector<std::string> symbol_names() {
  std::vector<std::string> out;
  for (const auto& [name, c] : sig()->symbols()) out.push_back(name);
  return out;
}

// --- 1: driver/vehicle fixtures through the CLI ------------------------------

struct CliResult {
  int code = -1;
  std::string out;
  double seconds = 0;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = "cd '" + std::string(DCL_FIXTURES_DIR) + "' && '" + std::string(DCL_CLI_PATH) + "' " + args +
                    " 2>/dev/null";
  CliResult r;
  auto start = Clock::now();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.seconds = seconds_since(start);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string criterion_fixtures() {
  std::ostringstream note;
  CliResult ok = run_cli("check driver_vehicle/sketch.json driver_vehicle/instance.json");
  require(ok.code == 0, "valid instance: exit " + std::to_string(ok.code));
  require(ok.seconds < 1.0, "valid instance took " + std::to_string(ok.seconds) + " s");
  std::size_t with_evidence = 0;
  const json report = json::parse(ok.out);
  for (const auto& d : report["declarations"])
    if (d["status"] == "Valid" && d["evidence"].is_object()) ++with_evidence;
  require(with_evidence >= 7, "only " + std::to_string(with_evidence) + " Valid verdicts with evidence");
  note << with_evidence << " Valid with evidence";

  const std::vector<std::pair<dv::Mutation, std::string>> mutations{
      {dv::Mutation::fifth_wheel, "fifth_wheel"},
      {dv::Mutation::duplicate_key, "duplicate_key"},
      {dv::Mutation::uncovered_drive, "uncovered_drive"}};
  for (const auto& [m, file] : mutations) {
    CliResult r = run_cli("check driver_vehicle/sketch.json driver_vehicle/" + file + ".json");
    require(r.code == 1, file + ": exit " + std::to_string(r.code));
    require(r.seconds < 1.0, file + " took " + std::to_string(r.seconds) + " s");
    std::vector<std::string> failing;
    std::string label;
    const json mreport = json::parse(r.out);
    for (const auto& d : mreport["declarations"]) {
      if (d["status"] == "Valid") continue;
      failing.push_back(d["id"]);
      label = d["label"];
    }
    require(failing == std::vector<std::string>{dv::target_of(m)},
            file + ": expected only " + dv::target_of(m) + " to fail");
    note << "; " << file << " -> " << failing.front() << " " << label;
  }
  return note.str();
}

// --- 2: pullback-based satisfaction against first-order predicates -----------

std::set<std::pair<std::string, std::string>> pairs_of(const IndexedSemantics& ix, const std::string& arrow) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& l : ix.arrow_spans.at(arrow)) out.insert({l.src, l.tgt});
  return out;
}

std::size_t distinct_targets(const IndexedSemantics& ix, const std::string& arrow, const std::string& x) {
  std::size_t n = 0;
  for (const auto& [s, t] : pairs_of(ix, arrow)) n += s == x;
  return n;
}

bool fol_some(const TypedInstance& t) {
  IndexedSemantics ix = to_indexed(t);
  for (const auto& a : ix.node_sets.at("A"))
    if (distinct_targets(ix, "r", a) == 0) return false;
  return true;
}

bool fol_at_most_one(const TypedInstance& t) {
  IndexedSemantics ix = to_indexed(t);
  for (const auto& a : ix.node_sets.at("A"))
    if (distinct_targets(ix, "r", a) > 1) return false;
  return true;
}

bool fol_subset(const TypedInstance& t) {
  IndexedSemantics ix = to_indexed(t);
  auto sub = pairs_of(ix, "r1"), sup = pairs_of(ix, "r2");
  for (const auto& p : sub)
    if (!sup.count(p)) return false;
  return true;
}

std::string criterion_oracles() {
  const std::vector<std::pair<std::string, std::function<bool(const TypedInstance&)>>> cases{
      {"[1..*]", fol_some}, {"[0..1]", fol_at_most_one}, {"[=>]", fol_subset}};
  std::ostringstream note;
  for (const auto& [label, oracle] : cases) {
    const auto& c = sig()->symbol(label);
    // One arity arrow: every multiset of links allowed by the parallel cap.
    // Two arity arrows: at most 3 links per arrow keeps the run within budget.
    EnumerationOptions opt;
    opt.size_bound = 3;
    opt.max_parallel = 2;
    opt.max_links = c.arity.arrow_count() == 1 ? 18 : 3;
    ConstraintDeclaration d{"d", label, identity(c.arity)};
    std::size_t n = 0;
    for (const auto& t : enumerate_canonical_instances(c.arity, opt)) {
      ++n;
      Status s = satisfies(t, d, *sig()).status;
      require(s != Status::unknown, label + ": Unknown verdict on case " + std::to_string(n));
      require((s == Status::valid) == oracle(t), label + ": disagreement on case " + std::to_string(n));
    }
    note << (note.tellp() ? ", " : "") << label << " " << n << " cases";
  }
  return note.str();
}

// --- 3: satisfaction-axiom harness --------------------------------------------

std::string criterion_harness() {
  HarnessOptions o;
  o.trials = 1000;
  o.seed = 42;
  auto start = Clock::now();
  HarnessSummary a = run_sat_axiom_harness(o, *sig());
  double t = seconds_since(start);
  require(a.trials == 1000 && a.passed == 1000, std::to_string(a.passed) + "/" + std::to_string(a.trials) + " passed");
  require(t < 60.0, "took " + std::to_string(t) + " s");
  HarnessSummary b = run_sat_axiom_harness(o, *sig());
  require(b.passed == a.passed && b.failed == a.failed, "second run with the same seed differs");
  std::ostringstream note;
  note << "1000/1000 pass, reproducible, " << std::fixed << std::setprecision(2) << t << " s per run";
  return note.str();
}

// --- 4: functoriality of reduct and translation --------------------------------

std::string criterion_functoriality() {
  Rng rng(101);
  const auto labels = symbol_names();
  std::size_t pairs = 0, attempts = 0;
  while (pairs < 200) {
    require(++attempts < 100000, "could not draw enough composable pairs");
    Graph g0 = random_graph(rng, 3, 4, "a");
    Graph g1 = random_graph(rng, 4, 5, "b");
    Graph g2 = random_graph(rng, 5, 6, "c");
    auto f = random_morphism_between(rng, g0, g1);
    auto h = random_morphism_between(rng, g1, g2);
    const auto& c = sig()->symbol(labels[draw(rng, 0, labels.size() - 1)]);
    auto b = random_morphism_between(rng, c.arity, g0);
    if (!f || !h || !b) continue;
    GraphMorphism fh = compose(*f, *h);
    TypedInstance t = random_instance(rng, g2, 5, 6);
    require(typed_iso(migrate_instance(fh, t), migrate_instance(*f, migrate_instance(*h, t))),
            "composite reduct not isomorphic to iterated reduct (pair " + std::to_string(pairs) + ")");
    ConstraintDeclaration d{"d", c.name, *b};
    auto direct = translate_declaration(fh, d);
    auto stepwise = translate_declaration(*h, translate_declaration(*f, d));
    require(direct.label == stepwise.label && direct.binding == stepwise.binding,
            "translation does not compose for " + c.name);
    require(verify_sat_axiom(fh, d, t, *sig()).pass(), "composite triple fails for " + c.name);
    ++pairs;
  }
  return "200 pairs: reducts iso, translations equal, composite triples pass";
}

// --- 5: regular and lifting forms ------------------------------------------------

std::string criterion_regular_lifting() {
  EnumerationOptions opt;
  opt.size_bound = 3;
  const auto instances = enumerate_canonical_instances(arity::arrow(), opt);
  const std::vector<std::pair<std::string, SliceMorphism>> cases{{"[1..*]", existence_formula()},
                                                                 {"[0..1]", uniqueness_formula()}};
  for (const auto& [label, formula] : cases) {
    semantics::Regular reg{formula};
    semantics::Lifting lift = regular_to_lifting(reg);
    semantics::Regular back = lifting_to_regular(lift);
    require(back.formula == formula, label + ": round trip changes the formula");
    const auto& builtin = sig()->symbol(label);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const TypedInstance& t = instances[i];
      Status s = evaluate(builtin, t).status;
      require(check_injectivity(t, formula).status == s, label + ": regular form disagrees on case " + std::to_string(i));
      require(check_lifting(t, lift.m, lift.n).status == s, label + ": lifting form disagrees on case " + std::to_string(i));
      require(check_injectivity(t, back.formula).status == s,
              label + ": round-tripped form disagrees on case " + std::to_string(i));
    }
  }
  return std::to_string(instances.size()) + " instances, [1..*] and [0..1] agree in all three forms";
}

// --- 6: soundness of injectivity-logic derivations --------------------------------

std::string criterion_injectivity() {
  std::ostringstream note;
  for (const auto& [name, th] : {std::pair<std::string, InjTheory>{"paths", seed::paths()},
                                 std::pair<std::string, InjTheory>{"functional", seed::functional()}}) {
    SearchOptions o;
    o.depth = 4;
    o.size_bound = 3;
    o.max_formulas = 200;
    SearchResult r = derivable_formulas(th, o);
    for (const auto& d : r.derived) {
      auto problems = verify_derivation(*d, th);
      require(problems.empty(), name + ": re-verification failed: " + (problems.empty() ? "" : problems.front()));
    }
    for (std::size_t bound = 2; bound <= 4; ++bound) {
      SemanticOptions so;
      so.size_bound = bound;
      ModelSet ms = theory_models(th, so);
      for (const auto& d : r.derived) {
        SemanticResult e = entails_on(ms, d->conclusion, kDefaultHomLimit);
        require(e.status == Status::valid, name + ": derived formula not entailed at bound " +
                                               std::to_string(bound) + " (" + to_string(e.status) + ")");
      }
    }
    note << name << " " << r.derived.size() << " formulas in " << r.rounds << " rounds"
         << (r.truncated ? " (capped)" : "") << "; ";
  }
  SearchOptions o;
  o.depth = 3;
  SearchResult r = bounded_entailment(seed::paths(), seed::coproduct_goal(), o);
  require(r.status == Status::valid && r.proof, "coproduct goal not derived: " + r.reason);
  require(r.proof->script() == std::vector<std::string>{"Pushout", "Pushout", "Composition"},
          "coproduct goal proved with a different script");
  require(verify_derivation(*r.proof, seed::paths()).empty(), "coproduct proof fails re-verification");
  note << "coproduct goal: Pushout, Pushout, Composition";
  return note.str();
}

// --- 7: dependency closure of a jointly-monic declaration --------------------------

std::string criterion_closure() {
  Graph span({"Lic", "Person", "Kind"}, {Arrow{"holder", "Lic", "Person"}, Arrow{"kind", "Lic", "Kind"}});
  GraphMorphism b = GraphMorphism::from_ids(arity::span(), span, {{"0", "Lic"}, {"1", "Person"}, {"2", "Kind"}},
                                            {{"01", "holder"}, {"02", "kind"}});
  Sketch open(span, sig(), {{"jm_lic", "[jm]", b}});
  Sketch closed = close_sketch(open);
  require(closed.closed(), "closure is not closed");
  require(closed.declarations().size() == 3, "closure added " + std::to_string(closed.declarations().size() - 1) +
                                                 " declarations, expected 2");
  for (const auto& dep_id : {"d1", "d2"}) {
    const auto& dep = sig()->dependency(dep_id);
    const auto& d = closed.declaration(std::string("jm_lic/") + dep_id);
    require(d.label == "[1]", std::string(dep_id) + ": label " + d.label);
    require(d.binding == compose(dep.arity_map, b), std::string(dep_id) + ": binding is not arity_map;b");
  }

  dv::Builder two;
  two.node("x", "Lic").node("p", "Person").node("q", "Person").node("k", "Kind");
  two.link("h1", "holder", "x", "p").link("h2", "holder", "x", "q").link("k1", "kind", "x", "k");
  TypedInstance t = two.build(span);
  ValidationOptions vo;
  vo.allow_unclosed = true;
  require(validate_instance(open, t, vo).overall == Status::valid, "unclosed jm check is not Valid");
  ValidationReport cr = validate_instance(closed, t);
  require(cr.overall == Status::invalid, "closed sketch is not Invalid");
  require(cr.verdict("jm_lic/d1").status == Status::invalid, "first-leg functionality not Invalid");

  dv::Builder fun;
  fun.node("x", "Lic").node("y", "Lic").node("p", "Person").node("k", "Kind");
  fun.link("h1", "holder", "x", "p").link("h2", "holder", "y", "p");
  fun.link("k1", "kind", "x", "k").link("k2", "kind", "y", "k");
  // Second instance violates jm; propagation is checked on the Valid ones.
  dv::Builder fun_ok;
  fun_ok.node("x", "Lic").node("y", "Lic").node("p", "Person").node("r", "Person").node("k", "Kind");
  fun_ok.link("h1", "holder", "x", "p").link("h2", "holder", "y", "r");
  fun_ok.link("k1", "kind", "x", "k").link("k2", "kind", "y", "k");
  std::size_t compared = 0;
  for (const TypedInstance& inst : {fun_ok.build(span), t, fun.build(span)}) {
    Verdict v = satisfies(inst, open.declaration("jm_lic"), *sig());
    if (v.status != Status::valid) continue;
    for (const auto& dep_id : {"d1", "d2"}) {
      const auto& dep = sig()->dependency(dep_id);
      Verdict p = propagate_evidence(v, dep, *sig());
      Verdict direct = satisfies(inst, closed.declaration(std::string("jm_lic/") + dep_id), *sig());
      require(verdict_bytes(p) == verdict_bytes(direct), std::string(dep_id) + ": propagated evidence differs");
      ++compared;
    }
  }
  require(compared == 4, "expected 4 propagation comparisons, got " + std::to_string(compared));
  return "two [1] declarations added; two-holder instance Valid unclosed, Invalid closed; propagation byte-equal";
}

// --- 8: indexed/fibred round trips --------------------------------------------------

std::string criterion_grothendieck() {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    Graph schema = random_graph(rng, 4, 5, "s");
    TypedInstance t = random_instance(rng, schema, 5, 6);
    IndexedSemantics ix = to_indexed(t);
    TypedInstance back = from_indexed(ix);
    auto iso = find_typed_isomorphism(back, t);
    require(iso.has_value(), "fibred round trip not isomorphic on case " + std::to_string(i));
    require(compose(iso->map(), t.typing()) == back.typing(), "iso does not commute with typing");
    IndexedSemantics ix2 = to_indexed(back);
    require(ix2.node_sets == ix.node_sets && ix2.arrow_spans == ix.arrow_spans,
            "indexed round trip changes the families on case " + std::to_string(i));
  }
  return "100/100 both directions";
}

// --- 9: delta algebra ----------------------------------------------------------------

std::string criterion_deltas() {
  Rng rng(9);
  std::size_t competitors = 0;
  for (int i = 0; i < 100; ++i) {
    Graph schema = random_graph(rng, 3, 4, "s");
    TypedInstance t = random_instance(rng, schema, 4, 5);
    Delta d1 = random_delta(rng, t, "p");
    Delta d2 = random_delta(rng, d1.target(), "q");
    Delta d3 = random_delta(rng, d2.target(), "r");
    require(equivalent(compose_delta(compose_delta(d1, d2), d3), compose_delta(d1, compose_delta(d2, d3))),
            "composition not associative on case " + std::to_string(i));
    require(equivalent(compose_delta(identity_delta(d1.source()), d1), d1), "left unit fails");
    require(equivalent(compose_delta(d1, identity_delta(d1.target())), d1), "right unit fails");

    GraphMorphism q = random_morphism_into(rng, schema, 2, 3, "a");
    CodLift lift = cod_lift(t, q);
    require(compose(lift.projection, t.typing()) == compose(lift.lifted.typing(), q), "lift square fails");
    TypedInstance y = random_instance(rng, q.dom(), 2, 2, "y");
    for (const auto& u : enumerate_homomorphisms(y.carrier(), t.carrier(), 40).morphisms) {
      if (!(compose(u, t.typing()) == compose(y.typing(), q))) continue;
      GraphMorphism med = lift.factor(u, y.typing());
      require(compose(med, lift.projection) == u && compose(med, lift.lifted.typing()) == y.typing(),
              "factor does not commute");
      std::size_t count = 0;
      for (const auto& m : enumerate_homomorphisms(y.carrier(), lift.lifted.carrier()).morphisms)
        count += compose(m, lift.projection) == u && compose(m, lift.lifted.typing()) == y.typing();
      require(count == 1, "factor not unique (" + std::to_string(count) + " candidates)");
      ++competitors;
    }
  }
  return "100 triples associative with units; " + std::to_string(competitors) + " competitors factor uniquely";
}

// --- 10: locality -----------------------------------------------------------------------

std::string criterion_locality() {
  Rng rng(10);
  const auto labels = symbol_names();
  std::size_t pairs = 0, attempts = 0;
  while (pairs < 100) {
    require(++attempts < 100000, "could not draw enough pairs");
    Graph g = random_graph(rng, 5, 6, "g");
    const auto& c = sig()->symbol(labels[draw(rng, 0, labels.size() - 1)]);
    auto bind = random_morphism_between(rng, c.arity, g);
    if (!bind) continue;
    TypedInstance t = random_instance(rng, g, 5, 6);
    ConstraintDeclaration d{"d", c.name, *bind};

    std::set<std::string> img_nodes, img_arrows;
    for (std::size_t i = 0; i < c.arity.node_count(); ++i) img_nodes.insert(bind->node_image(c.arity.node(i)));
    for (const auto& a : c.arity.arrows()) img_arrows.insert(bind->arrow_image(a.id));

    // Mutation: drop every element typed outside the image, then add fresh ones there.
    std::vector<std::string> nodes;
    std::vector<Arrow> arrows;
    std::map<std::string, std::string> nt, at;
    std::size_t dropped = 0, added = 0;
    for (const auto& n : t.carrier().nodes()) {
      if (img_nodes.count(t.node_type(n))) {
        nodes.push_back(n);
        nt[n] = t.node_type(n);
      } else {
        ++dropped;
      }
    }
    for (const auto& a : t.carrier().arrows()) {
      if (img_arrows.count(t.arrow_type(a.id)) && nt.count(a.src) && nt.count(a.tgt)) {
        arrows.push_back(a);
        at[a.id] = t.arrow_type(a.id);
      } else {
        ++dropped;
      }
    }
    for (const auto& n : g.nodes()) {
      if (img_nodes.count(n)) continue;
      nodes.push_back("new_" + n);
      nt["new_" + n] = n;
      ++added;
    }
    for (const auto& a : g.arrows()) {
      if (img_arrows.count(a.id)) continue;
      auto pick = [&](const std::string& type) -> std::string {
        for (const auto& [e, ty] : nt)
          if (ty == type) return e;
        return "";
      };
      std::string s = pick(a.src), tg = pick(a.tgt);
      if (s.empty() || tg.empty()) continue;
      arrows.push_back(Arrow{"new_" + a.id, s, tg});
      at["new_" + a.id] = a.id;
      ++added;
    }
    if (dropped + added == 0) continue;
    TypedInstance mutated(GraphMorphism::from_ids(Graph(nodes, arrows), g, nt, at));
    Verdict before = satisfies(t, d, *sig()), after = satisfies(mutated, d, *sig());
    require(verdict_bytes(before) == verdict_bytes(after),
            c.name + ": verdict or evidence changed on pair " + std::to_string(pairs));
    ++pairs;
  }
  return "100/100 pairs unchanged";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"driver/vehicle fixtures via CLI check", criterion_fixtures},
      {"multiplicity and subset oracles, exhaustive", criterion_oracles},
      {"satisfaction-axiom harness, 1000 seeded triples", criterion_harness},
      {"functoriality on 200 composable pairs", criterion_functoriality},
      {"regular/lifting equivalence", criterion_regular_lifting},
      {"injectivity-logic soundness", criterion_injectivity},
      {"jointly-monic dependency closure", criterion_closure},
      {"indexed/fibred round trips", criterion_grothendieck},
      {"delta algebra and cartesian lifts", criterion_deltas},
      {"locality outside the binding preimage", criterion_locality}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    auto start = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      detail = run();
      ok = true;
    } catch (const Failure& f) {
      detail = f.message;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << (i + 1) << " " << name << " [" << std::fixed << std::setprecision(2)
              << seconds_since(start) << " s]: " << detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
