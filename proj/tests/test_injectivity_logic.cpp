#include <gtest/gtest.h>

#include "seed_theories.hpp"

using namespace dcl;

namespace {

SemanticOptions at(std::size_t bound) {
  SemanticOptions o;
  o.size_bound = bound;
  return o;
}

// Pushes a formula over A -r-> B along a node-adding inclusion P -> P + {c}.
SliceMorphism add_node_to_domain(const SliceMorphism& f, const std::string& type) {
  const TypedInstance& p = f.from();
  std::vector<std::string> nodes = p.carrier().nodes();
  nodes.push_back("c");
  std::map<std::string, std::string> nt, at;
  for (const auto& n : p.carrier().nodes()) nt[n] = p.node_type(n);
  for (const auto& a : p.carrier().arrows()) at[a.id] = p.arrow_type(a.id);
  nt["c"] = type;
  Graph big(nodes, p.carrier().arrows());
  TypedInstance r(GraphMorphism::from_ids(big, p.schema(), nt, at));
  std::map<std::string, std::string> nm, am;
  for (const auto& n : p.carrier().nodes()) nm[n] = n;
  for (const auto& a : p.carrier().arrows()) am[a.id] = a.id;
  return SliceMorphism(p, r, GraphMorphism::from_ids(p.carrier(), big, nm, am));
}

}  // namespace

TEST(FormulaKey, IgnoresElementIds) {
  InjTheory th = seed::paths();
  // step with ids chosen so that id order reverses the path order
  Graph p({"z", "q"}, {Arrow{"k9", "z", "q"}});
  Graph q({"z", "q", "a"}, {Arrow{"k9", "z", "q"}, Arrow{"k10", "q", "a"}});
  auto renamed = th.lift(GraphMorphism::from_ids(p, q, {{"z", "z"}, {"q", "q"}}, {{"k9", "k9"}}));
  EXPECT_TRUE(equivalent_formulas(renamed, th.formula("step")));
  EXPECT_FALSE(equivalent_formulas(renamed, th.formula("succ")));
  // same carriers, but the premise edge maps onto the second edge: not the step formula
  Graph p2({"z", "q"}, {Arrow{"k9", "z", "q"}});
  auto shifted = th.lift(GraphMorphism::from_ids(p2, q, {{"z", "q"}, {"q", "a"}}, {{"k9", "k10"}}));
  EXPECT_FALSE(equivalent_formulas(shifted, th.formula("step")));
}

TEST(Theory, RejectsFormulasOutsideTheAmbient) {
  InjTheory th = seed::functional();
  EXPECT_THROW(th.add("x", seed::paths().formula("succ")), InferenceError);
  EXPECT_THROW(th.add("exists", existence_formula()), InferenceError);
  EXPECT_THROW(th.lift(seed::succ_map()), InferenceError);
}

TEST(Semantic, MembersAndIdentitiesAreEntailed) {
  for (const InjTheory& th : {seed::paths(), seed::functional()}) {
    for (std::size_t b = 1; b <= 3; ++b) {
      for (const auto& [name, f] : th.formulas()) {
        auto r = semantic_entails(th, f, at(b));
        EXPECT_EQ(r.status, Status::valid) << name << " at " << b;
        EXPECT_GT(r.models, 0u);
        EXPECT_EQ(semantic_entails(th, identity(f.to()), at(b)).status, Status::valid);
      }
    }
  }
}

TEST(Semantic, FunctionalModelsAreExactlyTotalSingleValued) {
  InjTheory th = seed::functional();
  EnumerationOptions eo;
  eo.size_bound = 2;
  auto all = enumerate_canonical_instances(th.ambient(), eo);
  auto ms = theory_models(th, at(2));
  std::size_t expected = 0;
  for (const auto& t : all) {
    auto ix = to_indexed(t);
    bool ok = true;
    for (const auto& a : ix.node_sets.at("A")) {
      std::set<std::string> targets;
      for (const auto& l : ix.arrow_spans.at("r"))
        if (l.src == a) targets.insert(l.tgt);
      ok = ok && targets.size() == 1;
    }
    expected += ok;
  }
  EXPECT_EQ(ms.models.size(), expected);
  EXPECT_EQ(ms.instances, all.size());
}

TEST(Semantic, NonConsequenceHasACountermodel) {
  auto r = semantic_entails(seed::paths(), seed::unreachable_goal(), at(2));
  EXPECT_EQ(r.status, Status::invalid);
  ASSERT_TRUE(r.countermodel.has_value());
  EXPECT_EQ(check_injectivity(*r.countermodel, seed::unreachable_goal()).status, Status::invalid);
  InjTheory th = seed::paths();
  for (const auto& [name, f] : th.formulas())
    EXPECT_EQ(check_injectivity(*r.countermodel, f).status, Status::valid);
}

TEST(Semantic, OversizedBoundIsRefused) {
  EXPECT_THROW(semantic_entails(seed::functional(), existence_formula(), at(40)), SizeGuardError);
}

TEST(Rules, IdentityNeedsNoPremises) {
  InjTheory th = seed::paths();
  auto d = identity_rule(th.formula("step").to());
  EXPECT_TRUE(d->premises.empty());
  EXPECT_TRUE(verify_derivation(*d, th).empty());
  EXPECT_TRUE(d->conclusion.map().is_isomorphism());
}

TEST(Rules, CompositionOfInclusionsIsTheCompositeInclusion) {
  InjTheory th = seed::paths();
  auto d = composition_rule(axiom_rule(th, "succ"), axiom_rule(th, "step"));
  EXPECT_TRUE(verify_derivation(*d, th).empty());
  EXPECT_TRUE(d->conclusion.map().is_injective());
  EXPECT_EQ(d->conclusion.to().carrier().node_count(), 3u);
  for (std::size_t b = 2; b <= 4; ++b)
    EXPECT_EQ(semantic_entails(th, d->conclusion, at(b)).status, Status::valid) << b;
  EXPECT_THROW(composition_rule(axiom_rule(th, "step"), axiom_rule(th, "succ")), InferenceError);
}

TEST(Rules, PushoutOfExistenceAlongNodeAddingMapIsSound) {
  InjTheory th = seed::functional();
  for (const std::string type : {"A", "B"}) {
    SliceMorphism g = add_node_to_domain(th.formula("exists"), type);
    auto d = pushout_rule(axiom_rule(th, "exists"), g);
    EXPECT_TRUE(verify_derivation(*d, th).empty());
    EXPECT_EQ(d->conclusion.from(), g.to());
    for (std::size_t b = 2; b <= 3; ++b)
      EXPECT_EQ(semantic_entails(th, d->conclusion, at(b)).status, Status::valid) << type << b;
  }
  SliceMorphism wrong = add_node_to_domain(th.formula("unique"), "A");
  EXPECT_THROW(pushout_rule(axiom_rule(th, "exists"), wrong), InferenceError);
}

TEST(Rules, CancellationConcludesTheFirstFactor) {
  InjTheory th = seed::paths();
  auto h = composition_rule(axiom_rule(th, "succ"), axiom_rule(th, "step"));
  auto d = cancellation_rule(h, th.formula("succ"), th.formula("step"));
  EXPECT_TRUE(verify_derivation(*d, th).empty());
  EXPECT_EQ(d->conclusion, th.formula("succ"));
  EXPECT_THROW(cancellation_rule(h, th.formula("step"), th.formula("succ")), InferenceError);
}

TEST(Rules, CancellationSpotCheckOnSmallModels) {
  // Every h-injective small graph is f1-injective, for h = succ;step.
  InjTheory paths = seed::paths();
  InjTheory only_h = InjTheory::plain_graphs();
  only_h.add("h", compose(paths.formula("succ"), paths.formula("step")));
  for (std::size_t b = 2; b <= 4; ++b)
    EXPECT_EQ(semantic_entails(only_h, paths.formula("succ"), at(b)).status, Status::valid) << b;
}

TEST(Rules, TamperedDerivationsAreRejected) {
  InjTheory th = seed::paths();
  auto good = composition_rule(axiom_rule(th, "succ"), axiom_rule(th, "step"));
  auto bad = std::make_shared<Derivation>(*good);
  bad->conclusion = th.formula("succ");
  EXPECT_FALSE(verify_derivation(*bad, th).empty());
  auto fake = std::make_shared<Derivation>(*axiom_rule(th, "succ"));
  fake->axiom = "nope";
  EXPECT_FALSE(verify_derivation(*fake, th).empty());
  auto wrong_macro = std::make_shared<Derivation>(*good);
  wrong_macro->macro = "COPRODUCT";
  EXPECT_FALSE(verify_derivation(*wrong_macro, th).empty());
}

TEST(Coproduct, IdentitiesGiveAnIsoOnTheCoproduct) {
  InjTheory th = seed::paths();
  const TypedInstance& a = th.formula("step").to();
  auto d = coproduct_macro(identity_rule(a), identity_rule(a));
  EXPECT_TRUE(verify_derivation(*d, th).empty());
  EXPECT_TRUE(d->conclusion.map().is_isomorphism());
  EXPECT_TRUE(equivalent_formulas(d->conclusion, identity(coproduct(a, a).sum)));
}

TEST(Coproduct, ScriptMatchesDirectCoproduct) {
  for (const InjTheory& th : {seed::paths(), seed::functional()}) {
    const auto& [name, f] = *th.formulas().begin();
    auto d = coproduct_macro(axiom_rule(th, name), axiom_rule(th, name));
    EXPECT_EQ(d->macro, "COPRODUCT");
    EXPECT_EQ(d->script(), (std::vector<std::string>{"Pushout", "Pushout", "Composition"}));
    EXPECT_TRUE(verify_derivation(*d, th).empty());
    EXPECT_TRUE(equivalent_formulas(d->conclusion, coproduct_formula(f, f)));
    EXPECT_EQ(d->conclusion.from(), coproduct(f.from(), f.from()).sum);
  }
}

TEST(Coproduct, TwoExistenceCopiesAgreeSemantically) {
  InjTheory th = seed::functional();
  auto d = coproduct_macro(axiom_rule(th, "exists"), axiom_rule(th, "exists"));
  for (std::size_t b = 2; b <= 4; ++b)
    EXPECT_EQ(semantic_entails(th, d->conclusion, at(b)).status, Status::valid) << b;
}

TEST(FormulaKey, InvariantUnderRenamingAndSensitiveToStructure) {
  InjTheory th = seed::paths();
  const SliceMorphism& f = th.formula("step");
  auto canon_to = canonicalize(f.to());
  auto canon_from = canonicalize(f.from());
  SliceMorphism renamed(canon_from.instance, canon_to.instance,
                        compose(compose(inverse(canon_from.relabeling), f.map()), canon_to.relabeling));
  EXPECT_EQ(formula_key(renamed), formula_key(f));
  EXPECT_NE(formula_key(th.formula("succ")), formula_key(f));
  EXPECT_NE(formula_key(identity(f.to())), formula_key(identity(f.from())));
}

TEST(Search, GoalInTheoryAtDepthZero) {
  InjTheory th = seed::paths();
  SearchOptions o;
  o.depth = 0;
  auto r = bounded_entailment(th, th.formula("step"), o);
  ASSERT_EQ(r.status, Status::valid);
  EXPECT_EQ(r.proof->rule, Rule::axiom);
  EXPECT_EQ(r.rounds, 0u);
}

TEST(Search, CompositeGoalAtDepthOne) {
  InjTheory th = seed::paths();
  SearchOptions o;
  o.depth = 1;
  auto r = bounded_entailment(th, seed::composite_goal(), o);
  ASSERT_EQ(r.status, Status::valid);
  EXPECT_EQ(r.proof->rule, Rule::composition);
  EXPECT_EQ(r.proof->script(), std::vector<std::string>{"Composition"});
  EXPECT_TRUE(verify_derivation(*r.proof, th).empty());
}

TEST(Search, CoproductGoalFollowsTheScript) {
  InjTheory th = seed::paths();
  SearchOptions o;
  o.depth = 3;
  o.size_bound = 4;
  auto r = bounded_entailment(th, seed::coproduct_goal(), o);
  ASSERT_EQ(r.status, Status::valid) << r.reason;
  EXPECT_EQ(r.rounds, 3u);
  EXPECT_EQ(r.proof->script(), (std::vector<std::string>{"Pushout", "Pushout", "Composition"}));
  EXPECT_TRUE(verify_derivation(*r.proof, th).empty());
  EXPECT_TRUE(equivalent_formulas(r.proof->conclusion, seed::coproduct_goal()));
}

TEST(Search, UnreachableGoalIsUnknownNotRefuted) {
  SearchOptions o;
  o.depth = 1;
  auto r = bounded_entailment(seed::paths(), seed::unreachable_goal(), o);
  EXPECT_EQ(r.status, Status::unknown);
  EXPECT_EQ(r.proof, nullptr);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Search, EveryDerivedFormulaIsSoundAndVerifiable) {
  for (const InjTheory& th : {seed::paths(), seed::functional()}) {
    SearchOptions o;
    o.depth = 2;
    o.size_bound = 3;
    o.max_formulas = 150;
    auto r = derivable_formulas(th, o);
    ASSERT_GT(r.derived.size(), th.formulas().size());
    for (std::size_t b = 2; b <= 3; ++b) {
      ModelSet ms = theory_models(th, at(b));
      for (const auto& d : r.derived) {
        EXPECT_TRUE(verify_derivation(*d, th).empty());
        EXPECT_EQ(entails_on(ms, d->conclusion, kDefaultHomLimit).status, Status::valid);
      }
    }
  }
}

TEST(Search, DeterministicAcrossRuns) {
  SearchOptions o;
  o.depth = 2;
  o.max_formulas = 80;
  auto a = derivable_formulas(seed::functional(), o);
  auto b = derivable_formulas(seed::functional(), o);
  ASSERT_EQ(a.derived.size(), b.derived.size());
  for (std::size_t i = 0; i < a.derived.size(); ++i)
    EXPECT_EQ(a.derived[i]->conclusion, b.derived[i]->conclusion);
}

TEST(Search, RegularAndLiftingFormsAreDerivableAlike) {
  InjTheory th = seed::functional();
  SearchOptions o;
  o.depth = 1;
  for (const auto& [name, f] : th.formulas()) {
    semantics::Regular reg{f};
    SliceMorphism back = lifting_to_regular(regular_to_lifting(reg)).formula;
    EXPECT_EQ(back, f);
    EXPECT_EQ(bounded_entailment(th, f, o).status, bounded_entailment(th, back, o).status);
  }
}
