// Workspace files: kind-tagged JSON for every object, with references to
// other files ("file.json") or to named objects ("file.json#name", "#name").
// Decoding errors carry the file and the JSON pointer of the offending value.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcl/injectivity_logic.hpp"
#include "dcl/satisfaction.hpp"
#include "dcl/serialize.hpp"
#include "dcl/signature.hpp"
#include "dcl/sketch.hpp"
#include "dcl/slice.hpp"

namespace dcl::io {

class InputError : public Error {
 public:
  using Error::Error;
};

namespace fs = std::filesystem;

// A JSON value together with where it came from.
struct Node {
  std::shared_ptr<const json> doc;
  const json* value = nullptr;
  std::string file;
  std::string pointer;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(file + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
  }
  const json& operator*() const { return *value; }
  const json* operator->() const { return value; }

  bool has(const std::string& key) const { return value->is_object() && value->contains(key); }
  Node at(const std::string& key) const {
    if (!value->is_object()) fail("expected an object");
    auto it = value->find(key);
    if (it == value->end()) fail("missing key '" + key + "'");
    return {doc, &*it, file, pointer + "/" + key};
  }
  Node at(std::size_t i) const { return {doc, &(*value)[i], file, pointer + "/" + std::to_string(i)}; }

  std::string str() const {
    if (!value->is_string()) fail("expected a string");
    return value->get<std::string>();
  }
  std::string str(const std::string& key) const { return at(key).str(); }
  std::string str_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? str(key) : dflt;
  }
  bool boolean_or(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    Node n = at(key);
    if (!n->is_boolean()) n.fail("expected a boolean");
    return n->get<bool>();
  }
  std::size_t size() const {
    if (!value->is_array()) fail("expected an array");
    return value->size();
  }
  std::map<std::string, std::string> string_map() const {
    if (!value->is_object()) fail("expected an object of strings");
    std::map<std::string, std::string> out;
    for (auto it = value->begin(); it != value->end(); ++it) {
      if (!it->is_string()) Node{doc, &*it, file, pointer + "/" + it.key()}.fail("expected a string");
      out[it.key()] = it->get<std::string>();
    }
    return out;
  }
};

// Parses a file, mapping syntax errors to line and column.
inline std::shared_ptr<const json> parse_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return std::make_shared<const json>(json::parse(text));
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": malformed JSON: " + e.what());
  }
}

class Loader {
 public:
  Node load(const std::string& path) {
    auto doc = document(fs::path(path));
    return Node{doc, doc.get(), path, ""};
  }

  Node parse_text(const std::string& text, const std::string& name = "<input>") {
    try {
      auto doc = std::make_shared<const json>(json::parse(text));
      return Node{doc, doc.get(), name, ""};
    } catch (const json::parse_error& e) {
      throw InputError(name + ": malformed JSON: " + e.what());
    }
  }

  // Follows references until an inline value is reached.
  Node resolve(Node n) {
    for (int hops = 0; n->is_string() || (n->is_object() && n->contains("ref")); ++hops) {
      if (hops > 32) n.fail("reference chain too long");
      std::string ref = n->is_string() ? n.str() : n.str("ref");
      n = follow(n, ref);
    }
    return n;
  }

 private:
  std::shared_ptr<const json> document(const fs::path& p) {
    std::string key = fs::weakly_canonical(p).string();
    auto it = docs_.find(key);
    if (it != docs_.end()) return it->second;
    auto doc = parse_file(p);
    docs_.emplace(key, doc);
    return doc;
  }

  Node follow(const Node& from, const std::string& ref) {
    auto hash = ref.find('#');
    std::string path = ref.substr(0, hash);
    std::string name = hash == std::string::npos ? "" : ref.substr(hash + 1);
    Node target = from;
    if (!path.empty()) {
      fs::path base = fs::path(from.file).parent_path();
      fs::path p = base / path;
      std::shared_ptr<const json> doc;
      try {
        doc = document(p);
      } catch (const InputError& e) {
        from.fail(std::string("unresolved reference '") + ref + "': " + e.what());
      }
      target = Node{doc, doc.get(), p.lexically_normal().string(), ""};
    } else {
      target = Node{from.doc, from.doc.get(), from.file, ""};
    }
    if (name.empty()) return target;
    if (!target.has("objects")) from.fail("reference '" + ref + "' names an object, but the file has no objects");
    Node objs = target.at("objects");
    if (!objs.has(name)) from.fail("unresolved reference '" + ref + "'");
    return objs.at(name);
  }

  std::map<std::string, std::shared_ptr<const json>> docs_;
};

// ---------------------------------------------------------------------------
// Decoding.

class Reader {
 public:
  explicit Reader(Loader& loader) : L_(loader) {}

  Graph graph(Node n) {
    n = open(n, "graph");
    return guarded(n, [&] {
      std::vector<std::string> nodes;
      Node ns = n.at("nodes");
      for (std::size_t i = 0; i < ns.size(); ++i) nodes.push_back(ns.at(i).str());
      std::vector<Arrow> arrows;
      if (n.has("arrows")) {
        Node as = n.at("arrows");
        for (std::size_t i = 0; i < as.size(); ++i) {
          Node a = as.at(i);
          arrows.push_back(Arrow{a.str("id"), a.str("src"), a.str("tgt")});
        }
      }
      return Graph(std::move(nodes), std::move(arrows));
    });
  }

  // Endpoints may be given inline or implied by the context; when both are
  // present they must agree.
  GraphMorphism morphism(Node n, const Graph* dom = nullptr, const Graph* cod = nullptr) {
    n = open(n, "morphism");
    Graph d = endpoint(n, "dom", dom);
    Graph c = endpoint(n, "cod", cod);
    return tables(n, d, c);
  }

  TypedInstance instance(Node n, const Graph* schema = nullptr) {
    n = open(n, "instance");
    Graph s = endpoint(n, "schema", schema);
    Graph x = graph(n.at("carrier"));
    Node t = n.at("typing");
    return guarded(t, [&] { return TypedInstance(morphism(t, &x, &s)); });
  }

  SliceMorphism slice_morphism(Node n, const Graph* schema = nullptr) {
    n = open(n, "slice_morphism");
    TypedInstance from = instance(n.at("from"), schema);
    TypedInstance to = instance(n.at("to"), &from.schema());
    Node m = n.at("map");
    return guarded(n, [&] { return SliceMorphism(from, to, morphism(m, &from.carrier(), &to.carrier())); });
  }

  Delta delta(Node n, const Graph* schema = nullptr) {
    n = open(n, "delta");
    TypedInstance source = instance(n.at("source"), schema);
    TypedInstance target = instance(n.at("target"), &source.schema());
    TypedInstance apex = instance(n.at("apex"), &source.schema());
    Node l = n.at("left"), r = n.at("right");
    return guarded(n, [&] {
      return Delta(SliceMorphism(apex, source, morphism(l, &apex.carrier(), &source.carrier())),
                   SliceMorphism(apex, target, morphism(r, &apex.carrier(), &target.carrier())));
    });
  }

  std::shared_ptr<const Signature> signature(Node n) {
    if (n->is_string() && n.str() == "builtin") return builtin_signature();
    n = open(n, "signature");
    auto sig = std::make_shared<Signature>();
    if (n.has("extends")) {
      Node e = n.at("extends");
      *sig = *signature(e);
    }
    if (n.has("symbols")) {
      Node ss = n.at("symbols");
      for (std::size_t i = 0; i < ss.size(); ++i) {
        Node s = ss.at(i);
        ConstraintSymbol c{s.str("name"), graph(s.at("arity")), {}};
        c.semantics = semantics_of(s.at("semantics"), c.arity);
        guarded(s, [&] { sig->add_symbol(std::move(c)); return 0; });
      }
    }
    if (n.has("dependencies")) {
      Node ds = n.at("dependencies");
      for (std::size_t i = 0; i < ds.size(); ++i) {
        Node d = ds.at(i);
        std::string from = d.str("from"), to = d.str("to");
        guarded(d, [&] {
          const Graph& a_to = sig->symbol(to).arity;
          const Graph& a_from = sig->symbol(from).arity;
          sig->add_dependency({d.str("id"), from, to, morphism(d.at("arity_map"), &a_to, &a_from)});
          return 0;
        });
      }
    }
    return sig;
  }

  Sketch sketch(Node n) {
    n = open(n, "sketch");
    Graph carrier = graph(n.at("carrier"));
    auto sig = signature(n.has("signature") ? n.at("signature") : Node{nullptr, &builtin_ref(), n.file, n.pointer});
    std::vector<ConstraintDeclaration> decls;
    if (n.has("declarations")) {
      Node ds = n.at("declarations");
      for (std::size_t i = 0; i < ds.size(); ++i) {
        Node d = ds.at(i);
        std::string label = d.str("label");
        const Graph* arity = guarded(d, [&] { return &sig->symbol(label).arity; });
        decls.push_back({d.str("id"), label, morphism(d.at("binding"), arity, &carrier)});
      }
    }
    bool closed = n.boolean_or("closed", false);
    return guarded(n, [&] { return Sketch(carrier, sig, std::move(decls), closed); });
  }

  struct SketchMap {
    Sketch source;
    Sketch target;
    SketchMorphism map;
  };

  SketchMap sketch_morphism(Node n) {
    n = open(n, "sketch_morphism");
    Sketch s = sketch(n.at("dom"));
    Sketch t = sketch(n.at("cod"));
    GraphMorphism g = tables(n, s.carrier(), t.carrier());
    SketchMorphism m{g, n.has("decls") ? n.at("decls").string_map() : std::map<std::string, std::string>{}};
    auto problems = check_sketch_morphism(m, s, t);
    if (!problems.empty()) n.fail("not a sketch morphism: " + problems.front());
    return {std::move(s), std::move(t), std::move(m)};
  }

  InjTheory theory(Node n) {
    n = open(n, "theory");
    Node amb = n.at("ambient");
    std::string kind = amb.str("kind");
    if (kind != "graph" && kind != "slice") amb.at("kind").fail("ambient kind must be graph or slice");
    InjTheory th = kind == "graph" ? InjTheory::plain_graphs() : InjTheory(graph(amb.at("over")));
    if (n.has("formulas")) {
      Node fs = n.at("formulas");
      if (!fs->is_object()) fs.fail("expected an object of formulas");
      for (auto it = fs->begin(); it != fs->end(); ++it) {
        Node f = fs.at(it.key());
        SliceMorphism phi = formula(f, th);
        guarded(f, [&] { th.add(it.key(), phi); return 0; });
      }
    }
    return th;
  }

  // A formula of the theory's ambient: a plain morphism for the plain-graph
  // ambient, a slice morphism otherwise.
  SliceMorphism formula(Node n, const InjTheory& th) {
    Node r = L_.resolve(n);
    std::string kind = r.str_or("kind", th.plain() ? "morphism" : "slice_morphism");
    if (kind == "morphism") {
      if (!th.plain()) r.fail("a plain morphism needs the plain-graph ambient");
      GraphMorphism m = morphism(r);
      return guarded(r, [&] { return th.lift(m); });
    }
    if (kind != "slice_morphism") r.fail("expected a formula, found kind '" + kind + "'");
    SliceMorphism f = slice_morphism(r, &th.ambient());
    if (!(f.to().schema() == th.ambient())) r.fail("formula does not live over the ambient");
    return f;
  }

  DerivationPtr derivation(Node n, const InjTheory& th) {
    n = open(n, "derivation");
    auto d = std::make_shared<Derivation>();
    d->rule = guarded(n.at("rule"), [&] { return rule_from_string(n.str("rule")); });
    d->conclusion = formula(n.at("conclusion"), th);
    if (n.has("premises")) {
      Node ps = n.at("premises");
      for (std::size_t i = 0; i < ps.size(); ++i) d->premises.push_back(derivation(ps.at(i), th));
    }
    d->axiom = n.str_or("axiom", "");
    if (n.has("side")) d->side = formula(n.at("side"), th);
    d->macro = n.str_or("macro", "");
    return d;
  }

 private:
  static const json& builtin_ref() {
    static const json j = "builtin";
    return j;
  }

  Node open(Node n, const std::string& kind) {
    n = L_.resolve(n);
    if (!n->is_object()) n.fail("expected a " + kind + " object");
    if (n.has("kind") && n.str("kind") != kind) {
      n.fail("expected kind '" + kind + "', found '" + n.str("kind") + "'");
    }
    return n;
  }

  GraphMorphism tables(const Node& n, const Graph& d, const Graph& c) {
    return guarded(n, [&] {
      auto nodes = n.has("nodes") ? n.at("nodes").string_map() : std::map<std::string, std::string>{};
      auto arrows = n.has("arrows") ? n.at("arrows").string_map() : std::map<std::string, std::string>{};
      return GraphMorphism::from_ids(d, c, nodes, arrows);
    });
  }

  Graph endpoint(const Node& n, const std::string& key, const Graph* implied) {
    if (!n.has(key)) {
      if (!implied) n.fail("missing key '" + key + "'");
      return *implied;
    }
    Graph g = graph(n.at(key));
    if (implied && !(g == *implied)) n.at(key).fail(key + " differs from the expected graph " + describe(*implied));
    return g;
  }

  template <class F>
  auto guarded(const Node& n, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      n.fail(e.what());
    }
  }

  Semantics semantics_of(Node n, const Graph& arity) {
    std::string kind = n.str("kind");
    auto role = [&](const std::string& key, const std::string& dflt) { return n.str_or(key, dflt); };
    if (kind == "multiplicity") {
      std::vector<Interval> iv;
      Node is = n.at("intervals");
      for (std::size_t i = 0; i < is.size(); ++i) {
        Node p = is.at(i);
        if (!p->is_array() || p->size() != 2 || !(*p)[0].is_number_unsigned() ||
            !((*p)[1].is_number_unsigned() || (*p)[1].is_null())) {
          p.fail("an interval is [lo, hi] with hi a count or null");
        }
        Interval v{(*p)[0].get<std::size_t>(), std::nullopt};
        if (!(*p)[1].is_null()) v.hi = (*p)[1].get<std::size_t>();
        iv.push_back(v);
      }
      return semantics::Multiplicity{std::move(iv), role("arrow", "r")};
    }
    if (kind == "key") {
      std::vector<std::string> attrs;
      Node as = n.at("attributes");
      for (std::size_t i = 0; i < as.size(); ++i) attrs.push_back(as.at(i).str());
      return semantics::Key{std::move(attrs)};
    }
    if (kind == "subset") return semantics::Subset{role("sub", "r1"), role("sup", "r2")};
    if (kind == "composite_subset4") {
      return semantics::CompositeSubset4{role("p1", "p1"), role("p2", "p2"), role("q1", "q1"), role("q2", "q2")};
    }
    if (kind == "commutativity") {
      return semantics::Commutativity{role("p1", "p1"), role("p2", "p2"), role("q1", "q1"), role("q2", "q2")};
    }
    if (kind == "jointly_monic") return semantics::JointlyMonic{role("leg1", "01"), role("leg2", "02")};
    if (kind == "regular") return semantics::Regular{slice_morphism(n.at("formula"), &arity)};
    if (kind == "lifting") {
      GraphMorphism nn = morphism(n.at("n"), nullptr, &arity);
      GraphMorphism m = morphism(n.at("m"), nullptr, &nn.dom());
      return semantics::Lifting{std::move(m), std::move(nn)};
    }
    if (kind == "table") {
      std::vector<semantics::TableEntry> entries;
      Node es = n.at("entries");
      for (std::size_t i = 0; i < es.size(); ++i) {
        Node e = es.at(i);
        entries.push_back({e.str("id"), instance(e.at("instance"), &arity)});
      }
      return guarded(n, [&] { return Semantics(make_table(arity, std::move(entries))); });
    }
    n.at("kind").fail("unknown semantics kind '" + kind + "'");
  }

  Loader& L_;
};

// ---------------------------------------------------------------------------
// Encoding. Every object carries its kind; keys come out sorted.

inline json write(const Graph& g) {
  json j = to_json(g);
  j["kind"] = "graph";
  return j;
}

inline json write(const GraphMorphism& f) {
  json j = maps_to_json(f);
  j["kind"] = "morphism";
  j["dom"] = write(f.dom());
  j["cod"] = write(f.cod());
  return j;
}

inline json write(const TypedInstance& t) {
  return {{"kind", "instance"},
          {"schema", write(t.schema())},
          {"carrier", write(t.carrier())},
          {"typing", maps_to_json(t.typing())}};
}

inline json write(const SliceMorphism& f) {
  return {{"kind", "slice_morphism"}, {"from", write(f.from())}, {"to", write(f.to())}, {"map", maps_to_json(f.map())}};
}

inline json write(const Delta& d) {
  return {{"kind", "delta"},
          {"source", write(d.source())},
          {"target", write(d.target())},
          {"apex", write(d.apex())},
          {"left", maps_to_json(d.left().map())},
          {"right", maps_to_json(d.right().map())}};
}

inline json write(const Semantics& s) {
  return std::visit(
      [](const auto& sem) -> json {
        using T = std::decay_t<decltype(sem)>;
        if constexpr (std::is_same_v<T, semantics::Multiplicity>) {
          json iv = json::array();
          for (const auto& i : sem.intervals) iv.push_back({i.lo, i.hi ? json(*i.hi) : json(nullptr)});
          return {{"kind", "multiplicity"}, {"intervals", iv}, {"arrow", sem.arrow}};
        } else if constexpr (std::is_same_v<T, semantics::Key>) {
          return {{"kind", "key"}, {"attributes", sem.attributes}};
        } else if constexpr (std::is_same_v<T, semantics::Subset>) {
          return {{"kind", "subset"}, {"sub", sem.sub}, {"sup", sem.sup}};
        } else if constexpr (std::is_same_v<T, semantics::CompositeSubset4>) {
          return {{"kind", "composite_subset4"}, {"p1", sem.p1}, {"p2", sem.p2}, {"q1", sem.q1}, {"q2", sem.q2}};
        } else if constexpr (std::is_same_v<T, semantics::Commutativity>) {
          return {{"kind", "commutativity"}, {"p1", sem.p1}, {"p2", sem.p2}, {"q1", sem.q1}, {"q2", sem.q2}};
        } else if constexpr (std::is_same_v<T, semantics::JointlyMonic>) {
          return {{"kind", "jointly_monic"}, {"leg1", sem.leg1}, {"leg2", sem.leg2}};
        } else if constexpr (std::is_same_v<T, semantics::Regular>) {
          return {{"kind", "regular"}, {"formula", write(sem.formula)}};
        } else if constexpr (std::is_same_v<T, semantics::Lifting>) {
          return {{"kind", "lifting"}, {"m", write(sem.m)}, {"n", write(sem.n)}};
        } else {
          json es = json::array();
          for (const auto& e : sem.entries) es.push_back({{"id", e.id}, {"instance", write(e.instance)}});
          return {{"kind", "table"}, {"entries", es}};
        }
      },
      s);
}

inline json write(const Signature& sig) {
  json syms = json::array();
  for (const auto& [name, c] : sig.symbols()) {
    syms.push_back({{"name", name}, {"arity", write(c.arity)}, {"semantics", write(c.semantics)}});
  }
  json deps = json::array();
  for (const auto& d : sig.dependencies()) {
    deps.push_back({{"id", d.id}, {"from", d.from}, {"to", d.to}, {"arity_map", write(d.arity_map)}});
  }
  return {{"kind", "signature"}, {"symbols", syms}, {"dependencies", deps}};
}

inline json write_signature_ref(const std::shared_ptr<const Signature>& sig) {
  if (sig == builtin_signature()) return "builtin";
  return write(*sig);
}

inline json write(const ConstraintDeclaration& d) {
  return {{"id", d.id}, {"label", d.label}, {"binding", maps_to_json(d.binding)}};
}

inline json write(const Sketch& s) {
  json decls = json::array();
  for (const auto& d : s.declarations()) decls.push_back(write(d));
  return {{"kind", "sketch"},
          {"carrier", write(s.carrier())},
          {"signature", write_signature_ref(s.signature_ptr())},
          {"declarations", decls},
          {"closed", s.closed()}};
}

inline json write(const SketchMorphism& f, const Sketch& source, const Sketch& target) {
  json j = maps_to_json(f.graph_map);
  j["kind"] = "sketch_morphism";
  j["dom"] = write(source);
  j["cod"] = write(target);
  j["decls"] = f.decl_map;
  return j;
}

inline json write_formula(const SliceMorphism& f, const InjTheory& th) {
  return th.plain() ? write(f.map()) : write(f);
}

inline json write(const InjTheory& th) {
  json formulas = json::object();
  for (const auto& [name, f] : th.formulas()) formulas[name] = write_formula(f, th);
  json ambient = th.plain() ? json{{"kind", "graph"}} : json{{"kind", "slice"}, {"over", write(th.ambient())}};
  return {{"kind", "theory"}, {"ambient", ambient}, {"formulas", formulas}};
}

inline json write(const Derivation& d, const InjTheory& th) {
  json j = {{"kind", "derivation"}, {"rule", to_string(d.rule)}, {"conclusion", write_formula(d.conclusion, th)}};
  json ps = json::array();
  for (const auto& p : d.premises) ps.push_back(write(*p, th));
  j["premises"] = ps;
  if (!d.axiom.empty()) j["axiom"] = d.axiom;
  if (d.side) j["side"] = write_formula(*d.side, th);
  if (!d.macro.empty()) j["macro"] = d.macro;
  return j;
}

inline json write(const Verdict& v, const std::string& label) {
  json j = {{"id", v.declaration}, {"label", label}, {"status", to_string(v.status)}};
  j["evidence"] = v.evidence ? json{{"restricted", write(v.evidence->restricted)}, {"witness", v.evidence->witness}}
                             : json(nullptr);
  j["counterexample"] = v.counterexample ? json{{"restricted", write(v.counterexample->restricted)},
                                                {"offending", v.counterexample->offending},
                                                {"witness", v.counterexample->witness}}
                                         : json(nullptr);
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

inline json write(const ValidationReport& r, const Sketch& s, const std::string& sketch_name,
                  const std::string& instance_name) {
  json decls = json::array();
  for (const auto& v : r.verdicts) decls.push_back(write(v, s.declaration(v.declaration).label));
  return {{"kind", "report"},
          {"sketch", sketch_name},
          {"instance", instance_name},
          {"declarations", decls},
          {"overall", to_string(r.overall)}};
}

}  // namespace dcl::io
