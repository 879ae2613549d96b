// Driver/Vehicle schema, sketch and instances shared by the test suites and
// the acceptance binary.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dcl/dcl.hpp"

namespace dv {

using namespace dcl;

inline Graph carrier() {
  return Graph({"Driver", "Vehicle", "Wheel", "VehType", "Licence", "String", "Date"},
               {Arrow{"drives", "Driver", "Vehicle"}, Arrow{"of", "Vehicle", "VehType"},
                Arrow{"lcdBy", "Driver", "Licence"}, Arrow{"covers", "Licence", "VehType"},
                Arrow{"has", "Vehicle", "Wheel"}, Arrow{"has_dr", "Vehicle", "Wheel"},
                Arrow{"name", "Driver", "String"}, Arrow{"bdate", "Driver", "Date"}});
}

inline GraphMorphism bind(const std::string& label, const Graph& g,
                          const std::map<std::string, std::string>& nodes,
                          const std::map<std::string, std::string>& arrows) {
  return GraphMorphism::from_ids(builtin_signature()->symbol(label).arity, g, nodes, arrows);
}

inline ConstraintDeclaration on_arrow(const std::string& id, const std::string& label,
                                      const Graph& g, const std::string& arrow) {
  return {id, label, arrow_binding(g, arrow)};
}

inline std::vector<ConstraintDeclaration> declarations(const Graph& g) {
  return {
      on_arrow("m_drives", "[0..1]", g, "drives"),
      on_arrow("m_of", "[1]", g, "of"),
      on_arrow("m_has", "[1..4,6]", g, "has"),
      on_arrow("m_has_dr", "[1,2,4]", g, "has_dr"),
      on_arrow("m_name", "[1]", g, "name"),
      on_arrow("m_bdate", "[1]", g, "bdate"),
      {"sub_wheels", "[=>]",
       bind("[=>]", g, {{"A", "Vehicle"}, {"B", "Wheel"}}, {{"r1", "has_dr"}, {"r2", "has"}})},
      {"key_driver", "[key]",
       bind("[key]", g, {{"K", "Driver"}, {"V1", "String"}, {"V2", "Date"}},
            {{"a1", "name"}, {"a2", "bdate"}})},
      {"safety", "[=>]4",
       bind("[=>]4", g, {{"A", "Driver"}, {"B", "Vehicle"}, {"C", "Licence"}, {"D", "VehType"}},
            {{"p1", "drives"}, {"p2", "of"}, {"q1", "lcdBy"}, {"q2", "covers"}})},
  };
}

inline Sketch sketch() { return Sketch(carrier(), builtin_signature(), declarations(carrier()), true); }

// The Vehicle/Wheel fragment and its inclusion into the full sketch.
inline Graph fragment_carrier() {
  return Graph({"Vehicle", "Wheel"},
               {Arrow{"has", "Vehicle", "Wheel"}, Arrow{"has_dr", "Vehicle", "Wheel"}});
}

inline GraphMorphism fragment_inclusion() {
  return GraphMorphism::from_ids(fragment_carrier(), carrier(),
                                 {{"Vehicle", "Vehicle"}, {"Wheel", "Wheel"}},
                                 {{"has", "has"}, {"has_dr", "has_dr"}});
}

inline Sketch fragment_sketch() {
  Graph g = fragment_carrier();
  return Sketch(g, builtin_signature(),
                {on_arrow("m_has", "[1..4,6]", g, "has"), on_arrow("m_has_dr", "[1,2,4]", g, "has_dr"),
                 {"sub_wheels", "[=>]",
                  bind("[=>]", g, {{"A", "Vehicle"}, {"B", "Wheel"}},
                       {{"r1", "has_dr"}, {"r2", "has"}})}},
                true);
}

inline SketchMorphism fragment_morphism() {
  return {fragment_inclusion(),
          {{"m_has", "m_has"}, {"m_has_dr", "m_has_dr"}, {"sub_wheels", "sub_wheels"}}};
}

// Instance builder: elements are typed by schema ids.
struct Builder {
  std::vector<std::string> nodes;
  std::vector<Arrow> arrows;
  std::map<std::string, std::string> ntype, atype;

  Builder& node(const std::string& id, const std::string& type) {
    nodes.push_back(id);
    ntype[id] = type;
    return *this;
  }
  Builder& link(const std::string& id, const std::string& type, const std::string& s,
                const std::string& t) {
    arrows.push_back(Arrow{id, s, t});
    atype[id] = type;
    return *this;
  }
  TypedInstance build(const Graph& schema = carrier()) const {
    return TypedInstance(GraphMorphism::from_ids(Graph(nodes, arrows), schema, ntype, atype));
  }
};

enum class Mutation { none, fifth_wheel, duplicate_key, uncovered_drive };

inline Builder valid_builder(Mutation m = Mutation::none) {
  Builder b;
  b.node("d1", "Driver").node("d2", "Driver").node("d3", "Driver");
  b.node("s_ann", "String").node("s_bob", "String").node("s_cid", "String");
  b.node("t1", "Date").node("t2", "Date");
  b.node("l1", "Licence").node("l2", "Licence");
  b.node("car", "VehType").node("truck", "VehType").node("bike", "VehType");
  b.node("v1", "Vehicle").node("v2", "Vehicle").node("v3", "Vehicle");
  for (int i = 1; i <= 12; ++i) b.node("w" + std::to_string(i), "Wheel");

  b.link("n1", "name", "d1", "s_ann").link("b1", "bdate", "d1", "t1");
  b.link("n2", "name", "d2", "s_bob").link("b2", "bdate", "d2", "t1");
  if (m == Mutation::duplicate_key) {
    b.link("n3", "name", "d3", "s_ann").link("b3", "bdate", "d3", "t1");
  } else {
    b.link("n3", "name", "d3", "s_cid").link("b3", "bdate", "d3", "t2");
  }
  b.link("lc1", "lcdBy", "d1", "l1").link("lc2", "lcdBy", "d2", "l2").link("lc3", "lcdBy", "d3", "l2");
  b.link("cv1", "covers", "l1", "car").link("cv2", "covers", "l1", "truck");
  b.link("cv3", "covers", "l2", "bike");
  b.link("o1", "of", "v1", "car").link("o2", "of", "v2", "truck").link("o3", "of", "v3", "bike");
  b.link("dr1", "drives", "d1", "v1").link("dr2", "drives", "d2", "v3");
  if (m == Mutation::uncovered_drive) b.link("dr3", "drives", "d3", "v1");

  // v1: 4 wheels, 2 driving; v2: 6 wheels, 4 driving; v3: 2 wheels, 1 driving.
  int h = 0;
  auto has = [&](const std::string& v, int w) {
    b.link("h" + std::to_string(++h), "has", v, "w" + std::to_string(w));
  };
  for (int w = 1; w <= 4; ++w) has("v1", w);
  for (int w = 5; w <= 10; ++w) has("v2", w);
  for (int w = 11; w <= 12; ++w) has("v3", w);
  if (m == Mutation::fifth_wheel) {
    b.node("w13", "Wheel");
    has("v1", 13);
  }
  int k = 0;
  auto drv = [&](const std::string& v, int w) {
    b.link("hd" + std::to_string(++k), "has_dr", v, "w" + std::to_string(w));
  };
  drv("v1", 1);
  drv("v1", 2);
  for (int w = 5; w <= 8; ++w) drv("v2", w);
  drv("v3", 11);
  return b;
}

inline TypedInstance instance(Mutation m = Mutation::none) { return valid_builder(m).build(); }

// Declaration each mutation targets.
inline std::string target_of(Mutation m) {
  switch (m) {
    case Mutation::fifth_wheel: return "m_has";
    case Mutation::duplicate_key: return "key_driver";
    case Mutation::uncovered_drive: return "safety";
    default: return "";
  }
}

}  // namespace dv
