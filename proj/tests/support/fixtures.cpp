#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace structcode;

namespace fixtures {

TaskInstance potpie(TaskKind task) {
  TaskInstance t;
  t.id = "potpie";
  t.task = task;
  t.input.goal = "serve the potpies on a plate";
  LabeledGraph g;
  const char* labels[] = {"take pies out to cool",        "open cabinet drawer",          "take out several plates",
                          "begin putting pies on plates", "fill pies onto plates evenly", "serve potpies on plate"};
  for (int i = 0; i < 6; ++i) g.nodes.push_back(Node{"s" + std::to_string(i), labels[i]});
  auto e = [&](int a, int b) { g.edges.push_back(Edge{"s" + std::to_string(a), "s" + std::to_string(b), {}}); };
  e(0, 2);
  e(1, 2);
  e(2, 3);
  e(2, 4);
  e(3, 5);
  e(4, 5);
  g.attrs["goal"] = t.input.goal;
  if (task == TaskKind::EdgePrediction) t.input.nodes = g.nodes;
  t.gold = g;
  return t;
}

TaskInstance factory_farming() {
  TaskInstance t;
  t.id = "factory_farming";
  t.task = TaskKind::ExplGraph;
  t.input.belief = "factory farming should not be banned.";
  t.input.argument = "Factory farming feeds millions.";
  t.input.stance = "support";
  LabeledGraph g;
  for (const char* l : {"factory farming", "millions", "food", "necessary", "banned"})
    g.nodes.push_back(Node{sanitize_identifier(l), l});
  auto e = [&](const char* a, const char* rel, const char* b) { g.edges.push_back(Edge{a, b, std::string(rel)}); };
  e("factory_farming", "causes", "food");
  e("factory_farming", "has context", "necessary");
  e("food", "has context", "necessary");
  e("necessary", "not desires", "banned");
  e("millions", "desires", "food");
  g.attrs["belief"] = t.input.belief;
  g.attrs["argument"] = t.input.argument;
  g.attrs["stance"] = t.input.stance;
  t.gold = g;
  return t;
}

TaskInstance photosynthesis() {
  TaskInstance t;
  t.id = "photosynthesis";
  t.task = TaskKind::EntityTracking;
  t.input.actions = {"Roots absorb water from soil", "The water flows to the leaf"};
  t.input.entities = {"water", "light", "CO2"};
  EntityTrace tr;
  tr.actions = t.input.actions;
  tr.entities = t.input.entities;
  auto k = [](const char* s) { return StateValue::known(s); };
  tr.states = {{k("soil"), k("sun"), StateValue::non_existent()},
               {k("roots"), k("sun"), StateValue::unknown()},
               {k("leaf"), k("sun"), StateValue::unknown()}};
  t.gold = tr;
  return t;
}

std::string golden_path(const std::string& name) { return std::string(STRUCTCODE_GOLDEN_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
