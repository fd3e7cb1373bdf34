#include "structcode/synthetic.hpp"

#include <algorithm>
#include <set>

#include "structcode/error.hpp"

namespace structcode {

namespace {

const std::vector<std::string>& words() {
  static const std::vector<std::string> w = {
      "water",  "bread",  "pies",   "plates", "oven",   "drawer", "table",  "knife",  "cup",    "tea",
      "kettle", "leaf",   "roots",  "soil",   "sun",    "light",  "sugar",  "milk",   "eggs",   "flour",
      "pan",    "bowl",   "spoon",  "door",   "car",    "keys",   "road",   "map",    "ticket", "train",
      "bag",    "shirt",  "shoes",  "paint",  "brush",  "wall",   "floor",  "dust",   "trash",  "box",
      "tape",   "paper",  "letter", "stamp",  "phone",  "email",  "friend", "party",  "cake",   "candle",
      "garden", "seeds",  "hose",   "grass",  "tree",   "branch", "rope",   "tent",   "fire",   "wood",
      "boil",   "pour",   "open",   "close",  "take",   "put",    "fill",   "serve",  "wash",   "dry",
      "cut",    "mix",    "stir",   "bake",   "cool",   "heat",   "carry",  "drive",  "walk",   "buy",
      "pack",   "fold",   "clean",  "plant",  "dig",    "read",   "write",  "call",   "send",   "wait",
      "quickly", "slowly", "warm",  "cold",   "fresh",  "large",  "small",  "clean",  "full",   "empty",
  };
  return w;
}

const std::vector<std::string>& relations() {
  static const std::vector<std::string> r = {
      "causes", "has context", "desires", "not desires", "capable of", "synonym of", "is a", "part of", "used for",
  };
  return r;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform_below(rng, v.size()))];
}

template <typename T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_below(rng, i))]);
}

// Unique labels, compared by sanitized form.
std::vector<std::string> distinct_labels(Rng& rng, std::size_t n, std::size_t min_words, std::size_t max_words) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string l = random_label(rng, min_words, max_words);
    if (seen.insert(sanitize_identifier(l)).second) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

std::string random_label(Rng& rng, std::size_t min_words, std::size_t max_words) {
  std::size_t n = min_words + static_cast<std::size_t>(uniform_below(rng, max_words - min_words + 1));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += pick(rng, words());
  }
  return out;
}

LabeledGraph random_dag(Rng& rng, std::size_t n, double extra_edge_prob) {
  LabeledGraph g;
  auto labels = distinct_labels(rng, n, 2, 4);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(Node{"n" + std::to_string(i), labels[i]});
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t j = 1; j < n; ++j) edges.emplace(static_cast<std::size_t>(uniform_below(rng, j)), j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < extra_edge_prob) edges.emplace(i, j);
  for (auto [s, d] : edges) g.edges.push_back(Edge{g.nodes[s].id, g.nodes[d].id, std::nullopt});
  shuffle(rng, g.nodes);
  shuffle(rng, g.edges);
  return g;
}

TaskInstance random_script(Rng& rng, const std::string& id, TaskKind task, std::size_t min_nodes,
                           std::size_t max_nodes) {
  if (task != TaskKind::ScriptGen && task != TaskKind::EdgePrediction)
    throw Error(ErrorCode::InvalidArgument, "random_script needs a script task");
  std::size_t n = min_nodes + static_cast<std::size_t>(uniform_below(rng, max_nodes - min_nodes + 1));
  TaskInstance inst;
  inst.id = id;
  inst.task = task;
  inst.input.goal = random_label(rng, 3, 5);
  LabeledGraph g = random_dag(rng, n);
  g.attrs["goal"] = inst.input.goal;
  if (task == TaskKind::EdgePrediction) inst.input.nodes = g.nodes;
  inst.gold = std::move(g);
  return inst;
}

TaskInstance random_explanation(Rng& rng, const std::string& id) {
  // Four concept labels; two grounded in the belief, two in the argument.
  auto concepts = distinct_labels(rng, 4 + static_cast<std::size_t>(uniform_below(rng, 3)), 1, 2);
  TaskInstance inst;
  inst.id = id;
  inst.task = TaskKind::ExplGraph;
  inst.input.belief = concepts[0] + " should involve " + concepts[1] + ".";
  inst.input.argument = concepts[2] + " leads to " + concepts[3] + ".";
  inst.input.stance = uniform_below(rng, 2) == 0 ? "support" : "counter";
  LabeledGraph g;
  for (const auto& c : concepts) g.nodes.push_back(Node{sanitize_identifier(c), c});
  // Random spanning DAG over a shuffled order, plus occasional extra edges.
  std::vector<std::size_t> order(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(rng, order);
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t j = 1; j < order.size(); ++j)
    edges.emplace(order[static_cast<std::size_t>(uniform_below(rng, j))], order[j]);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (uniform01(rng) < 0.15) edges.emplace(order[i], order[j]);
  for (auto [s, d] : edges) g.edges.push_back(Edge{g.nodes[s].id, g.nodes[d].id, pick(rng, relations())});
  shuffle(rng, g.edges);
  g.attrs["belief"] = inst.input.belief;
  g.attrs["argument"] = inst.input.argument;
  g.attrs["stance"] = inst.input.stance;
  inst.gold = std::move(g);
  return inst;
}

TaskInstance random_trace(Rng& rng, const std::string& id) {
  std::size_t n = 2 + static_cast<std::size_t>(uniform_below(rng, 4));
  std::size_t m = 1 + static_cast<std::size_t>(uniform_below(rng, 3));
  TaskInstance inst;
  inst.id = id;
  inst.task = TaskKind::EntityTracking;
  for (std::size_t i = 0; i < n; ++i) inst.input.actions.push_back(random_label(rng, 3, 6));
  inst.input.entities = distinct_labels(rng, m, 1, 1);
  EntityTrace t;
  t.actions = inst.input.actions;
  t.entities = inst.input.entities;
  std::vector<std::string> places = distinct_labels(rng, 4, 1, 1);
  auto draw = [&]() {
    switch (uniform_below(rng, 5)) {
      case 0: return StateValue::non_existent();
      case 1: return StateValue::unknown();
      default: return StateValue::known(pick(rng, places));
    }
  };
  std::vector<StateValue> row;
  for (std::size_t k = 0; k < m; ++k) row.push_back(draw());
  t.states.push_back(row);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k)
      if (uniform01(rng) < 0.5) row[k] = draw();
    t.states.push_back(row);
  }
  // A trace with no state change has no events and scores 0 even when
  // predicted exactly, so force one change in the first entity's column.
  bool changes = false;
  for (std::size_t i = 1; i <= n && !changes; ++i) changes = t.states[i] != t.states[0];
  if (!changes) {
    std::size_t step = 1 + static_cast<std::size_t>(uniform_below(rng, n));
    StateValue next = t.states[0][0].kind() == StateValue::Kind::NonExistent ? StateValue::known(places[0])
                                                                             : StateValue::non_existent();
    for (std::size_t i = step; i <= n; ++i) t.states[i][0] = next;
  }
  inst.gold = std::move(t);
  return inst;
}

std::vector<TaskInstance> synthetic_dataset(TaskKind task, std::size_t count, std::uint64_t seed,
                                            const std::string& prefix) {
  Rng rng(seed);
  std::vector<TaskInstance> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string id = prefix + std::to_string(i);
    switch (task) {
      case TaskKind::ScriptGen:
      case TaskKind::EdgePrediction: out.push_back(random_script(rng, id, task)); break;
      case TaskKind::ExplGraph: out.push_back(random_explanation(rng, id)); break;
      case TaskKind::EntityTracking: out.push_back(random_trace(rng, id)); break;
    }
  }
  return out;
}

}  // namespace structcode
