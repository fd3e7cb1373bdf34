#include "structcode/dataset.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "structcode/error.hpp"

namespace structcode {

using json = nlohmann::ordered_json;

std::string state_cell(const StateValue& v) {
  switch (v.kind()) {
    case StateValue::Kind::NonExistent: return "-";
    case StateValue::Kind::Unknown: return "?";
    case StateValue::Kind::Known: return v.location();
  }
  return "-";
}

StateValue parse_state_cell(std::string_view cell) {
  if (cell == "-") return StateValue::non_existent();
  if (cell == "?") return StateValue::unknown();
  return StateValue::known(std::string(cell));
}

namespace {

class Reader {
 public:
  Reader(const json& j, int line) : j_(j), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_) + ": field '" + field + "': " + what, line_)
        .with_field(field);
  }

  bool has(const char* field) const { return j_.contains(field) && !j_.at(field).is_null(); }

  const json& at(const char* field) const {
    if (!has(field)) fail(field, "missing");
    return j_.at(field);
  }

  std::string text(const char* field, bool allow_empty = false) const {
    const json& v = at(field);
    if (!v.is_string()) fail(field, "expected a string");
    std::string s = v.get<std::string>();
    if (!allow_empty && s.find_first_not_of(" \t\r\n") == std::string::npos) fail(field, "empty");
    return s;
  }

  std::vector<std::string> texts(const char* field) const {
    const json& v = at(field);
    if (!v.is_array() || v.empty()) fail(field, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(field, "expected a non-empty array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  std::vector<Node> nodes() const {
    const json& v = at("nodes");
    if (!v.is_array()) fail("nodes", "expected an array");
    std::vector<Node> out;
    for (const auto& n : v) {
      if (!n.is_object() || !n.contains("id") || !n.contains("label") || !n["id"].is_string() ||
          !n["label"].is_string())
        fail("nodes", "each node needs string \"id\" and \"label\"");
      out.push_back(Node{n["id"].get<std::string>(), n["label"].get<std::string>()});
      if (out.back().label.find_first_not_of(" \t\r\n") == std::string::npos) fail("nodes", "empty label");
    }
    return out;
  }

  std::vector<std::vector<std::string>> tuples(const char* field, std::size_t arity) const {
    const json& v = at(field);
    if (!v.is_array()) fail(field, "expected an array");
    std::vector<std::vector<std::string>> out;
    for (const auto& t : v) {
      if (!t.is_array() || t.size() != arity) fail(field, "expected " + std::to_string(arity) + "-element arrays");
      std::vector<std::string> row;
      for (const auto& x : t) {
        if (!x.is_string()) fail(field, "expected strings");
        row.push_back(x.get<std::string>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  const json& j_;
  int line_;
};

TaskInstance read_script(const Reader& r, TaskKind task) {
  TaskInstance inst;
  inst.task = task;
  inst.input.goal = r.text("goal");
  bool has_nodes = r.has("nodes");
  std::vector<Node> nodes;
  if (has_nodes) nodes = r.nodes();
  if (task == TaskKind::EdgePrediction) {
    if (!has_nodes || nodes.empty()) r.fail("nodes", "edge prediction needs a non-empty node set");
    inst.input.nodes = nodes;
  }
  if (r.has("edges")) {
    if (!has_nodes) r.fail("nodes", "missing");
    LabeledGraph g;
    g.nodes = nodes;
    for (auto& t : r.tuples("edges", 2)) g.edges.push_back(Edge{t[0], t[1], std::nullopt});
    for (const auto& v : validate_graph(g)) {
      if (v.kind == ViolationKind::DuplicateId) r.fail("nodes", "duplicate node id '" + v.id + "'");
      if (v.kind == ViolationKind::DanglingEdge) r.fail("edges", "edge " + v.src + " -> " + v.dst + " names a missing node");
    }
    g.attrs["goal"] = inst.input.goal;
    inst.gold = std::move(g);
  }
  return inst;
}

TaskInstance read_expl(const Reader& r) {
  TaskInstance inst;
  inst.task = TaskKind::ExplGraph;
  inst.input.belief = r.text("belief");
  inst.input.argument = r.text("argument");
  inst.input.stance = r.text("stance");
  if (inst.input.stance != "support" && inst.input.stance != "counter") r.fail("stance", "must be support or counter");
  if (r.has("edges")) {
    LabeledGraph g;
    std::map<std::string, std::string> ids;  // sanitized label -> id
    auto node = [&](const std::string& label) {
      std::string id;
      try {
        id = sanitize_identifier(label);
      } catch (const Error&) {
        r.fail("edges", "node label '" + label + "' has no alphanumeric characters");
      }
      if (ids.emplace(id, id).second) g.nodes.push_back(Node{id, label});
      return id;
    };
    for (auto& t : r.tuples("edges", 3)) {
      std::string s = node(t[0]);
      std::string d = node(t[2]);
      if (t[1].find_first_not_of(" \t") == std::string::npos) r.fail("edges", "empty relation");
      g.edges.push_back(Edge{s, d, t[1]});
    }
    if (g.nodes.empty()) r.fail("edges", "no edges");
    g.attrs["belief"] = inst.input.belief;
    g.attrs["argument"] = inst.input.argument;
    g.attrs["stance"] = inst.input.stance;
    inst.gold = std::move(g);
  }
  return inst;
}

TaskInstance read_propara(const Reader& r) {
  TaskInstance inst;
  inst.task = TaskKind::EntityTracking;
  inst.input.actions = r.texts("actions");
  inst.input.entities = r.texts("entities");
  if (r.has("states")) {
    EntityTrace t;
    t.actions = inst.input.actions;
    t.entities = inst.input.entities;
    const json& rows = r.at("states");
    if (!rows.is_array() || rows.size() != t.actions.size() + 1)
      r.fail("states", "expected " + std::to_string(t.actions.size() + 1) + " rows");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != t.entities.size())
        r.fail("states", "expected " + std::to_string(t.entities.size()) + " cells per row");
      std::vector<StateValue> cells;
      for (const auto& c : row) {
        if (!c.is_string()) r.fail("states", "cells must be strings");
        try {
          cells.push_back(parse_state_cell(c.get<std::string>()));
        } catch (const Error&) {
          r.fail("states", "empty location");
        }
      }
      t.states.push_back(std::move(cells));
    }
    inst.gold = std::move(t);
  }
  return inst;
}

}  // namespace

std::vector<TaskInstance> read_dataset(std::istream& in, TaskKind task) {
  std::vector<TaskInstance> out;
  std::map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": invalid JSON: " + e.what(), line_no);
    }
    if (!j.is_object())
      throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": expected a JSON object", line_no);
    Reader r(j, line_no);
    std::string id = r.text("id");
    TaskInstance inst;
    switch (task) {
      case TaskKind::ScriptGen:
      case TaskKind::EdgePrediction: inst = read_script(r, task); break;
      case TaskKind::ExplGraph: inst = read_expl(r); break;
      case TaskKind::EntityTracking: inst = read_propara(r); break;
    }
    inst.id = id;
    if (auto [it, fresh] = seen.emplace(id, line_no); !fresh)
      r.fail("id", "duplicate id '" + id + "' (first on line " + std::to_string(it->second) + ")");
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TaskInstance> load_dataset(const std::string& path, TaskKind task) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open dataset '" + path + "'");
  return read_dataset(in, task);
}

namespace {

json graph_edges_json(const LabeledGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges) {
    if (e.relation) edges.push_back(json::array({e.src, *e.relation, e.dst}));
    else edges.push_back(json::array({e.src, e.dst}));
  }
  return edges;
}

json nodes_json(const std::vector<Node>& nodes) {
  json out = json::array();
  for (const auto& n : nodes) out.push_back(json{{"id", n.id}, {"label", n.label}});
  return out;
}

json states_json(const EntityTrace& t) {
  json rows = json::array();
  for (const auto& row : t.states) {
    json cells = json::array();
    for (const auto& c : row) cells.push_back(state_cell(c));
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string instance_to_json(const TaskInstance& inst) {
  json j;
  j["id"] = inst.id;
  switch (inst.task) {
    case TaskKind::ScriptGen:
    case TaskKind::EdgePrediction: {
      j["goal"] = inst.input.goal;
      const LabeledGraph* g = inst.gold ? std::get_if<LabeledGraph>(&*inst.gold) : nullptr;
      if (g) {
        j["nodes"] = nodes_json(g->nodes);
        j["edges"] = graph_edges_json(*g);
      } else if (!inst.input.nodes.empty()) {
        j["nodes"] = nodes_json(inst.input.nodes);
      }
      break;
    }
    case TaskKind::ExplGraph: {
      j["belief"] = inst.input.belief;
      j["argument"] = inst.input.argument;
      j["stance"] = inst.input.stance;
      if (inst.gold) {
        const auto& g = std::get<LabeledGraph>(*inst.gold);
        json edges = json::array();
        for (const auto& e : g.edges)
          edges.push_back(json::array({g.find(e.src)->label, e.relation.value_or(""), g.find(e.dst)->label}));
        j["edges"] = std::move(edges);
      }
      break;
    }
    case TaskKind::EntityTracking: {
      j["actions"] = inst.input.actions;
      j["entities"] = inst.input.entities;
      if (inst.gold) j["states"] = states_json(std::get<EntityTrace>(*inst.gold));
      break;
    }
  }
  return j.dump();
}

void write_dataset(std::ostream& out, const std::vector<TaskInstance>& instances) {
  for (const auto& inst : instances) out << instance_to_json(inst) << '\n';
}

std::string structure_to_json(const Structure& s) {
  json j;
  if (const auto* g = std::get_if<LabeledGraph>(&s)) {
    j["nodes"] = nodes_json(g->nodes);
    j["edges"] = graph_edges_json(*g);
    if (!g->attrs.empty()) j["attrs"] = g->attrs;
  } else {
    const auto& t = std::get<EntityTrace>(s);
    j["actions"] = t.actions;
    j["entities"] = t.entities;
    j["states"] = states_json(t);
  }
  return j.dump();
}

Structure structure_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("invalid structure JSON: ") + e.what());
  }
  try {
    if (j.contains("states")) {
      EntityTrace t;
      t.actions = j.at("actions").get<std::vector<std::string>>();
      t.entities = j.at("entities").get<std::vector<std::string>>();
      for (const auto& row : j.at("states")) {
        std::vector<StateValue> cells;
        for (const auto& c : row) cells.push_back(parse_state_cell(c.get<std::string>()));
        t.states.push_back(std::move(cells));
      }
      return t;
    }
    LabeledGraph g;
    for (const auto& n : j.at("nodes")) g.nodes.push_back(Node{n.at("id"), n.at("label")});
    for (const auto& e : j.at("edges")) {
      if (e.size() == 3) g.edges.push_back(Edge{e[0], e[2], e[1].get<std::string>()});
      else g.edges.push_back(Edge{e.at(0), e.at(1), std::nullopt});
    }
    if (j.contains("attrs")) g.attrs = j["attrs"].get<std::map<std::string, std::string>>();
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed structure JSON: ") + e.what());
  }
}

}  // namespace structcode
