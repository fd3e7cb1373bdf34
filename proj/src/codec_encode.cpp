#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "structcode/codec.hpp"
#include "structcode/error.hpp"

namespace structcode {

const char* to_string(CodeFormat format) {
  switch (format) {
    case CodeFormat::ScriptTree: return "tree";
    case CodeFormat::ScriptLiteral: return "literal";
    case CodeFormat::ScriptNetworkXStyle: return "networkx";
    case CodeFormat::DotDigraph: return "dot";
    case CodeFormat::EdgeListText: return "edgelist";
    case CodeFormat::ExplLiteral: return "expl-literal";
    case CodeFormat::ExplTree: return "expl-tree";
    case CodeFormat::ExplRelation: return "expl-relation";
    case CodeFormat::ProparaFunctions: return "propara";
  }
  return "unknown";
}

CodeFormat parse_format(std::string_view name) {
  for (CodeFormat f : kAllFormats)
    if (name == to_string(f)) return f;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

const char* file_extension(CodeFormat format) {
  switch (format) {
    case CodeFormat::DotDigraph: return ".dot";
    case CodeFormat::EdgeListText: return ".txt";
    default: return ".py";
  }
}

bool is_applicable(TaskKind task, CodeFormat format) {
  switch (format) {
    case CodeFormat::ScriptTree:
    case CodeFormat::ScriptLiteral:
    case CodeFormat::ScriptNetworkXStyle:
    case CodeFormat::DotDigraph:
    case CodeFormat::EdgeListText:
      return task == TaskKind::ScriptGen || task == TaskKind::EdgePrediction;
    case CodeFormat::ExplLiteral:
    case CodeFormat::ExplTree:
    case CodeFormat::ExplRelation:
      return task == TaskKind::ExplGraph;
    case CodeFormat::ProparaFunctions:
      return task == TaskKind::EntityTracking;
  }
  return false;
}

bool is_text_baseline(CodeFormat format) {
  return format == CodeFormat::DotDigraph || format == CodeFormat::EdgeListText;
}

std::vector<CodeFormat> formats_for(TaskKind task) {
  std::vector<CodeFormat> out;
  for (CodeFormat f : kAllFormats)
    if (is_applicable(task, f)) out.push_back(f);
  return out;
}

std::string py_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "begin", "end",    "self",   "and",   "as",     "assert", "async",  "await", "break",  "class",
      "continue", "def", "del",    "elif",  "else",   "except", "finally", "for",  "from",   "global",
      "if",    "import", "in",     "is",    "lambda", "nonlocal", "not",  "or",    "pass",   "raise",
      "return", "try",   "while",  "with",  "yield",  "root_nodes",
  };
  return words;
}

}  // namespace

std::vector<std::string> assign_identifiers(const std::vector<std::string>& labels,
                                            const std::vector<std::string>& extra_reserved) {
  std::vector<std::string> ids;
  ids.reserve(labels.size());
  for (const auto& label : labels) {
    std::string id;
    try {
      id = sanitize_identifier(label);
    } catch (const Error&) {
      id = "node";
    }
    if (reserved_words().count(id) ||
        std::find(extra_reserved.begin(), extra_reserved.end(), id) != extra_reserved.end())
      id += '_';
    ids.push_back(std::move(id));
  }
  return resolve_collisions(ids);
}

namespace {

std::string one_line(std::string_view text) {
  std::string out(text);
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Rendered {
  std::string text;
  std::size_t stub_end = 0;
};

// Graph view with code identifiers assigned from labels in node order.
struct IdentifiedGraph {
  const LabeledGraph& graph;
  std::vector<std::string> ids;                        // per node position
  std::unordered_map<std::string, std::size_t> index;  // graph id -> position
  std::vector<std::vector<std::size_t>> children;      // grouped out-edges, edge order
  std::vector<std::size_t> source_order;               // nodes by first appearance as edge source
  std::vector<std::size_t> indegree;

  explicit IdentifiedGraph(const LabeledGraph& g) : graph(g) {
    std::vector<std::string> labels;
    for (const auto& n : g.nodes) labels.push_back(n.label);
    ids = assign_identifiers(labels);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);
    children.resize(g.nodes.size());
    indegree.assign(g.nodes.size(), 0);
    for (const auto& e : g.edges) {
      std::size_t s = at(e.src), d = at(e.dst);
      if (children[s].empty()) source_order.push_back(s);
      children[s].push_back(d);
      ++indegree[d];
    }
  }

  std::size_t at(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::InvalidGraph, "edge endpoint '" + id + "' is not a node");
    return it->second;
  }
};

bool edge_prediction(TaskKind task) { return task == TaskKind::EdgePrediction; }

Rendered render_tree(const TaskInput& in, const LabeledGraph& g, TaskKind task) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "class Tree:\n\n";
  out += "  goal = " + py_quote(in.goal) + "\n\n";
  out += "  def __init__(self):\n";
  out += "    # nodes\n";
  if (!edge_prediction(task)) r.stub_end = out.size();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out += "    " + ig.ids[i] + " = Node()\n";
  out += "    # edges\n";
  if (edge_prediction(task)) r.stub_end = out.size();
  for (std::size_t s : ig.source_order) {
    out += "    " + ig.ids[s] + ".children = [";
    for (std::size_t j = 0; j < ig.children[s].size(); ++j) {
      if (j) out += ", ";
      out += ig.ids[ig.children[s][j]];
    }
    out += "]\n";
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (ig.children[i].empty()) out += "    " + ig.ids[i] + ".children = [end]\n";
  return r;
}

std::string camel_case(std::string_view goal) {
  std::string id;
  try {
    id = sanitize_identifier(goal);
  } catch (const Error&) {
    return "Plan";
  }
  std::string out;
  bool upper = true;
  for (char c : id) {
    if (c == '_') {
      upper = true;
      continue;
    }
    out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    upper = false;
  }
  return out;
}

Rendered render_literal(const TaskInput& in, const LabeledGraph& g, TaskKind task) {
  Rendered r;
  std::string& out = r.text;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);
  auto step = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::InvalidGraph, "edge endpoint '" + id + "' is not a node");
    return "step" + std::to_string(it->second);
  };
  out += "class " + camel_case(in.goal) + ":\n\n";
  out += "  title = " + py_quote(in.goal) + "\n";
  if (!edge_prediction(task)) r.stub_end = out.size();
  out += "  steps = " + std::to_string(g.nodes.size()) + "\n\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += "  def step" + std::to_string(i) + "(self):\n";
    out += "    return " + py_quote(g.nodes[i].label) + "\n";
  }
  out += "  def get_relations(self):\n";
  if (edge_prediction(task)) r.stub_end = out.size();
  out += "    return [\n";
  for (const auto& e : g.edges) out += "      " + py_quote(step(e.src) + " -> " + step(e.dst)) + ",\n";
  out += "    ]\n";
  return r;
}

Rendered render_networkx(const TaskInput& in, const LabeledGraph& g, TaskKind task) {
  Rendered r;
  std::string& out = r.text;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);
  auto step = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::InvalidGraph, "edge endpoint '" + id + "' is not a node");
    return "step" + std::to_string(it->second);
  };
  out += "class Plan:\n\n";
  out += "  goal = " + py_quote(in.goal) + "\n";
  if (!edge_prediction(task)) r.stub_end = out.size();
  out += "  num_steps = " + std::to_string(g.nodes.size()) + "\n\n";
  out += "  def __init__(self):\n";
  out += "    graph = nx.DiGraph()\n";
  out += "    # add nodes\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    out += "    step" + std::to_string(i) + " = " + py_quote(g.nodes[i].label) + "\n";
  out += "    graph.add_nodes_from([";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (i) out += ", ";
    out += "step" + std::to_string(i);
  }
  out += "])\n\n";
  out += "    # add edges\n";
  if (edge_prediction(task)) r.stub_end = out.size();
  for (const auto& e : g.edges) out += "    graph.add_edge(" + step(e.src) + ", " + step(e.dst) + ")\n";
  return r;
}

Rendered render_dot(const TaskInput& in, const LabeledGraph& g, TaskKind task) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "// goal: " + one_line(in.goal) + "\n";
  out += "digraph G {\n";
  if (edge_prediction(task)) {
    for (const auto& id : ig.ids) out += "  " + id + ";\n";
  }
  r.stub_end = out.size();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (ig.indegree[i] == 0) out += "  begin -> " + ig.ids[i] + ";\n";
  for (const auto& e : g.edges) out += "  " + ig.ids[ig.at(e.src)] + " -> " + ig.ids[ig.at(e.dst)] + ";\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (ig.children[i].empty()) out += "  " + ig.ids[i] + " -> end;\n";
  out += "}\n";
  return r;
}

Rendered render_edge_list(const TaskInput& in, const LabeledGraph& g, TaskKind task) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "# goal: " + one_line(in.goal) + "\n";
  if (edge_prediction(task)) {
    out += "# nodes: ";
    for (std::size_t i = 0; i < ig.ids.size(); ++i) {
      if (i) out += ", ";
      out += ig.ids[i];
    }
    out += "\n";
  }
  out += "[\n";
  r.stub_end = out.size();
  std::vector<std::string> pairs;
  for (const auto& e : g.edges) pairs.push_back("(" + ig.ids[ig.at(e.src)] + ", " + ig.ids[ig.at(e.dst)] + ")");
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (ig.children[i].empty()) pairs.push_back("(" + ig.ids[i] + ", end)");
  for (std::size_t i = 0; i < pairs.size(); ++i) out += "  " + pairs[i] + (i + 1 < pairs.size() ? ",\n" : "\n");
  out += "]\n";
  return r;
}

std::string relation_of(const Edge& e) { return e.relation.value_or(""); }

std::vector<std::size_t> roots_of(const IdentifiedGraph& ig) {
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < ig.graph.nodes.size(); ++i)
    if (ig.indegree[i] == 0) roots.push_back(i);
  return roots;
}

void render_expl_edges_literal(const IdentifiedGraph& ig, std::string& out) {
  const auto& g = ig.graph;
  out += "    begin = [";
  auto roots = roots_of(ig);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i) out += ", ";
    out += py_quote(g.nodes[roots[i]].label);
  }
  out += "]\n";
  for (const auto& e : g.edges)
    out += "    add_edge(" + py_quote(g.nodes[ig.at(e.src)].label) + ", " + py_quote(relation_of(e)) + ", " +
           py_quote(g.nodes[ig.at(e.dst)].label) + ")\n";
}

Rendered render_expl_literal(const TaskInput& in, const LabeledGraph& g) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "class ExplanationDAG:\n\n";
  out += "  def __init__(self):\n";
  out += "    belief = " + py_quote(in.belief) + "\n";
  out += "    argument = " + py_quote(in.argument) + "\n";
  out += "    stance = " + py_quote(in.stance) + "\n\n";
  out += "    # Edges\n";
  r.stub_end = out.size();
  render_expl_edges_literal(ig, out);
  return r;
}

Rendered render_expl_relation(const TaskInput& in, const LabeledGraph& g) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "class Relation:\n\n";
  out += "  def __init__(self):\n";
  out += "    belief = " + py_quote(in.belief) + "\n";
  out += "    argument = " + py_quote(in.argument) + "\n";
  out += "    stance = " + py_quote(in.stance) + "\n\n";
  out += "    # create a DAG to " + one_line(in.stance) + " belief using argument\n";
  r.stub_end = out.size();
  render_expl_edges_literal(ig, out);
  return r;
}

Rendered render_expl_tree(const TaskInput& in, const LabeledGraph& g) {
  IdentifiedGraph ig(g);
  Rendered r;
  std::string& out = r.text;
  out += "class Tree:\n";
  out += "  def __init__(self):\n";
  out += "    self.belief = " + py_quote(in.belief) + "\n";
  out += "    self.argument = " + py_quote(in.argument) + "\n";
  out += "    self.stance = " + py_quote(in.stance) + "\n\n";
  out += "    # tree for " + one_line(in.stance) + " in support of belief\n";
  r.stub_end = out.size();
  auto roots = roots_of(ig);
  out += "    root_nodes = ";
  if (roots.size() == 1) {
    out += ig.ids[roots[0]];
  } else {
    out += "[";
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (i) out += ", ";
      out += ig.ids[roots[i]];
    }
    out += "]";
  }
  out += "\n";
  std::vector<bool> declared(g.nodes.size(), false);
  for (const auto& e : g.edges) {
    std::size_t s = ig.at(e.src);
    if (!declared[s]) {
      out += "    " + ig.ids[s] + " = Node()\n";
      declared[s] = true;
    }
    out += "    " + ig.ids[s] + ".add_edge(" + py_quote(relation_of(e)) + ", " + py_quote(g.nodes[ig.at(e.dst)].label) +
           ")\n";
  }
  return r;
}

// Function name for an action: articles dropped, sanitized, at most 60 chars.
std::string action_function_name(const std::string& action) {
  std::string kept;
  for (const auto& tok : normalized_tokens(action)) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    if (!kept.empty()) kept += ' ';
    kept += tok;
  }
  std::string id;
  try {
    id = sanitize_identifier(kept.empty() ? action : kept);
  } catch (const Error&) {
    id = "step";
  }
  if (id.size() > 60) id.resize(60);
  while (id.size() > 1 && id.back() == '_') id.pop_back();
  return id;
}

std::string state_literal(const StateValue& v) {
  switch (v.kind()) {
    case StateValue::Kind::NonExistent: return "None";
    case StateValue::Kind::Unknown: return "\"UNK\"";
    case StateValue::Kind::Known: return py_quote(v.location());
  }
  return "None";
}

Rendered render_propara(const TaskInput& in, const EntityTrace& trace) {
  Rendered r;
  std::string& out = r.text;
  out += "def main():\n";
  out += "  # init\n";
  for (const auto& a : in.actions) out += "  # " + lower(one_line(a)) + "\n";
  for (std::size_t k = 0; k < in.entities.size(); ++k)
    out += "  # state_" + std::to_string(k) + " tracks the location/state " + one_line(in.entities[k]) + "\n";
  out += "  def init():\n";
  r.stub_end = out.size();
  std::vector<std::string> raw_names;
  for (const auto& a : in.actions) {
    std::string name = action_function_name(a);
    if (name == "init" || name == "main") name += '_';
    raw_names.push_back(std::move(name));
  }
  std::vector<std::string> names = resolve_collisions(raw_names);
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    if (t > 0) out += "  def " + names[t - 1] + "():\n";
    for (std::size_t k = 0; k < trace.states[t].size(); ++k)
      out += "    state_" + std::to_string(k) + " = " + state_literal(trace.states[t][k]) + "\n";
  }
  return r;
}

Rendered render(const TaskInstance& instance, const Structure& structure, CodeFormat format) {
  const TaskInput& in = instance.input;
  if (format == CodeFormat::ProparaFunctions) {
    const auto& trace = std::get<EntityTrace>(structure);
    return render_propara(in, trace);
  }
  const auto& g = std::get<LabeledGraph>(structure);
  switch (format) {
    case CodeFormat::ScriptTree: return render_tree(in, g, instance.task);
    case CodeFormat::ScriptLiteral: return render_literal(in, g, instance.task);
    case CodeFormat::ScriptNetworkXStyle: return render_networkx(in, g, instance.task);
    case CodeFormat::DotDigraph: return render_dot(in, g, instance.task);
    case CodeFormat::EdgeListText: return render_edge_list(in, g, instance.task);
    case CodeFormat::ExplLiteral: return render_expl_literal(in, g);
    case CodeFormat::ExplTree: return render_expl_tree(in, g);
    case CodeFormat::ExplRelation: return render_expl_relation(in, g);
    case CodeFormat::ProparaFunctions: break;
  }
  throw Error(ErrorCode::FormatMismatch, "unhandled format");
}

void check_applicable(const TaskInstance& instance, CodeFormat format) {
  if (!is_applicable(instance.task, format))
    throw Error(ErrorCode::FormatMismatch, std::string("format ") + to_string(format) + " does not apply to task " +
                                               to_string(instance.task));
}

}  // namespace

SourceText encode(const TaskInstance& instance, CodeFormat format) {
  check_applicable(instance, format);
  if (!instance.gold) throw Error(ErrorCode::MissingGold, "instance '" + instance.id + "' has no gold structure");
  validate_instance(instance);
  if (const auto* trace = std::get_if<EntityTrace>(&*instance.gold)) validate_trace(*trace);
  return SourceText{render(instance, *instance.gold, format).text, format};
}

SourceText make_stub(const TaskInstance& instance, CodeFormat format) {
  check_applicable(instance, format);
  Structure placeholder;
  if (instance.task == TaskKind::EntityTracking) {
    EntityTrace trace;
    trace.actions = instance.input.actions;
    trace.entities = instance.input.entities;
    placeholder = std::move(trace);
  } else {
    LabeledGraph g;
    if (instance.task == TaskKind::EdgePrediction) {
      if (instance.input.nodes.empty())
        throw Error(ErrorCode::InvalidArgument, "edge-prediction instance '" + instance.id + "' has no input nodes");
      g.nodes = instance.input.nodes;
    }
    placeholder = std::move(g);
  }
  Rendered r = render(instance, placeholder, format);
  return SourceText{r.text.substr(0, r.stub_end), format};
}

std::string flatten_for_text_metrics(const LabeledGraph& g) {
  auto order = topological_order(g);
  std::string out;
  for (const auto& id : order) {
    if (!out.empty()) out += "; ";
    out += g.find(id)->label;
  }
  return out;
}

}  // namespace structcode
