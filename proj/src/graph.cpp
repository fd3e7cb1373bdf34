#include "structcode/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "structcode/error.hpp"

namespace structcode {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// id -> position of its first occurrence
std::unordered_map<std::string, std::size_t> index_nodes(const LabeledGraph& g) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);
  return index;
}

}  // namespace

const Node* LabeledGraph::find(std::string_view id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

bool LabeledGraph::typed() const {
  return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.relation.has_value(); });
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::DanglingEdge: return "DanglingEdge";
    case ViolationKind::MixedEdgeTyping: return "MixedEdgeTyping";
    case ViolationKind::EmptyGraph: return "EmptyGraph";
  }
  return "Unknown";
}

StateValue StateValue::known(std::string location) {
  if (trim(location).empty()) throw Error(ErrorCode::InvalidArgument, "known location must be non-empty");
  return StateValue(Kind::Known, std::move(location));
}

void validate_trace(const EntityTrace& trace) {
  if (trace.actions.empty() || trace.entities.empty())
    throw Error(ErrorCode::ShapeMismatch, "trace needs at least one action and one entity");
  if (trace.states.size() != trace.actions.size() + 1)
    throw Error(ErrorCode::ShapeMismatch, "trace has " + std::to_string(trace.states.size()) + " state rows, expected " +
                                              std::to_string(trace.actions.size() + 1));
  for (const auto& row : trace.states)
    if (row.size() != trace.entities.size())
      throw Error(ErrorCode::ShapeMismatch, "state row width differs from entity count");
}

const char* to_string(TaskKind task) {
  switch (task) {
    case TaskKind::ScriptGen: return "script-gen";
    case TaskKind::EdgePrediction: return "edge-pred";
    case TaskKind::EntityTracking: return "entity-tracking";
    case TaskKind::ExplGraph: return "expl-graph";
  }
  return "unknown";
}

TaskKind parse_task(std::string_view name) {
  if (name == "script-gen" || name == "proscript") return TaskKind::ScriptGen;
  if (name == "edge-pred") return TaskKind::EdgePrediction;
  if (name == "entity-tracking" || name == "propara") return TaskKind::EntityTracking;
  if (name == "expl-graph" || name == "explagraphs") return TaskKind::ExplGraph;
  throw Error(ErrorCode::InvalidArgument, "unknown task '" + std::string(name) + "'");
}

void validate_instance(const TaskInstance& instance) {
  if (instance.task == TaskKind::EdgePrediction && instance.input.nodes.empty())
    throw Error(ErrorCode::InvalidArgument, "edge-prediction instance '" + instance.id + "' has no input nodes");
  if (!instance.gold) return;
  bool wants_trace = instance.task == TaskKind::EntityTracking;
  bool has_trace = std::holds_alternative<EntityTrace>(*instance.gold);
  if (wants_trace != has_trace)
    throw Error(ErrorCode::InvalidArgument, "gold structure of '" + instance.id + "' does not match task " +
                                                to_string(instance.task));
}

std::string input_text(const TaskInstance& instance) {
  const auto& in = instance.input;
  std::string out;
  auto append = [&out](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out += ' ';
    out += s;
  };
  switch (instance.task) {
    case TaskKind::ScriptGen: append(in.goal); break;
    case TaskKind::EdgePrediction:
      append(in.goal);
      for (const auto& n : in.nodes) append(n.label);
      break;
    case TaskKind::EntityTracking:
      for (const auto& a : in.actions) append(a);
      break;
    case TaskKind::ExplGraph:
      append(in.belief);
      append(in.argument);
      break;
  }
  return out;
}

std::string sanitize_identifier(std::string_view label) {
  std::string out;
  bool pending_sep = false;
  for (char c : label) {
    if (is_alnum(c)) {
      if (pending_sep && !out.empty()) out += '_';
      pending_sep = false;
      out += lower(c);
    } else {
      pending_sep = true;
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyLabel, "label '" + std::string(label) + "' has no alphanumeric characters");
  if (std::isdigit(static_cast<unsigned char>(out.front()))) out = "n_" + out;
  return out;
}

std::vector<std::string> resolve_collisions(const std::vector<std::string>& ids) {
  std::unordered_set<std::string> taken(ids.begin(), ids.end());
  std::unordered_map<std::string, int> seen;
  std::unordered_set<std::string> emitted;
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    int& count = seen[id];
    ++count;
    if (count == 1 && !emitted.count(id)) {
      emitted.insert(id);
      out.push_back(id);
      continue;
    }
    int k = std::max(count, 2);
    std::string candidate = id + "_" + std::to_string(k);
    while (emitted.count(candidate) || (taken.count(candidate) && candidate != id)) {
      ++k;
      candidate = id + "_" + std::to_string(k);
    }
    count = k;
    emitted.insert(candidate);
    out.push_back(candidate);
  }
  return out;
}

std::string desanitize_identifier(std::string_view id) {
  std::string_view body = id;
  if (body.size() > 2 && body.substr(0, 2) == "n_" && std::isdigit(static_cast<unsigned char>(body[2])))
    body.remove_prefix(2);
  std::string out(body);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string normalize_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (is_punct(c)) continue;
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += lower(c);
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string norm = normalize_label(text);
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    tokens.push_back(norm.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

std::vector<Violation> validate_graph(const LabeledGraph& g) {
  std::vector<Violation> out;
  if (g.nodes.empty()) out.push_back({ViolationKind::EmptyGraph, {}, {}, {}});
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> reported;
  for (const auto& n : g.nodes)
    if (!ids.insert(n.id).second && reported.insert(n.id).second)
      out.push_back({ViolationKind::DuplicateId, n.id, {}, {}});
  bool any_typed = g.typed();
  for (const auto& e : g.edges) {
    if (!ids.count(e.src) || !ids.count(e.dst)) out.push_back({ViolationKind::DanglingEdge, {}, e.src, e.dst});
    if (any_typed && !e.relation) out.push_back({ViolationKind::MixedEdgeTyping, {}, e.src, e.dst});
  }
  return out;
}

namespace {

struct Adjacency {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> indegree;
};

Adjacency build_adjacency(const LabeledGraph& g) {
  auto index = index_nodes(g);
  Adjacency adj;
  adj.out.resize(g.nodes.size());
  adj.indegree.assign(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    auto s = index.find(e.src);
    auto d = index.find(e.dst);
    if (s == index.end() || d == index.end())
      throw Error(ErrorCode::InvalidGraph, "edge (" + e.src + ", " + e.dst + ") names a missing node");
    adj.out[s->second].push_back(d->second);
    ++adj.indegree[d->second];
  }
  return adj;
}

// Returns the Kahn order; shorter than |V| when a cycle exists.
std::vector<std::size_t> kahn(const LabeledGraph& g) {
  Adjacency adj = build_adjacency(g);
  std::vector<std::string> keys;
  keys.reserve(g.nodes.size());
  for (const auto& n : g.nodes) keys.push_back(normalize_label(n.label));
  auto less = [&](std::size_t a, std::size_t b) {
    return std::tie(keys[a], g.nodes[a].id, a) < std::tie(keys[b], g.nodes[b].id, b);
  };
  std::set<std::size_t, decltype(less)> ready(less);
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (adj.indegree[i] == 0) ready.insert(i);
  std::vector<std::size_t> order;
  order.reserve(g.nodes.size());
  while (!ready.empty()) {
    std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (std::size_t w : adj.out[v])
      if (--adj.indegree[w] == 0) ready.insert(w);
  }
  return order;
}

}  // namespace

bool is_dag(const LabeledGraph& g) { return kahn(g).size() == g.nodes.size(); }

std::vector<std::string> topological_order(const LabeledGraph& g) {
  auto order = kahn(g);
  if (order.size() != g.nodes.size()) throw Error(ErrorCode::CyclicGraph, "graph contains a directed cycle");
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (std::size_t i : order) ids.push_back(g.nodes[i].id);
  return ids;
}

bool is_weakly_connected(const LabeledGraph& g) {
  if (g.nodes.empty()) return false;
  auto index = index_nodes(g);
  std::vector<std::size_t> parent(g.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) {
    auto s = index.find(e.src);
    auto d = index.find(e.dst);
    if (s == index.end() || d == index.end()) continue;
    parent[root(s->second)] = root(d->second);
  }
  std::size_t r = root(0);
  for (std::size_t i = 1; i < parent.size(); ++i)
    if (root(i) != r) return false;
  return true;
}

GraphStats graph_stats(const LabeledGraph& g) {
  GraphStats s;
  s.node_count = g.nodes.size();
  s.edge_count = g.edges.size();
  s.avg_degree = s.node_count == 0 ? 0.0 : 2.0 * static_cast<double>(s.edge_count) / static_cast<double>(s.node_count);
  return s;
}

CanonicalGraph canonical_form(const LabeledGraph& g) {
  CanonicalGraph c;
  std::unordered_map<std::string, std::string> label_of;
  for (const auto& n : g.nodes) {
    label_of.emplace(n.id, normalize_label(n.label));
    c.nodes.push_back(normalize_label(n.label));
  }
  auto lookup = [&](const std::string& id) {
    auto it = label_of.find(id);
    return it == label_of.end() ? "?" + id : it->second;
  };
  for (const auto& e : g.edges) {
    std::string rel = e.relation ? normalize_label(*e.relation) : std::string();
    c.edges.push_back(lookup(e.src) + "\x1f" + rel + "\x1f" + lookup(e.dst));
  }
  std::sort(c.nodes.begin(), c.nodes.end());
  std::sort(c.edges.begin(), c.edges.end());
  return c;
}

}  // namespace structcode
