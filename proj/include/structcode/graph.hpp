#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace structcode {

struct Node {
  std::string id;
  std::string label;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string src;
  std::string dst;
  std::optional<std::string> relation;

  bool operator==(const Edge&) const = default;
};

// Directed graph of labeled nodes. Construction never rejects anything: parsed
// model output has to be representable before it can be scored, so validity is
// checked separately by validate_graph().
struct LabeledGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  // Instance-level text: "goal", "belief", "argument", "stance", "topic", "id".
  std::map<std::string, std::string> attrs;

  const Node* find(std::string_view id) const;
  bool has_node(std::string_view id) const { return find(id) != nullptr; }
  // True when at least one edge carries a relation label.
  bool typed() const;

  bool operator==(const LabeledGraph&) const = default;
};

enum class ViolationKind { DuplicateId, DanglingEdge, MixedEdgeTyping, EmptyGraph };

struct Violation {
  ViolationKind kind;
  std::string id;   // DuplicateId
  std::string src;  // DanglingEdge / MixedEdgeTyping
  std::string dst;

  bool operator==(const Violation&) const = default;
};

const char* to_string(ViolationKind kind);

class StateValue {
 public:
  enum class Kind { NonExistent, Unknown, Known };

  static StateValue non_existent() { return StateValue(Kind::NonExistent, {}); }
  static StateValue unknown() { return StateValue(Kind::Unknown, {}); }
  // Throws Error(InvalidArgument) when the trimmed location is empty.
  static StateValue known(std::string location);

  Kind kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }

  bool operator==(const StateValue&) const = default;

 private:
  StateValue(Kind kind, std::string location) : kind_(kind), location_(std::move(location)) {}

  Kind kind_;
  std::string location_;
};

// Entity-state table: row 0 holds the initial states, row t the states after
// action t.
struct EntityTrace {
  std::vector<std::string> actions;
  std::vector<std::string> entities;
  std::vector<std::vector<StateValue>> states;

  bool operator==(const EntityTrace&) const = default;
};

// Throws Error(ShapeMismatch) unless states is (actions+1) x entities with at
// least one action and one entity.
void validate_trace(const EntityTrace& trace);

enum class TaskKind { ScriptGen, EdgePrediction, EntityTracking, ExplGraph };

const char* to_string(TaskKind task);
TaskKind parse_task(std::string_view name);

// Task-dependent input fields; unused fields stay empty.
struct TaskInput {
  std::string goal;
  std::vector<Node> nodes;  // EdgePrediction: the given node set
  std::vector<std::string> actions;
  std::vector<std::string> entities;
  std::string belief;
  std::string argument;
  std::string stance;

  bool operator==(const TaskInput&) const = default;
};

using Structure = std::variant<LabeledGraph, EntityTrace>;

struct TaskInstance {
  std::string id;
  TaskKind task = TaskKind::ScriptGen;
  TaskInput input;
  std::optional<Structure> gold;

  bool operator==(const TaskInstance&) const = default;
};

// Throws Error(InvalidArgument) when gold does not match the task's structure
// kind or an EdgePrediction instance has no input nodes.
void validate_instance(const TaskInstance& instance);

// The text a retriever or a human would read as "the input" of an instance.
std::string input_text(const TaskInstance& instance);

// --- identifiers -----------------------------------------------------------

// Lowercases, collapses runs of non-alphanumerics into single underscores and
// prefixes a leading digit with "n_". Throws Error(EmptyLabel) if nothing
// alphanumeric remains.
std::string sanitize_identifier(std::string_view label);

// Keeps the first occurrence of each id; the k-th duplicate becomes "id_k".
// If "id_k" is already taken, k keeps counting up.
std::vector<std::string> resolve_collisions(const std::vector<std::string>& ids);

// Best-effort inverse of sanitize_identifier: underscores become spaces and a
// "n_" digit prefix is dropped.
std::string desanitize_identifier(std::string_view id);

// Lowercase, ASCII punctuation removed, whitespace trimmed and collapsed.
std::string normalize_label(std::string_view text);

// Normalized label split on spaces.
std::vector<std::string> normalized_tokens(std::string_view text);

// --- structure -------------------------------------------------------------

std::vector<Violation> validate_graph(const LabeledGraph& g);

// Throws Error(InvalidGraph) if an edge names a missing node. Self-loops count
// as cycles.
bool is_dag(const LabeledGraph& g);

// Kahn order; among ready nodes the smallest normalized label goes first
// (then id, then insertion position). Throws Error(CyclicGraph).
std::vector<std::string> topological_order(const LabeledGraph& g);

bool is_weakly_connected(const LabeledGraph& g);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double avg_degree = 0.0;  // 2|E| / |V|, 0 for the empty graph
};

GraphStats graph_stats(const LabeledGraph& g);

// Order-insensitive comparison key: sorted normalized node labels and sorted
// normalized (src label, relation, dst label) triples.
struct CanonicalGraph {
  std::vector<std::string> nodes;
  std::vector<std::string> edges;

  bool operator==(const CanonicalGraph&) const = default;
};

CanonicalGraph canonical_form(const LabeledGraph& g);

}  // namespace structcode
