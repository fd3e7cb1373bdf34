#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "structcode/graph.hpp"

namespace structcode {

struct PRF {
  double p = 0;
  double r = 0;
  double f1 = 0;
};

// f1 = 2pr/(p+r), 0 when p+r = 0.
double harmonic(double p, double r);

// Normalized "src\x1frelation\x1fdst" keys over node labels. Relations are
// included only when `with_relations` is set.
std::set<std::string> edge_keys(const LabeledGraph& g, bool with_relations);

PRF edge_prf(const std::set<std::string>& gold, const std::set<std::string>& pred);
// Relation labels take part when both graphs are typed. Throws
// Error(InvalidGraph) on duplicate ids or dangling edges.
PRF edge_prf(const LabeledGraph& gold, const LabeledGraph& pred);

struct GedResult {
  long raw = 0;
  double normalized = 0;  // raw / (|V1|+|E1|+|V2|+|E2|)
  bool exact = true;      // false when the greedy fallback was used
};

// Node/edge insertions and deletions only; nodes can be kept iff their
// normalized labels are equal; relation labels must match when both graphs
// are typed. Edges are compared as sets. Exact (branch and bound) while the
// combined node count is at most `exact_limit`, or whenever no label occurs
// more than once on either side; greedy upper bound otherwise.
// Throws Error(InvalidGraph).
GedResult graph_edit_distance(const LabeledGraph& g1, const LabeledGraph& g2, std::size_t exact_limit = 24);

// Label-blind directed isomorphism. Throws Error(InvalidGraph), or
// Error(SizeLimitExceeded) above `max_nodes` nodes.
bool is_isomorphic(const LabeledGraph& g1, const LabeledGraph& g2, std::size_t max_nodes = 12);

const std::vector<std::string>& stopwords();

// Weakly connected DAG with at least two nodes grounded in the belief and two
// in the argument (shared non-stopword token). Throws Error(InvalidGraph).
bool structural_accuracy(const LabeledGraph& g, std::string_view belief, std::string_view argument);

using EdgeSimilarity = std::function<double(std::string_view, std::string_view)>;

// Token-level F1 of normalized texts (multiset overlap).
double token_f1_similarity(std::string_view a, std::string_view b);
// 1 iff the normalized texts are equal.
double exact_match_similarity(std::string_view a, std::string_view b);

// "src relation dst" per edge, in edge order.
std::vector<std::string> edge_texts(const LabeledGraph& g);

// Maximum-weight one-to-one matching of pred against gold edge texts.
// Hungarian algorithm up to 12x12, greedy above.
PRF g_overlap_score(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                    const EdgeSimilarity& sim = token_f1_similarity);

// Maximum total weight of a one-to-one assignment in a rows x cols matrix
// (rows and cols may differ). Exact.
double max_weight_assignment(const std::vector<std::vector<double>>& weights);

// Single-pair BLEU-4 over normalized whitespace tokens. For n >= 2 a zero
// match count is replaced by (0+1)/(total+1). Brevity penalty exp(1-r/c).
double bleu(std::string_view candidate, std::string_view reference);

// LCS F-measure over normalized whitespace tokens.
double rouge_l(std::string_view candidate, std::string_view reference);

struct Event {
  enum class Kind { Create, Destroy, Move };
  Kind kind = Kind::Move;
  std::size_t step = 0;  // 1-based action index
  std::string entity;    // normalized
  std::string from;      // normalized location, "?" when unknown, empty for Create
  std::string to;        // normalized location, "?" when unknown, empty for Destroy

  auto operator<=>(const Event&) const = default;
  bool operator==(const Event&) const = default;
};

const char* to_string(Event::Kind kind);

std::set<Event> derive_events(const EntityTrace& trace);

// Events are compared by kind, step, entity position and locations. Pred
// entities are aligned with gold by position. Throws Error(ShapeMismatch).
PRF propara_prf(const EntityTrace& gold, const EntityTrace& pred);

}  // namespace structcode
