#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "structcode/codec.hpp"
#include "structcode/graph.hpp"

namespace structcode {

// Appended after each example's trailing newline, so consecutive examples are
// two blank lines apart. Encoded examples only ever contain single blank lines.
inline constexpr std::string_view kDefaultSeparator = "\n\n";

struct Prompt {
  std::vector<SourceText> examples;  // retained examples, in prompt order
  std::vector<std::string> example_ids;
  SourceText stub;
  std::string separator{kDefaultSeparator};
  std::string rendered;
  std::size_t dropped = 0;  // examples removed from the front to fit the budget
};

// ceil(bytes / 4).
std::size_t estimate_tokens(std::string_view text);

// k distinct pool members in draw order (partial Fisher-Yates over pool
// positions with mt19937_64). Throws Error(KTooLarge) unless 1 <= k <= |pool|.
std::vector<TaskInstance> sample_examples(const std::vector<TaskInstance>& pool, std::size_t k, std::uint64_t seed);

// examples + separators + stub. Drops examples from the front until the
// estimate fits `budget_tokens`; throws Error(BudgetExhausted) if the last
// example and the stub alone do not fit, Error(InvalidArgument) if there are
// no examples.
Prompt assemble_prompt(const std::vector<SourceText>& examples, const SourceText& stub, std::size_t budget_tokens,
                       std::string_view separator = kDefaultSeparator);

// Encodes each example in `format` first. `ids` of the retained examples are
// kept in Prompt::example_ids.
Prompt assemble_prompt(const std::vector<TaskInstance>& examples, const SourceText& stub, std::size_t budget_tokens,
                       CodeFormat format, std::string_view separator = kDefaultSeparator);

// Inverse of rendering: the retained example texts followed by the stub text.
std::vector<std::string> split_prompt(std::string_view rendered, std::string_view separator = kDefaultSeparator);

// --- similarity and retrieval --------------------------------------------------

// Term-frequency counts of normalized tokens over `vocabulary` (sorted,
// unique). Out-of-vocabulary tokens are ignored. Throws Error(EmptyInput) for
// an empty vocabulary.
std::vector<double> embed(std::string_view text, const std::vector<std::string>& vocabulary);

// 0 when either norm is 0. Throws Error(DimensionMismatch).
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// (sim_text - sim_graph)^2.
double kst_loss(double sim_text, double sim_graph);

// Edge F1 between the two graphs; relations count when both are typed.
// Throws Error(InvalidGraph) on duplicate ids or dangling edges.
double graph_similarity(const LabeledGraph& g1, const LabeledGraph& g2);

class RetrievalIndex {
 public:
  using Sparse = std::vector<std::pair<std::uint32_t, std::uint32_t>>;  // (term index, count), ascending

  // Vocabulary is every normalized token of every input_text(). Throws
  // Error(EmptyInput) if an instance has no tokens, Error(InvalidArgument) on
  // duplicate ids.
  static RetrievalIndex build(const std::vector<TaskInstance>& instances);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  std::vector<double> embedding(std::size_t i) const;

  // Top-k ids by descending cosine with embed(query); ties by ascending id.
  // Throws Error(KTooLarge) when k > size().
  std::vector<std::string> retrieve(std::string_view query_text, std::size_t k) const;

  // Text format, see docs/index-format.md.
  void save(std::ostream& out) const;
  static RetrievalIndex load(std::istream& in);

  bool operator==(const RetrievalIndex&) const = default;

 private:
  std::vector<std::string> vocabulary_;
  std::vector<std::string> ids_;
  std::vector<Sparse> entries_;
  std::vector<double> norms_;
};

inline std::vector<std::string> retrieve(const RetrievalIndex& index, std::string_view query_text, std::size_t k) {
  return index.retrieve(query_text, k);
}

}  // namespace structcode
