#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "structcode/graph.hpp"
#include "structcode/pyparse.hpp"

namespace structcode {

// Every serialization the toolkit reads and writes. Script* / DotDigraph /
// EdgeListText serve ScriptGen and EdgePrediction, Expl* serve ExplGraph and
// ProparaFunctions serves EntityTracking.
enum class CodeFormat {
  ScriptTree,
  ScriptLiteral,
  ScriptNetworkXStyle,
  DotDigraph,
  EdgeListText,
  ExplLiteral,
  ExplTree,
  ExplRelation,
  ProparaFunctions,
};

inline constexpr CodeFormat kAllFormats[] = {
    CodeFormat::ScriptTree,  CodeFormat::ScriptLiteral, CodeFormat::ScriptNetworkXStyle,
    CodeFormat::DotDigraph,  CodeFormat::EdgeListText,  CodeFormat::ExplLiteral,
    CodeFormat::ExplTree,    CodeFormat::ExplRelation,  CodeFormat::ProparaFunctions,
};

const char* to_string(CodeFormat format);
CodeFormat parse_format(std::string_view name);
// File extension used by `convert`: ".py", ".dot" or ".txt".
const char* file_extension(CodeFormat format);
bool is_applicable(TaskKind task, CodeFormat format);
bool is_text_baseline(CodeFormat format);
std::vector<CodeFormat> formats_for(TaskKind task);

struct SourceText {
  std::string text;
  CodeFormat format = CodeFormat::ScriptTree;

  bool operator==(const SourceText&) const = default;
};

using pyparse::Mode;
using pyparse::Warning;

struct Decoded {
  Structure structure;
  std::vector<Warning> warnings;
};

// Serializes a gold-bearing instance. Throws Error(FormatMismatch) or
// Error(MissingGold); Error(InvalidGraph) if the gold graph has dangling edges.
SourceText encode(const TaskInstance& instance, CodeFormat format);

// The part of encode() that depends only on the instance input, cut at the
// point where the model takes over. Always a prefix of encode() for a gold
// instance with the same input.
SourceText make_stub(const TaskInstance& instance, CodeFormat format);

// Recovers the structure from a (possibly model-written) serialization.
// Tolerant mode skips unrecognized statements with a warning; strict mode
// throws Error(ParseFailure). Throws Error(EmptyStructure) when nothing was
// recovered. Script begin/end sentinels are dropped.
Decoded decode(const SourceText& source, Mode mode = Mode::Tolerant);

// DOT and edge-list decoding; decode() delegates here for those formats.
Decoded decode_text_baseline(const SourceText& source, Mode mode = Mode::Tolerant);

// Node labels in topological order joined by "; ". Throws Error(CyclicGraph).
std::string flatten_for_text_metrics(const LabeledGraph& g);

// Code identifiers for a list of labels: sanitized, suffixed with "_" when they
// clash with a sentinel, a Python keyword or `extra_reserved`, then
// de-duplicated.
std::vector<std::string> assign_identifiers(const std::vector<std::string>& labels,
                                            const std::vector<std::string>& extra_reserved = {});

// Python-style double-quoted literal with backslash escapes.
std::string py_quote(std::string_view text);

}  // namespace structcode
