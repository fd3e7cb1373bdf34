#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <unordered_map>
#include <unordered_set>

#include "structcode/codec.hpp"
#include "structcode/error.hpp"

namespace structcode {

using pyparse::ClassDecl;
using pyparse::CodeAst;
using pyparse::Expr;
using pyparse::Stmt;

namespace {

bool is_sentinel(std::string_view id) { return id == "begin" || id == "end"; }

// Collects nodes and edges while decoding, keyed by code identifier.
class GraphBuilder {
 public:
  GraphBuilder(Mode mode, std::vector<Warning>& warnings) : mode_(mode), warnings_(warnings) {}

  // Declares a node; a repeated declaration is reported and ignored.
  void declare(const std::string& id, const std::string& label, int line) {
    if (index_.count(id)) {
      warn("DuplicateAssign", "node '" + id + "' declared twice", line);
      return;
    }
    add(id, label);
  }

  // Looks up a node by identifier, creating it if it was never declared.
  void reference(const std::string& id, const std::string& label, int line) {
    if (index_.count(id)) return;
    warn("DanglingReference", "'" + id + "' used before declaration", line);
    add(id, label);
  }

  void ensure(const std::string& id, const std::string& label) {
    if (!index_.count(id)) add(id, label);
  }

  void set_label(const std::string& id, const std::string& label) { g_.nodes[index_.at(id)].label = label; }
  bool has(const std::string& id) const { return index_.count(id) > 0; }

  void edge(const std::string& src, const std::string& dst, std::optional<std::string> relation, int line) {
    std::string key = src + '\x1f' + relation.value_or("") + '\x1f' + dst;
    if (!edge_keys_.insert(key).second) {
      warn("DuplicateEdge", "edge " + src + " -> " + dst + " repeated", line);
      return;
    }
    g_.edges.push_back(Edge{src, dst, std::move(relation)});
  }

  void warn(const std::string& category, const std::string& message, int line, int column = 1) {
    warnings_.push_back(Warning{category, message, line, column});
  }

  // Unrecognized statement: a warning in tolerant mode, ParseFailure in strict.
  void unknown(const std::string& what, int line) {
    if (mode_ == Mode::Strict) throw Error(ErrorCode::ParseFailure, "unrecognized statement: " + what, line, 1);
    warn("UnknownStatement", "skipped " + what, line);
  }

  LabeledGraph& graph() { return g_; }

  LabeledGraph finish(int last_line) {
    if (g_.nodes.empty()) throw Error(ErrorCode::EmptyStructure, "no nodes recovered", last_line, 1);
    return std::move(g_);
  }

 private:
  void add(const std::string& id, const std::string& label) {
    index_.emplace(id, g_.nodes.size());
    g_.nodes.push_back(Node{id, label});
  }

  Mode mode_;
  std::vector<Warning>& warnings_;
  LabeledGraph g_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_set<std::string> edge_keys_;
};

int count_lines(std::string_view text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
}

CodeAst parse_code(const SourceText& source, Mode mode, std::vector<Warning>& warnings) {
  try {
    auto result = pyparse::parse_source(source.text, mode);
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
    return std::move(result.ast);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw;
    throw Error(ErrorCode::ParseFailure, e.what(), e.line(), e.column());
  }
}

const char* describe(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign: return "assignment";
    case Stmt::Kind::Call: return "call";
    case Stmt::Kind::Comment: return "comment";
    case Stmt::Kind::Return: return "return";
    case Stmt::Kind::Def: return "def";
  }
  return "statement";
}

std::string stmt_text(const Stmt& s) {
  std::string out = describe(s);
  if (!s.target.empty()) out += " '" + s.target + "'";
  return out;
}

bool is_str(const Expr& e) { return e.kind == Expr::Kind::Str; }
bool is_ident(const Expr& e) { return e.kind == Expr::Kind::Ident; }

bool is_ctor(const Expr& e, std::string_view name) {
  return e.kind == Expr::Kind::Ctor && e.text == name && e.items.empty();
}

// Statements of every class body and top-level statement; methods are
// descended into. `visit` returns false for statements it does not handle.
template <typename Visit>
void walk(const CodeAst& ast, GraphBuilder& b, Visit&& visit) {
  std::function<void(const std::vector<Stmt>&, bool)> run = [&](const std::vector<Stmt>& body, bool in_class) {
    for (const auto& s : body) {
      if (s.kind == Stmt::Kind::Comment) continue;
      if (s.kind == Stmt::Kind::Def) {
        if (!visit(s, in_class)) run(s.body, false);
        continue;
      }
      if (!visit(s, in_class)) b.unknown(stmt_text(s), s.line);
    }
  };
  for (const ClassDecl& c : ast.classes) run(c.body, true);
  run(ast.statements, false);
}

int last_line_of(const SourceText& source) { return count_lines(source.text); }

// Node id and label for an identifier found in code.
std::string label_of(const std::string& ident) { return desanitize_identifier(ident); }

// --- scripts -----------------------------------------------------------------

Decoded decode_tree(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);
  std::string goal;
  walk(ast, b, [&](const Stmt& s, bool in_class) {
    if (s.kind == Stmt::Kind::Def) return false;
    if (s.kind != Stmt::Kind::Assign) return false;
    if (in_class && s.target == "goal" && is_str(s.value)) {
      goal = s.value.text;
      return true;
    }
    if (is_ctor(s.value, "Node")) {
      if (!is_sentinel(s.target) && s.target.find('.') == std::string::npos) b.declare(s.target, label_of(s.target), s.line);
      return true;
    }
    const std::string suffix = ".children";
    if (s.target.size() > suffix.size() && s.target.ends_with(suffix) && s.value.kind == Expr::Kind::List) {
      std::string src = s.target.substr(0, s.target.size() - suffix.size());
      if (src.find('.') != std::string::npos) return false;
      bool from_begin = src == "begin";
      if (!from_begin && !is_sentinel(src)) b.reference(src, label_of(src), s.line);
      for (const Expr& item : s.value.items) {
        if (!is_ident(item) || item.text.find('.') != std::string::npos) {
          b.warn("UnknownStatement", "non-identifier child in " + s.target, s.line);
          continue;
        }
        if (is_sentinel(item.text)) continue;
        b.reference(item.text, label_of(item.text), s.line);
        if (!from_begin && !is_sentinel(src)) b.edge(src, item.text, std::nullopt, s.line);
      }
      return true;
    }
    return false;
  });
  LabeledGraph g = b.finish(last_line_of(source));
  if (!goal.empty()) g.attrs["goal"] = goal;
  out.structure = std::move(g);
  return out;
}

std::optional<std::pair<std::string, std::string>> split_arrow(const std::string& text) {
  auto pos = text.find("->");
  if (pos == std::string::npos) return std::nullopt;
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t");
    auto z = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
  };
  std::string l = trim(text.substr(0, pos)), r = trim(text.substr(pos + 2));
  if (l.empty() || r.empty()) return std::nullopt;
  return std::make_pair(l, r);
}

Decoded decode_literal(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);
  std::string goal;
  std::vector<const Stmt*> relation_lists;
  walk(ast, b, [&](const Stmt& s, bool in_class) {
    if (s.kind == Stmt::Kind::Def) {
      if (s.target == "get_relations") {
        for (const auto& inner : s.body)
          if (inner.kind == Stmt::Kind::Return && inner.value.kind == Expr::Kind::List) relation_lists.push_back(&inner);
        return true;
      }
      for (const auto& inner : s.body) {
        if (inner.kind == Stmt::Kind::Return && is_str(inner.value)) {
          if (!is_sentinel(s.target)) b.declare(s.target, inner.value.text, inner.line);
          return true;
        }
      }
      b.unknown("method '" + s.target + "'", s.line);
      return true;
    }
    if (in_class && s.kind == Stmt::Kind::Assign) {
      if (s.target == "title" && is_str(s.value)) {
        goal = s.value.text;
        return true;
      }
      if (s.target == "steps") return true;
    }
    return false;
  });
  for (const Stmt* r : relation_lists) {
    for (const Expr& item : r->value.items) {
      auto pair = is_str(item) ? split_arrow(item.text) : std::nullopt;
      if (!pair) {
        b.unknown("relation entry", r->line);
        continue;
      }
      if (is_sentinel(pair->first) || is_sentinel(pair->second)) continue;
      b.reference(pair->first, label_of(pair->first), r->line);
      b.reference(pair->second, label_of(pair->second), r->line);
      b.edge(pair->first, pair->second, std::nullopt, r->line);
    }
  }
  LabeledGraph g = b.finish(last_line_of(source));
  if (!goal.empty()) g.attrs["goal"] = goal;
  out.structure = std::move(g);
  return out;
}

Decoded decode_networkx(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);
  std::string goal;
  walk(ast, b, [&](const Stmt& s, bool in_class) {
    if (s.kind == Stmt::Kind::Def) return false;
    if (s.kind == Stmt::Kind::Assign) {
      if (in_class && s.target == "goal" && is_str(s.value)) {
        goal = s.value.text;
        return true;
      }
      if (in_class && s.target == "num_steps") return true;
      if (s.value.kind == Expr::Kind::Ctor && s.value.text.ends_with("DiGraph")) return true;
      if (is_str(s.value) && s.target.find('.') == std::string::npos) {
        if (!is_sentinel(s.target)) b.declare(s.target, s.value.text, s.line);
        return true;
      }
      return false;
    }
    if (s.kind == Stmt::Kind::Call) {
      if (s.target.ends_with("add_nodes_from")) {
        for (const Expr& a : s.args)
          for (const Expr& item : a.items)
            if (is_ident(item) && !is_sentinel(item.text)) b.reference(item.text, label_of(item.text), s.line);
        return true;
      }
      if (s.target.ends_with("add_edge") && s.args.size() == 2 && is_ident(s.args[0]) && is_ident(s.args[1])) {
        const std::string& src = s.args[0].text;
        const std::string& dst = s.args[1].text;
        if (is_sentinel(src) || is_sentinel(dst)) return true;
        b.reference(src, label_of(src), s.line);
        b.reference(dst, label_of(dst), s.line);
        b.edge(src, dst, std::nullopt, s.line);
        return true;
      }
    }
    return false;
  });
  LabeledGraph g = b.finish(last_line_of(source));
  if (!goal.empty()) g.attrs["goal"] = goal;
  out.structure = std::move(g);
  return out;
}

// --- explanation graphs ------------------------------------------------------

// Explanation-graph nodes are keyed by their sanitized label so that an
// identifier (ExplTree sources) and a quoted label meet at the same node.
class ExplNodes {
 public:
  explicit ExplNodes(GraphBuilder& b) : b_(b) {}

  std::optional<std::string> from_label(const std::string& label, int line) {
    auto key = key_of(label);
    if (!key) return unusable(label, line);
    if (!b_.has(*key)) {
      b_.ensure(*key, label);
    } else if (!labelled_.count(*key)) {
      b_.set_label(*key, label);
    }
    labelled_.insert(*key);
    return key;
  }

  std::optional<std::string> from_ident(const std::string& ident, int line) {
    auto key = key_of(label_of(ident));
    if (!key) return unusable(ident, line);
    b_.ensure(*key, label_of(ident));
    return key;
  }

 private:
  static std::optional<std::string> key_of(const std::string& label) {
    try {
      return sanitize_identifier(label);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  std::optional<std::string> unusable(const std::string& text, int line) {
    b_.warn("UnknownStatement", "node text '" + text + "' has no alphanumeric characters", line);
    return std::nullopt;
  }

  GraphBuilder& b_;
  std::unordered_set<std::string> labelled_;
};

std::string strip_self(const std::string& target) {
  return target.starts_with("self.") ? target.substr(5) : target;
}

bool take_text_attr(const Stmt& s, LabeledGraph& g) {
  if (s.kind != Stmt::Kind::Assign || !is_str(s.value)) return false;
  std::string key = strip_self(s.target);
  if (key != "belief" && key != "argument" && key != "stance") return false;
  g.attrs[key] = s.value.text;
  return true;
}

Decoded decode_expl_calls(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);
  ExplNodes nodes(b);
  LabeledGraph scratch;
  walk(ast, b, [&](const Stmt& s, bool) {
    if (s.kind == Stmt::Kind::Def) return false;
    if (take_text_attr(s, scratch)) return true;
    if (s.kind == Stmt::Kind::Assign && s.target == "begin" && s.value.kind == Expr::Kind::List) {
      for (const Expr& item : s.value.items) {
        if (is_str(item)) nodes.from_label(item.text, s.line);
        else if (is_ident(item)) nodes.from_ident(item.text, s.line);
      }
      return true;
    }
    if (s.kind == Stmt::Kind::Call && s.target == "add_edge" && s.args.size() == 3 &&
        std::all_of(s.args.begin(), s.args.end(), is_str)) {
      auto src = nodes.from_label(s.args[0].text, s.line);
      auto dst = nodes.from_label(s.args[2].text, s.line);
      if (src && dst) b.edge(*src, *dst, s.args[1].text, s.line);
      return true;
    }
    return false;
  });
  LabeledGraph g = b.finish(last_line_of(source));
  g.attrs = std::move(scratch.attrs);
  out.structure = std::move(g);
  return out;
}

Decoded decode_expl_tree(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);
  ExplNodes nodes(b);
  LabeledGraph scratch;
  walk(ast, b, [&](const Stmt& s, bool) {
    if (s.kind == Stmt::Kind::Def) return false;
    if (take_text_attr(s, scratch)) return true;
    if (s.kind == Stmt::Kind::Assign && s.target == "root_nodes") {
      if (is_ident(s.value)) {
        nodes.from_ident(s.value.text, s.line);
        return true;
      }
      if (s.value.kind == Expr::Kind::List) {
        for (const Expr& item : s.value.items) {
          if (is_ident(item)) nodes.from_ident(item.text, s.line);
          else if (is_str(item)) nodes.from_label(item.text, s.line);
        }
        return true;
      }
      return false;
    }
    if (s.kind == Stmt::Kind::Assign && is_ctor(s.value, "Node") && s.target.find('.') == std::string::npos) {
      nodes.from_ident(s.target, s.line);
      return true;
    }
    const std::string suffix = ".add_edge";
    if (s.kind == Stmt::Kind::Call && s.target.ends_with(suffix) && s.args.size() == 2 && is_str(s.args[0]) &&
        is_str(s.args[1])) {
      std::string src_ident = s.target.substr(0, s.target.size() - suffix.size());
      if (src_ident.find('.') != std::string::npos) return false;
      auto src = nodes.from_ident(src_ident, s.line);
      auto dst = nodes.from_label(s.args[1].text, s.line);
      if (src && dst) b.edge(*src, *dst, s.args[0].text, s.line);
      return true;
    }
    return false;
  });
  LabeledGraph g = b.finish(last_line_of(source));
  g.attrs = std::move(scratch.attrs);
  out.structure = std::move(g);
  return out;
}

// --- propara -----------------------------------------------------------------

std::optional<StateValue> state_of(const Expr& e) {
  if (e.kind == Expr::Kind::None) return StateValue::non_existent();
  if (!is_str(e)) return std::nullopt;
  if (e.text == "UNK") return StateValue::unknown();
  if (e.text.find_first_not_of(" \t\r\n") == std::string::npos) return StateValue::unknown();
  return StateValue::known(e.text);
}

std::optional<std::size_t> state_index(const std::string& target) {
  if (!target.starts_with("state_") || target.size() == 6) return std::nullopt;
  std::size_t k = 0;
  for (std::size_t i = 6; i < target.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(target[i]))) return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(target[i] - '0');
    if (k > 10000) return std::nullopt;
  }
  return k;
}

Decoded decode_propara(const SourceText& source, Mode mode) {
  Decoded out;
  CodeAst ast = parse_code(source, mode, out.warnings);
  GraphBuilder b(mode, out.warnings);  // only used for diagnostics

  const std::vector<Stmt>* body = &ast.statements;
  for (const auto& s : ast.statements)
    if (s.kind == Stmt::Kind::Def && s.target == "main") body = &s.body;
  for (const auto& c : ast.classes) b.unknown("class '" + c.name + "'", c.line);

  static const std::string kTracks = "tracks the location/state ";
  std::vector<std::string> actions;
  std::map<std::size_t, std::string> entity_names;
  struct Row {
    std::string name;
    std::map<std::size_t, StateValue> cells;
    int line;
  };
  std::vector<Row> rows;
  bool seen_init_comment = false;
  for (const auto& s : *body) {
    if (s.kind == Stmt::Kind::Comment) {
      std::string text = s.text;
      auto a = text.find_first_not_of(' ');
      text = a == std::string::npos ? std::string() : text.substr(a);
      while (!text.empty() && text.back() == ' ') text.pop_back();
      if (!seen_init_comment && text == "init") {
        seen_init_comment = true;
        continue;
      }
      auto pos = text.find(' ');
      if (pos != std::string::npos && text.compare(pos + 1, kTracks.size(), kTracks) == 0) {
        if (auto k = state_index(text.substr(0, pos))) {
          entity_names[*k] = text.substr(pos + 1 + kTracks.size());
          continue;
        }
      }
      if (rows.empty() && !text.empty()) actions.push_back(text);
      continue;
    }
    if (s.kind != Stmt::Kind::Def) {
      b.unknown(stmt_text(s), s.line);
      continue;
    }
    Row row{s.target, {}, s.line};
    for (const auto& inner : s.body) {
      if (inner.kind == Stmt::Kind::Comment) continue;
      auto k = inner.kind == Stmt::Kind::Assign ? state_index(inner.target) : std::nullopt;
      auto v = k ? state_of(inner.value) : std::nullopt;
      if (!v) {
        b.unknown(stmt_text(inner), inner.line);
        continue;
      }
      row.cells.insert_or_assign(*k, *v);
    }
    rows.push_back(std::move(row));
  }

  std::size_t m = 0;
  if (!entity_names.empty()) m = entity_names.rbegin()->first + 1;
  for (const auto& r : rows)
    if (!r.cells.empty()) m = std::max(m, r.cells.rbegin()->first + 1);
  if (actions.empty() && rows.size() > 1)
    for (std::size_t t = 1; t < rows.size(); ++t) actions.push_back(desanitize_identifier(rows[t].name));
  if (m == 0 || actions.empty())
    throw Error(ErrorCode::EmptyStructure, "no entity states recovered", last_line_of(source), 1);

  EntityTrace trace;
  trace.actions = actions;
  for (std::size_t k = 0; k < m; ++k) {
    auto it = entity_names.find(k);
    trace.entities.push_back(it != entity_names.end() ? it->second : "state_" + std::to_string(k));
  }
  const std::size_t n = actions.size();
  if (rows.size() > n + 1)
    for (std::size_t t = n + 1; t < rows.size(); ++t)
      b.warn("UnknownStatement", "extra function '" + rows[t].name + "' ignored", rows[t].line);
  std::vector<StateValue> prev(m, StateValue::non_existent());
  for (std::size_t t = 0; t <= n; ++t) {
    std::vector<StateValue> cur = prev;
    if (t < rows.size()) {
      for (std::size_t k = 0; k < m; ++k) {
        auto it = rows[t].cells.find(k);
        if (it != rows[t].cells.end()) {
          cur[k] = it->second;
        } else {
          b.warn("DanglingReference", "state_" + std::to_string(k) + " missing in '" + rows[t].name + "'",
                 rows[t].line);
        }
      }
    } else {
      b.warn("DanglingReference", "no function for step " + std::to_string(t), last_line_of(source));
    }
    trace.states.push_back(cur);
    prev = std::move(cur);
  }
  out.structure = std::move(trace);
  return out;
}

// --- flat-text baselines ----------------------------------------------------

// std::regex backtracks recursively; longer lines are rejected up front.
constexpr std::size_t kMaxRegexLine = 2000;

struct Endpoint {
  std::string id;
  std::string label;
};

std::optional<Endpoint> endpoint(std::string raw) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') raw = raw.substr(1, raw.size() - 2);
  static const std::regex ident(R"([a-z_][a-z0-9_]*)");
  if (std::regex_match(raw, ident)) return Endpoint{raw, desanitize_identifier(raw)};
  try {
    return Endpoint{sanitize_identifier(raw), raw};
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string trim(std::string_view s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  auto z = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, z - a + 1));
}

void add_baseline_edge(GraphBuilder& b, const std::string& l, const std::string& r, int line) {
  auto src = endpoint(l);
  auto dst = endpoint(r);
  if (!src || !dst) {
    b.unknown("edge with empty endpoint", line);
    return;
  }
  if (!is_sentinel(src->id)) b.ensure(src->id, src->label);
  if (!is_sentinel(dst->id)) b.ensure(dst->id, dst->label);
  if (is_sentinel(src->id) || is_sentinel(dst->id)) return;
  b.edge(src->id, dst->id, std::nullopt, line);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

Decoded decode_dot(const SourceText& source, Mode mode) {
  Decoded out;
  GraphBuilder b(mode, out.warnings);
  static const std::regex edge_re(R"re(^\s*("[^"]*"|[A-Za-z0-9_]+)\s*->\s*("[^"]*"|[A-Za-z0-9_]+)\s*(\[[^\]]*\])?\s*;?\s*$)re");
  static const std::regex node_re(R"re(^\s*("[^"]*"|[A-Za-z0-9_]+)\s*(\[[^\]]*\])?\s*;\s*$)re");
  static const std::regex header_re(R"(^\s*(strict\s+)?(di)?graph(\s+[A-Za-z0-9_"]+)?\s*\{\s*$)");
  std::string goal;
  auto lines = split_lines(source.text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line = static_cast<int>(i) + 1;
    std::string text = trim(lines[i]);
    if (text.empty() || text == "}") continue;
    if (text.starts_with("//")) {
      std::string body = trim(text.substr(2));
      if (body.starts_with("goal:")) goal = trim(body.substr(5));
      continue;
    }
    if (text.size() > kMaxRegexLine) {
      b.unknown("overlong line", line);
      continue;
    }
    std::smatch m;
    if (std::regex_match(text, header_re)) continue;
    if (std::regex_match(text, m, edge_re)) {
      add_baseline_edge(b, m[1].str(), m[2].str(), line);
      continue;
    }
    if (std::regex_match(text, m, node_re)) {
      if (auto e = endpoint(m[1].str()); e && !is_sentinel(e->id)) b.ensure(e->id, e->label);
      continue;
    }
    b.unknown("line '" + text + "'", line);
  }
  LabeledGraph g = b.finish(static_cast<int>(lines.size()));
  if (!goal.empty()) g.attrs["goal"] = goal;
  out.structure = std::move(g);
  return out;
}

Decoded decode_edge_list(const SourceText& source, Mode mode) {
  Decoded out;
  GraphBuilder b(mode, out.warnings);
  static const std::regex tuple_re(R"re(\(\s*([^,()]*?)\s*,\s*([^,()]*?)\s*\))re");
  static const std::regex leftover_re(R"([^\s\[\],])");
  std::string goal;
  auto lines = split_lines(source.text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line = static_cast<int>(i) + 1;
    std::string text = trim(lines[i]);
    if (text.starts_with("#")) {
      std::string body = trim(text.substr(1));
      if (body.starts_with("goal:")) {
        goal = trim(body.substr(5));
      } else if (body.starts_with("nodes:")) {
        std::string rest = body.substr(6);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
          auto comma = rest.find(',', pos);
          if (comma == std::string::npos) comma = rest.size();
          if (auto e = endpoint(trim(rest.substr(pos, comma - pos))); e && !is_sentinel(e->id)) b.ensure(e->id, e->label);
          pos = comma + 1;
        }
      }
      continue;
    }
    if (text.size() > kMaxRegexLine) {
      b.unknown("overlong line", line);
      continue;
    }
    std::string leftover;
    auto begin = std::sregex_iterator(text.begin(), text.end(), tuple_re);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      leftover += text.substr(last, static_cast<std::size_t>(m.position()) - last);
      last = static_cast<std::size_t>(m.position() + m.length());
      add_baseline_edge(b, m[1].str(), m[2].str(), line);
    }
    leftover += text.substr(last);
    if (std::regex_search(leftover, leftover_re)) b.unknown("text '" + trim(leftover) + "'", line);
  }
  LabeledGraph g = b.finish(static_cast<int>(lines.size()));
  if (!goal.empty()) g.attrs["goal"] = goal;
  out.structure = std::move(g);
  return out;
}

}  // namespace

Decoded decode_text_baseline(const SourceText& source, Mode mode) {
  if (source.format == CodeFormat::DotDigraph) return decode_dot(source, mode);
  if (source.format == CodeFormat::EdgeListText) return decode_edge_list(source, mode);
  throw Error(ErrorCode::FormatMismatch, std::string("not a text baseline format: ") + to_string(source.format));
}

Decoded decode(const SourceText& source, Mode mode) {
  if (source.text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(ErrorCode::EmptyStructure, "empty source text", 1, 1);
  switch (source.format) {
    case CodeFormat::ScriptTree: return decode_tree(source, mode);
    case CodeFormat::ScriptLiteral: return decode_literal(source, mode);
    case CodeFormat::ScriptNetworkXStyle: return decode_networkx(source, mode);
    case CodeFormat::DotDigraph:
    case CodeFormat::EdgeListText: return decode_text_baseline(source, mode);
    case CodeFormat::ExplLiteral:
    case CodeFormat::ExplRelation: return decode_expl_calls(source, mode);
    case CodeFormat::ExplTree: return decode_expl_tree(source, mode);
    case CodeFormat::ProparaFunctions: return decode_propara(source, mode);
  }
  throw Error(ErrorCode::FormatMismatch, "unhandled format");
}

}  // namespace structcode
