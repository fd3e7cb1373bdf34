#include "structcode/pyparse.hpp"

#include <cctype>
#include <optional>

#include "structcode/error.hpp"

namespace structcode::pyparse {

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "Identifier";
    case TokenKind::StringLiteral: return "StringLiteral";
    case TokenKind::Number: return "Number";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Punct: return "Punct";
    case TokenKind::Comment: return "Comment";
    case TokenKind::Newline: return "Newline";
    case TokenKind::Indent: return "Indent";
    case TokenKind::Dedent: return "Dedent";
    case TokenKind::EndOfInput: return "EndOfInput";
  }
  return "?";
}

namespace {

constexpr int kTabWidth = 4;

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view text, Mode mode, std::vector<Warning>* warnings)
      : text_(text), mode_(mode), warnings_(warnings) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      char c = text_[pos_];
      if (c == '\n') {
        if (line_has_tokens_ && depth_ == 0) emit(TokenKind::Newline, "", line_, col_);
        advance_line();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        bump();
        continue;
      }
      if (c == '#') {
        lex_comment();
        continue;
      }
      if (c == '"' || c == '\'') {
        lex_string();
        continue;
      }
      if (digit(c)) {
        lex_number();
        continue;
      }
      if (ident_start(c)) {
        lex_identifier();
        continue;
      }
      lex_punct();
    }
    if (line_has_tokens_ && depth_ == 0) emit(TokenKind::Newline, "", line_, col_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", line_, 1);
    }
    emit(TokenKind::EndOfInput, "", line_, col_);
    return std::move(tokens_);
  }

 private:
  void bump() {
    ++pos_;
    ++col_;
  }

  void advance_line() {
    ++pos_;
    ++line_;
    col_ = 1;
    line_has_tokens_ = false;
    at_line_start_ = depth_ == 0;
  }

  void emit(TokenKind kind, std::string text, int line, int col) {
    tokens_.push_back(Token{kind, std::move(text), line, col});
    if (kind != TokenKind::Newline && kind != TokenKind::Indent && kind != TokenKind::Dedent) line_has_tokens_ = true;
  }

  void problem(ErrorCode code, const std::string& message, int line, int col) {
    if (mode_ == Mode::Strict) throw Error(code, message, line, col);
    if (warnings_) warnings_->push_back(Warning{"TokenError", message, line, col});
  }

  // Returns false when the line was blank and fully consumed.
  bool handle_indentation() {
    int width = 0;
    std::size_t p = pos_;
    while (p < text_.size()) {
      char c = text_[p];
      if (c == ' ') ++width;
      else if (c == '\t') width += kTabWidth;
      else if (c == '\r' || c == '\f' || c == '\v') {
      } else break;
      ++p;
    }
    col_ += static_cast<int>(p - pos_);
    pos_ = p;
    if (pos_ >= text_.size()) return false;
    if (text_[pos_] == '\n') {
      advance_line();
      return false;
    }
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(TokenKind::Indent, "", line_, 1);
      return true;
    }
    while (width < indents_.back()) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", line_, 1);
    }
    if (width != indents_.back())
      problem(ErrorCode::InconsistentIndent, "unindent does not match any outer indentation level", line_, 1);
    return true;
  }

  void lex_comment() {
    int col = col_;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view body = text_.substr(pos_ + 1, end - pos_ - 1);
    while (!body.empty() && (body.front() == ' ' || body.front() == '\t')) body.remove_prefix(1);
    while (!body.empty() && (body.back() == ' ' || body.back() == '\t' || body.back() == '\r')) body.remove_suffix(1);
    if (depth_ == 0) emit(TokenKind::Comment, std::string(body), line_, col);
    col_ += static_cast<int>(end - pos_);
    pos_ = end;
  }

  void lex_string() {
    const int line = line_;
    const int col = col_;
    const char quote = text_[pos_];
    const bool triple = pos_ + 2 < text_.size() && text_[pos_ + 1] == quote && text_[pos_ + 2] == quote;
    std::size_t skip = triple ? 3 : 1;
    pos_ += skip;
    col_ += static_cast<int>(skip);
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || (!triple && text_[pos_] == '\n')) {
        problem(ErrorCode::UnterminatedString, "unterminated string literal", line, col);
        emit(TokenKind::StringLiteral, std::move(value), line, col);
        return;
      }
      char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        char n = text_[pos_ + 1];
        switch (n) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          case '0': value += '\0'; break;
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\n': ++line_; col_ = -1; break;  // line continuation
          default:
            value += '\\';
            value += n;
        }
        pos_ += 2;
        col_ += 2;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          bump();
          break;
        }
        if (pos_ + 2 < text_.size() && text_[pos_ + 1] == quote && text_[pos_ + 2] == quote) {
          pos_ += 3;
          col_ += 3;
          break;
        }
      }
      if (c == '\n') {
        ++line_;
        col_ = 0;
      }
      value += c;
      bump();
    }
    emit(TokenKind::StringLiteral, std::move(value), line, col);
  }

  void lex_number() {
    int col = col_;
    std::size_t start = pos_;
    while (pos_ < text_.size() && (digit(text_[pos_]) || text_[pos_] == '_')) bump();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
      bump();
      while (pos_ < text_.size() && digit(text_[pos_])) bump();
    }
    emit(TokenKind::Number, std::string(text_.substr(start, pos_ - start)), line_, col);
  }

  void lex_identifier() {
    int col = col_;
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
    std::string word(text_.substr(start, pos_ - start));
    bool keyword = word == "class" || word == "def" || word == "return";
    emit(keyword ? TokenKind::Keyword : TokenKind::Identifier, std::move(word), line_, col);
  }

  void lex_punct() {
    int col = col_;
    char c = text_[pos_];
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      pos_ += 2;
      col_ += 2;
      emit(TokenKind::Punct, "->", line_, col);
      return;
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
    bump();
    emit(TokenKind::Punct, std::string(1, c), line_, col);
  }

  std::string_view text_;
  Mode mode_;
  std::vector<Warning>* warnings_;
  std::vector<Token> tokens_;
  std::vector<int> indents_{0};
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, Mode mode, std::vector<Warning>* warnings) {
  return Lexer(text, mode, warnings).run();
}

std::string render(const std::vector<Token>& tokens) {
  std::string out;
  int level = 0;
  bool line_open = false;
  for (const auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::Indent: ++level; continue;
      case TokenKind::Dedent: --level; continue;
      case TokenKind::EndOfInput: continue;
      case TokenKind::Newline:
        out += '\n';
        line_open = false;
        continue;
      default: break;
    }
    if (!line_open) {
      out.append(static_cast<std::size_t>(level > 0 ? level * 2 : 0), ' ');
      line_open = true;
    } else {
      out += ' ';
    }
    switch (t.kind) {
      case TokenKind::StringLiteral: out += quote(t.text); break;
      case TokenKind::Comment: out += "# " + t.text; break;
      default: out += t.text;
    }
  }
  return out;
}

namespace {

struct SyntaxError {
  std::string message;
  int line;
  int column;
};

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, Mode mode) : toks_(tokens), mode_(mode) {}

  ParseResult run() {
    ParseResult result;
    parse_items(result.ast.statements, &result.ast.classes, /*nested=*/false);
    result.warnings = std::move(warnings_);
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return pos_ >= toks_.size() || toks_[pos_].kind == TokenKind::EndOfInput; }
  const Token& next() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::Punct || t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword
                            ? "'" + t.text + "'"
                            : std::string(to_string(t.kind));
    throw SyntaxError{"expected " + expected + ", found " + found, t.line, t.column};
  }

  void expect_punct(const char* p) {
    if (!is_punct(p)) fail(std::string("'") + p + "'");
    next();
  }

  std::string expect_identifier() {
    if (peek().kind != TokenKind::Identifier) fail("identifier");
    return next().text;
  }

  void end_of_statement() {
    if (peek().kind == TokenKind::Comment) {
      pending_comment_ = next();
    }
    if (peek().kind == TokenKind::Newline) {
      next();
      return;
    }
    if (at_end() || peek().kind == TokenKind::Dedent) return;
    fail("end of line");
  }

  void recover(const SyntaxError& e) {
    if (mode_ == Mode::Strict) throw Error(ErrorCode::ParseFailure, e.message, e.line, e.column);
    warnings_.push_back(Warning{"SyntaxError", e.message, e.line, e.column});
    while (!at_end() && peek().kind != TokenKind::Newline) {
      // An Indent/Dedent cannot appear mid-line, so this only skips the rest
      // of the logical line.
      if (peek().kind == TokenKind::Indent || peek().kind == TokenKind::Dedent) return;
      next();
    }
    if (peek().kind == TokenKind::Newline) next();
  }

  // Parses statements until the Dedent that closes the current block (consumed
  // by the caller) or end of input.
  void parse_items(std::vector<Stmt>& out, std::vector<ClassDecl>* classes, bool nested) {
    int stray_indents = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == TokenKind::Dedent) {
        if (stray_indents > 0) {
          --stray_indents;
          next();
          continue;
        }
        if (nested) return;
        next();
        continue;
      }
      if (t.kind == TokenKind::Newline) {
        next();
        continue;
      }
      if (t.kind == TokenKind::Indent) {
        if (mode_ == Mode::Strict) throw Error(ErrorCode::ParseFailure, "unexpected indent", t.line, t.column);
        warnings_.push_back(Warning{"SyntaxError", "unexpected indent", t.line, t.column});
        ++stray_indents;
        next();
        continue;
      }
      try {
        if (t.kind == TokenKind::Keyword && t.text == "class" && classes) {
          classes->push_back(parse_class());
          continue;
        }
        if (t.kind == TokenKind::Keyword && t.text == "def") {
          out.push_back(parse_def());
          continue;
        }
        out.push_back(parse_simple());
        if (pending_comment_) {
          out.push_back(comment_stmt(*pending_comment_));
          pending_comment_.reset();
        }
      } catch (const SyntaxError& e) {
        pending_comment_.reset();
        recover(e);
      }
    }
  }

  static Stmt comment_stmt(const Token& t) {
    Stmt s;
    s.kind = Stmt::Kind::Comment;
    s.text = t.text;
    s.line = t.line;
    return s;
  }

  // ':' Newline [Indent items Dedent]
  void parse_block(std::vector<Stmt>& body, std::vector<ClassDecl>* classes) {
    expect_punct(":");
    if (peek().kind == TokenKind::Comment) body.push_back(comment_stmt(next()));
    if (peek().kind != TokenKind::Newline && !at_end()) fail("end of line");
    if (peek().kind == TokenKind::Newline) next();
    if (peek().kind != TokenKind::Indent) return;  // empty body, e.g. a stub ending at a header
    next();
    parse_items(body, classes, /*nested=*/true);
    if (peek().kind == TokenKind::Dedent) next();
  }

  ClassDecl parse_class() {
    ClassDecl decl;
    decl.line = next().line;
    decl.name = expect_identifier();
    if (is_punct("(")) {
      next();
      while (!is_punct(")")) {
        if (at_end() || peek().kind == TokenKind::Newline) fail("')'");
        next();
      }
      next();
    }
    parse_block(decl.body, nullptr);
    return decl;
  }

  Stmt parse_def() {
    Stmt s;
    s.kind = Stmt::Kind::Def;
    s.line = next().line;
    s.target = expect_identifier();
    expect_punct("(");
    if (!is_punct(")")) {
      s.params.push_back(expect_identifier());
      while (is_punct(",")) {
        next();
        s.params.push_back(expect_identifier());
      }
    }
    expect_punct(")");
    parse_block(s.body, nullptr);
    return s;
  }

  std::string parse_dotted() {
    std::string name = expect_identifier();
    while (is_punct(".")) {
      next();
      name += '.';
      name += expect_identifier();
    }
    return name;
  }

  Stmt parse_simple() {
    Stmt s;
    const Token& first = peek();
    s.line = first.line;
    if (first.kind == TokenKind::Comment) {
      s = comment_stmt(next());
      if (peek().kind == TokenKind::Newline) next();
      return s;
    }
    if (first.kind == TokenKind::Keyword && first.text == "return") {
      next();
      s.kind = Stmt::Kind::Return;
      s.value = parse_expr(0);
      end_of_statement();
      return s;
    }
    if (first.kind != TokenKind::Identifier) fail("statement");
    std::string name = parse_dotted();
    if (is_punct("=")) {
      next();
      s.kind = Stmt::Kind::Assign;
      s.target = std::move(name);
      s.value = parse_expr(0);
      end_of_statement();
      return s;
    }
    if (is_punct("(")) {
      s.kind = Stmt::Kind::Call;
      s.target = std::move(name);
      s.args = parse_args(0);
      end_of_statement();
      return s;
    }
    fail("'=' or '('");
  }

  std::vector<Expr> parse_args(int depth) {
    expect_punct("(");
    std::vector<Expr> args;
    while (!is_punct(")")) {
      args.push_back(parse_expr(depth + 1));
      if (is_punct(",")) {
        next();
        continue;
      }
      if (!is_punct(")")) fail("',' or ')'");
    }
    next();
    return args;
  }

  Expr parse_atom() {
    const Token& t = peek();
    Expr e;
    switch (t.kind) {
      case TokenKind::StringLiteral:
        e.kind = Expr::Kind::Str;
        e.text = next().text;
        // adjacent literals concatenate
        while (peek().kind == TokenKind::StringLiteral) e.text += next().text;
        return e;
      case TokenKind::Number:
        e.kind = Expr::Kind::Num;
        e.text = next().text;
        return e;
      case TokenKind::Identifier:
        if (t.text == "None") {
          next();
          e.kind = Expr::Kind::None;
          return e;
        }
        e.kind = Expr::Kind::Ident;
        e.text = parse_dotted();
        return e;
      default: fail("expression");
    }
  }

  Expr parse_expr(int depth) {
    if (depth > 32) fail("shallower expression");
    if (is_punct("[")) {
      next();
      Expr list;
      list.kind = Expr::Kind::List;
      while (!is_punct("]")) {
        list.items.push_back(parse_atom());
        if (is_punct(",")) {
          next();
          continue;
        }
        if (!is_punct("]")) fail("',' or ']'");
      }
      next();
      return list;
    }
    Expr e = parse_atom();
    if (e.kind == Expr::Kind::Ident && is_punct("(")) {
      e.kind = Expr::Kind::Ctor;
      e.items = parse_args(depth);
    }
    return e;
  }

  const std::vector<Token>& toks_;
  Mode mode_;
  std::size_t pos_ = 0;
  std::vector<Warning> warnings_;
  std::optional<Token> pending_comment_;
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens, Mode mode) {
  if (tokens.empty() || tokens.back().kind != TokenKind::EndOfInput)
    throw Error(ErrorCode::InvalidArgument, "token stream must end with EndOfInput");
  return Parser(tokens, mode).run();
}

ParseResult parse_source(std::string_view text, Mode mode) {
  std::vector<Warning> lex_warnings;
  auto tokens = tokenize(text, mode, &lex_warnings);
  ParseResult result = parse(tokens, mode);
  result.warnings.insert(result.warnings.begin(), lex_warnings.begin(), lex_warnings.end());
  return result;
}

std::string truncate_at_boundary(std::string_view text) {
  bool seen_statement = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::size_t next_line = end == std::string_view::npos ? text.size() : end + 1;
    std::string_view line = text.substr(pos, next_line - pos);
    auto starts_decl = [&line](std::string_view kw) {
      return line.size() > kw.size() && line.substr(0, kw.size()) == kw &&
             !ident_char(line[kw.size()]);
    };
    if (seen_statement && (starts_decl("class") || starts_decl("def"))) return std::string(text.substr(0, pos));
    std::size_t first = line.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && line[first] != '#') seen_statement = true;
    pos = next_line;
  }
  return std::string(text);
}

namespace {

void count_stmts(const std::vector<Stmt>& body, AstCounts& c) {
  for (const auto& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        if (s.value.kind == Expr::Kind::Ctor) ++c.ctor_assigns;
        if (s.value.kind == Expr::Kind::List) ++c.list_assigns;
        if (s.value.kind == Expr::Kind::Str) ++c.string_assigns;
        break;
      case Stmt::Kind::Call: ++c.calls; break;
      case Stmt::Kind::Comment: ++c.comments; break;
      case Stmt::Kind::Return: ++c.returns; break;
      case Stmt::Kind::Def:
        ++c.functions;
        count_stmts(s.body, c);
        break;
    }
  }
}

}  // namespace

AstCounts count_nodes(const CodeAst& ast) {
  AstCounts c;
  c.classes = ast.classes.size();
  for (const auto& cls : ast.classes) {
    for (const auto& s : cls.body) {
      if (s.kind == Stmt::Kind::Assign) ++c.class_attributes;
      if (s.kind == Stmt::Kind::Def) ++c.methods;
    }
    count_stmts(cls.body, c);
  }
  count_stmts(ast.statements, c);
  return c;
}

}  // namespace structcode::pyparse
