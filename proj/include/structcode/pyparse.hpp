#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace structcode::pyparse {

enum class TokenKind {
  Identifier,
  StringLiteral,
  Number,
  Keyword,  // class, def, return
  Punct,
  Comment,
  Newline,
  Indent,
  Dedent,
  EndOfInput,
};

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;  // string literals without quotes, comments without '#'
  int line = 1;
  int column = 1;
};

enum class Mode { Strict, Tolerant };

// Diagnostic recorded instead of an exception in tolerant mode.
struct Warning {
  std::string category;  // UnknownStatement, DanglingReference, DuplicateAssign, SyntaxError, TokenError
  std::string message;
  int line = 0;
  int column = 0;
};

// Indentation-sensitive tokenizer for the restricted Python-syntax subset.
// Tabs expand to 4 columns. Newlines inside brackets are joined, blank lines
// produce no tokens. Strict mode throws Error(UnterminatedString) or
// Error(InconsistentIndent); tolerant mode repairs and records a TokenError.
std::vector<Token> tokenize(std::string_view text, Mode mode = Mode::Strict,
                            std::vector<Warning>* warnings = nullptr);

// Re-serializes a token stream with canonical spacing; tokenize(render(t))
// yields the same kinds as t.
std::string render(const std::vector<Token>& tokens);

struct Expr {
  enum class Kind { Str, Num, Ident, None, List, Ctor };
  Kind kind = Kind::None;
  std::string text;         // Str value, Num digits, dotted Ident or Ctor name
  std::vector<Expr> items;  // List elements / Ctor arguments
};

struct Stmt {
  enum class Kind { Assign, Call, Comment, Return, Def };
  Kind kind = Kind::Comment;
  std::string target;  // Assign: dotted target; Call: dotted callee; Def: name
  std::string text;    // Comment text
  Expr value;          // Assign / Return
  std::vector<Expr> args;            // Call arguments
  std::vector<std::string> params;   // Def parameters
  std::vector<Stmt> body;            // Def body
  int line = 0;
};

struct ClassDecl {
  std::string name;
  std::vector<Stmt> body;  // attribute assigns, methods (Def), comments
  int line = 0;
};

struct CodeAst {
  std::vector<ClassDecl> classes;
  std::vector<Stmt> statements;  // top-level functions and statements
};

struct ParseResult {
  CodeAst ast;
  std::vector<Warning> warnings;
};

// Recursive-descent parse of a complete token stream (must end with
// EndOfInput). Strict mode throws Error(ParseFailure) at the first statement
// it cannot recognize; tolerant mode skips it to the next Newline.
ParseResult parse(const std::vector<Token>& tokens, Mode mode = Mode::Tolerant);

// tokenize + parse. In tolerant mode this never throws.
ParseResult parse_source(std::string_view text, Mode mode = Mode::Tolerant);

// Prefix of `text` up to the first column-0 `class`/`def` line that follows at
// least one statement; the whole text when there is none.
std::string truncate_at_boundary(std::string_view text);

struct AstCounts {
  std::size_t classes = 0;
  std::size_t class_attributes = 0;  // assigns directly in a class body
  std::size_t methods = 0;           // defs directly in a class body
  std::size_t functions = 0;         // every def, nested or not
  std::size_t ctor_assigns = 0;
  std::size_t list_assigns = 0;
  std::size_t string_assigns = 0;
  std::size_t calls = 0;
  std::size_t comments = 0;
  std::size_t returns = 0;

  bool operator==(const AstCounts&) const = default;
};

AstCounts count_nodes(const CodeAst& ast);

}  // namespace structcode::pyparse
