#include <doctest.h>

#include <algorithm>

#include "check.hpp"
#include "fixtures.hpp"
#include "structcode/pyparse.hpp"
#include "structcode/random.hpp"

using namespace structcode;
using namespace structcode::pyparse;

namespace {

std::vector<TokenKind> kinds(const std::vector<Token>& ts) {
  std::vector<TokenKind> out;
  for (const auto& t : ts) out.push_back(t.kind);
  return out;
}

bool balanced(const std::vector<Token>& ts) {
  int depth = 0;
  for (const auto& t : ts) {
    if (t.kind == TokenKind::Indent) ++depth;
    if (t.kind == TokenKind::Dedent && --depth < 0) return false;
  }
  return depth == 0;
}

AstCounts counts(std::size_t classes, std::size_t attrs, std::size_t methods, std::size_t functions,
                 std::size_t ctors, std::size_t lists, std::size_t strings, std::size_t calls, std::size_t comments,
                 std::size_t returns) {
  return AstCounts{classes, attrs, methods, functions, ctors, lists, strings, calls, comments, returns};
}

}  // namespace

TEST_CASE("tokenize minimal line") {
  auto ts = tokenize("x = \"a\"");
  using K = TokenKind;
  CHECK(kinds(ts) == std::vector<K>{K::Identifier, K::Punct, K::StringLiteral, K::Newline, K::EndOfInput});
  CHECK(ts[2].text == "a");
  CHECK(ts[2].line == 1);
  CHECK(ts[2].column == 5);
}

TEST_CASE("tokenize indentation") {
  auto ts = tokenize("def f():\n  y = 1");
  REQUIRE(!ts.empty());
  CHECK(ts[0].kind == TokenKind::Keyword);
  CHECK(ts[0].text == "def");
  auto y = std::find_if(ts.begin(), ts.end(), [](const Token& t) { return t.text == "y"; });
  REQUIRE(y != ts.end());
  CHECK((y - 1)->kind == TokenKind::Indent);
  CHECK(ts[ts.size() - 2].kind == TokenKind::Dedent);
  CHECK(ts.back().kind == TokenKind::EndOfInput);
  CHECK(balanced(ts));
}

TEST_CASE("tokenize errors") {
  try {
    tokenize("s = \"unclosed");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnterminatedString);
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
  }
  CHECK(code_of([] { tokenize("def f():\n    a = 1\n  b = 2\n"); }) == ErrorCode::InconsistentIndent);

  std::vector<Warning> w;
  auto ts = tokenize("s = \"unclosed", Mode::Tolerant, &w);
  CHECK(w.size() == 1);
  CHECK(ts.back().kind == TokenKind::EndOfInput);
}

TEST_CASE("tokenize strings, comments, tabs") {
  auto ts = tokenize("a = 'it\\'s'  # note\n");
  CHECK(ts[2].kind == TokenKind::StringLiteral);
  CHECK(ts[2].text == "it's");
  CHECK(ts[3].kind == TokenKind::Comment);
  CHECK(ts[3].text.find("note") != std::string::npos);
  // a tab is 4 columns, same as four spaces
  auto tab = tokenize("def f():\n\ta = 1\n    b = 2\n");
  CHECK(balanced(tab));
  CHECK(std::count_if(tab.begin(), tab.end(), [](const Token& t) { return t.kind == TokenKind::Indent; }) == 1);
}

TEST_CASE("parse the main figure Tree") {
  auto r = parse_source(fixtures::read_text(fixtures::golden_path("potpie.tree.py")), Mode::Strict);
  auto c = count_nodes(r.ast);
  // 1 class, goal attribute, __init__, 6 Node() bindings, 6 children lists
  CHECK(c.classes == 1);
  CHECK(c.class_attributes == 1);
  CHECK(c.methods == 1);
  CHECK(c.ctor_assigns == 6);
  CHECK(c.list_assigns == 6);
  CHECK(r.warnings.empty());
}

TEST_CASE("parse the explanation graph figure") {
  auto r = parse_source(fixtures::read_text(fixtures::golden_path("factory_farming.expl-literal.py")), Mode::Strict);
  auto c = count_nodes(r.ast);
  CHECK(c.string_assigns == 3);
  CHECK(c.list_assigns == 1);
  CHECK(c.calls == 5);
  REQUIRE(r.ast.classes.size() == 1);
  const auto& init = r.ast.classes[0].body.at(0);
  std::size_t add_edge_3 = 0;
  for (const auto& s : init.body)
    if (s.kind == Stmt::Kind::Call && s.target == "add_edge" && s.args.size() == 3 &&
        std::all_of(s.args.begin(), s.args.end(), [](const Expr& e) { return e.kind == Expr::Kind::Str; }))
      ++add_edge_3;
  CHECK(add_edge_3 == 5);
}

TEST_CASE("parse empty input") {
  auto r = parse_source("", Mode::Strict);
  CHECK(r.ast.classes.empty());
  CHECK(r.ast.statements.empty());
  CHECK(r.warnings.empty());
}

TEST_CASE("strict parse of every code golden file, recorded AST counts") {
  struct Case {
    const char* file;
    AstCounts want;
  };
  // classes, class attrs, methods, functions, ctor, list, string assigns, calls, comments, returns
  const Case cases[] = {
      {"potpie.tree.py", counts(1, 1, 1, 1, 6, 6, 1, 0, 2, 0)},
      {"potpie.literal.py", counts(1, 2, 7, 7, 0, 0, 1, 0, 0, 7)},
      {"potpie.networkx.py", counts(1, 2, 1, 1, 1, 0, 7, 7, 2, 0)},
      {"factory_farming.expl-literal.py", counts(1, 0, 1, 1, 0, 1, 3, 5, 1, 0)},
      {"factory_farming.expl-relation.py", counts(1, 0, 1, 1, 0, 1, 3, 5, 1, 0)},
      {"factory_farming.expl-tree.py", counts(1, 0, 1, 1, 4, 1, 3, 5, 1, 0)},
      {"photosynthesis.propara.py", counts(0, 0, 0, 4, 0, 0, 8, 0, 6, 0)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    std::string text = fixtures::read_text(fixtures::golden_path(c.file));
    auto r = parse_source(text, Mode::Strict);
    auto got = count_nodes(r.ast);
    CHECK(got.classes == c.want.classes);
    CHECK(got.class_attributes == c.want.class_attributes);
    CHECK(got.methods == c.want.methods);
    CHECK(got.functions == c.want.functions);
    CHECK(got.ctor_assigns == c.want.ctor_assigns);
    CHECK(got.list_assigns == c.want.list_assigns);
    CHECK(got.string_assigns == c.want.string_assigns);
    CHECK(got.calls == c.want.calls);
    CHECK(got.comments == c.want.comments);
    CHECK(got.returns == c.want.returns);

    // tokenize . render keeps token kinds
    auto ts = tokenize(text);
    CHECK(kinds(tokenize(render(ts))) == kinds(ts));
  }
}

TEST_CASE("strict parse rejects junk, tolerant skips it") {
  std::string text = "class A:\n  x = 1 +\n  y = \"b\"\n";
  CHECK(code_of([&] { parse_source(text, Mode::Strict); }) == ErrorCode::ParseFailure);
  auto r = parse_source(text, Mode::Tolerant);
  CHECK(r.warnings.size() == 1);
  CHECK(r.warnings[0].line == 2);
  REQUIRE(r.ast.classes.size() == 1);
  CHECK(count_nodes(r.ast).string_assigns == 1);
}

TEST_CASE("truncate_at_boundary") {
  std::string tree = fixtures::read_text(fixtures::golden_path("potpie.tree.py"));
  CHECK(truncate_at_boundary(tree + "class Next:\n  a = 1\n") == tree);
  CHECK(truncate_at_boundary(tree) == tree);
  // a completion that re-emits the header of the stub and then starts another class
  std::string re_emit = tree + "\n\nclass Tree:\n\n  goal = \"other\"\n";
  CHECK(truncate_at_boundary(re_emit) == tree + "\n\n");
  // leading comments are not statements, so the first class is never a boundary
  CHECK(truncate_at_boundary("# header\nclass A:\n  x = 1\n") == "# header\nclass A:\n  x = 1\n");
  std::string propara = fixtures::read_text(fixtures::golden_path("photosynthesis.propara.py"));
  CHECK(truncate_at_boundary(propara + "def main():\n  # init\n") == propara);
}

TEST_CASE("fuzz: tolerant parse never throws, indents stay balanced") {
  Rng rng(2024);
  const std::string alphabet = "abc_ =()[],.:\"'#\\\n\n    \t0123";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    std::size_t n = uniform_below(rng, 80);
    for (std::size_t j = 0; j < n; ++j) s += alphabet[uniform_below(rng, alphabet.size())];
    CHECK_NOTHROW(parse_source(s, Mode::Tolerant));
    std::vector<Warning> w;
    auto ts = tokenize(s, Mode::Tolerant, &w);
    CHECK(balanced(ts));
    CHECK(ts.back().kind == TokenKind::EndOfInput);
  }
}
