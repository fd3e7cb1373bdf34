#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "check.hpp"
#include "fixtures.hpp"
#include "structcode/prompt.hpp"
#include "structcode/synthetic.hpp"

using namespace structcode;

namespace {

TaskInstance with_goal(const std::string& id, const std::string& goal) {
  TaskInstance t;
  t.id = id;
  t.task = TaskKind::ScriptGen;
  t.input.goal = goal;
  LabeledGraph g;
  g.nodes = {Node{"a", "first step"}, Node{"b", "second step"}};
  g.edges = {Edge{"a", "b", {}}};
  t.gold = g;
  return t;
}

SourceText text(std::size_t bytes, char fill = 'x') {
  std::string s(bytes - 1, fill);
  s += '\n';
  return SourceText{s, CodeFormat::ScriptTree};
}

}  // namespace

TEST_CASE("estimate_tokens") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("12345678") == 2);
  CHECK(estimate_tokens("123456789") == 3);
  CHECK(estimate_tokens("a") == 1);
}

TEST_CASE("PRNG is the standard mt19937_64") {
  // The standard fixes the 10000th output of a default-constructed engine.
  Rng rng(5489u);
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("sample_examples") {
  std::vector<TaskInstance> pool = {with_goal("a", "one"), with_goal("b", "two"), with_goal("c", "three")};
  auto all = sample_examples(pool, 3, 7);
  std::set<std::string> ids;
  for (const auto& t : all) ids.insert(t.id);
  CHECK(ids == std::set<std::string>{"a", "b", "c"});
  CHECK(sample_examples(pool, 2, 42) == sample_examples(pool, 2, 42));
  CHECK(code_of([&] { sample_examples(pool, 4, 1); }) == ErrorCode::KTooLarge);
  CHECK(code_of([&] { sample_examples(pool, 0, 1); }) == ErrorCode::KTooLarge);

  // Every k in the 5..30 operating range draws k distinct instances.
  auto big = synthetic_dataset(TaskKind::ScriptGen, 40, 1);
  for (std::size_t k = 5; k <= 30; ++k) {
    auto s = sample_examples(big, k, k);
    std::set<std::string> u;
    for (const auto& t : s) u.insert(t.id);
    CHECK(u.size() == k);
  }
  // Seeds give different draws.
  CHECK(sample_examples(big, 15, 1) != sample_examples(big, 15, 2));
}

TEST_CASE("assemble_prompt layout") {
  std::vector<SourceText> ex = {text(10, 'a'), text(10, 'b')};
  SourceText stub{"stub\n", CodeFormat::ScriptTree};
  Prompt p = assemble_prompt(ex, stub, 4096);
  CHECK(p.rendered == ex[0].text + "\n\n" + ex[1].text + "\n\n" + stub.text);
  CHECK(p.dropped == 0);
  auto parts = split_prompt(p.rendered);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == ex[0].text);
  CHECK(parts[1] == ex[1].text);
  CHECK(parts[2] == stub.text);
  CHECK(code_of([&] { assemble_prompt(std::vector<SourceText>{}, stub, 4096); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("assemble_prompt: 15 short examples fit in 4096") {
  auto pool = synthetic_dataset(TaskKind::ScriptGen, 15, 3);
  TaskInstance test = with_goal("t", "make hot green tea.");
  Prompt p = assemble_prompt(pool, make_stub(test, CodeFormat::ScriptTree), 4096, CodeFormat::ScriptTree);
  CHECK(p.examples.size() == 15);
  CHECK(p.dropped == 0);
  CHECK(p.example_ids.size() == 15);
  CHECK(p.example_ids.front() == pool.front().id);
  CHECK(estimate_tokens(p.rendered) <= 4096);
  auto parts = split_prompt(p.rendered);
  CHECK(parts.size() == 16);
  for (std::size_t i = 0; i < 15; ++i) CHECK(parts[i] == encode(pool[i], CodeFormat::ScriptTree).text);
}

TEST_CASE("assemble_prompt: front dropping and BudgetExhausted") {
  // Five 400-byte examples, 100-byte stub. Each example with its separator is
  // 402 bytes; the full prompt is 5*402 + 100 = 2110 bytes = 528 tokens.
  std::vector<SourceText> ex;
  for (char c : std::string("abcde")) ex.push_back(text(400, c));
  SourceText stub = text(100, 's');
  CHECK(assemble_prompt(ex, stub, 528).dropped == 0);
  // 527 tokens: drop one -> 4*402+100 = 1708 bytes = 427 tokens
  Prompt p = assemble_prompt(ex, stub, 527);
  CHECK(p.dropped == 1);
  CHECK(p.examples.front().text[0] == 'b');
  CHECK(estimate_tokens(p.rendered) == 427);
  // one example + stub = 502 bytes = 126 tokens
  p = assemble_prompt(ex, stub, 126);
  CHECK(p.dropped == 4);
  CHECK(p.examples.size() == 1);
  CHECK(p.examples.front().text[0] == 'e');
  CHECK(code_of([&] { assemble_prompt(ex, stub, 125); }) == ErrorCode::BudgetExhausted);
  CHECK(code_of([&] { assemble_prompt(ex, text(600, 's'), 100); }) == ErrorCode::BudgetExhausted);
}

TEST_CASE("embed, cosine, kst_loss") {
  std::vector<std::string> vocab = {"a", "b", "c"};
  CHECK(embed("a b a", vocab) == std::vector<double>{2, 1, 0});
  CHECK(embed("zzz yyy", vocab) == std::vector<double>{0, 0, 0});
  CHECK(embed("", vocab) == std::vector<double>{0, 0, 0});
  CHECK(embed("A, b!", vocab) == std::vector<double>{1, 1, 0});
  CHECK(code_of([] { embed("a", {}); }) == ErrorCode::EmptyInput);

  CHECK(cosine({1, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine({1, 0}, {0, 1}) == 0.0);
  CHECK(std::abs(cosine({1, 1}, {1, 0}) - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(cosine({0, 0}, {1, 0}) == 0.0);
  CHECK(code_of([] { cosine({1, 0}, {1, 0, 0}); }) == ErrorCode::DimensionMismatch);

  CHECK(kst_loss(0.8, 0.8) == 0.0);
  CHECK(kst_loss(1.0, 0.0) == 1.0);
  CHECK(std::abs(kst_loss(0.3, 0.7) - 0.16) < 1e-9);
  CHECK(kst_loss(0.7, 0.3) == kst_loss(0.3, 0.7));
}

TEST_CASE("graph_similarity") {
  auto g = [](std::initializer_list<std::pair<const char*, const char*>> es) {
    LabeledGraph out;
    for (auto [a, b] : es) {
      for (const char* id : {a, b})
        if (!out.has_node(id)) out.nodes.push_back(Node{id, id});
      out.edges.push_back(Edge{a, b, {}});
    }
    return out;
  };
  auto e = g({{"a", "b"}, {"b", "c"}});
  CHECK(graph_similarity(e, e) == 1.0);
  CHECK(graph_similarity(e, g({{"x", "y"}})) == 0.0);
  CHECK(std::abs(graph_similarity(e, g({{"a", "b"}, {"a", "c"}})) - 0.5) < 1e-12);
  LabeledGraph bad = e;
  bad.edges.push_back(Edge{"a", "zz", {}});
  CHECK(code_of([&] { graph_similarity(bad, e); }) == ErrorCode::InvalidGraph);
}

TEST_CASE("retrieval") {
  std::vector<TaskInstance> train = {with_goal("i2", "bake bread in oven"), with_goal("i0", "wash the car"),
                                     with_goal("i1", "bread bread butter")};
  auto idx = RetrievalIndex::build(train);
  CHECK(idx.size() == 3);

  // self-similarity ranks first
  CHECK(idx.retrieve(input_text(train[1]), 1).front() == "i0");
  // zero-vector query: all ties, ascending ids
  CHECK(idx.retrieve("zebra", 3) == std::vector<std::string>{"i0", "i1", "i2"});
  CHECK(code_of([&] { idx.retrieve("x", 4); }) == ErrorCode::KTooLarge);

  // brute force: embed everything against the index vocabulary and sort
  for (std::string q : {"bread", "bake oven car", "wash butter bread", "the"}) {
    auto qv = embed(q, idx.vocabulary());
    std::vector<std::pair<double, std::string>> scored;
    for (std::size_t i = 0; i < idx.size(); ++i)
      scored.emplace_back(-cosine(qv, embed(input_text(train[i]), idx.vocabulary())), train[i].id);
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (std::abs(x.first - y.first) > 1e-12) return x.first < y.first;
      return x.second < y.second;
    });
    std::vector<std::string> want;
    for (const auto& s : scored) want.push_back(s.second);
    CAPTURE(q);
    CHECK(idx.retrieve(q, 3) == want);
    CHECK(idx.retrieve(q, 2) == std::vector<std::string>(want.begin(), want.begin() + 2));
  }

  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx.embedding(i).size() == idx.vocabulary().size());

  std::stringstream ss;
  idx.save(ss);
  CHECK(ss.str().rfind("STRUCTCODE-INDEX v1\n", 0) == 0);
  auto back = RetrievalIndex::load(ss);
  CHECK(back == idx);

  std::stringstream bad("NOT-AN-INDEX\n");
  CHECK(code_of([&] { RetrievalIndex::load(bad); }) == ErrorCode::Io);

  TaskInstance empty = with_goal("e", "!!!");
  CHECK(code_of([&] { RetrievalIndex::build({empty}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([&] { RetrievalIndex::build({train[0], train[0]}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("retrieval over a larger split is a permutation with prefix property") {
  auto data = synthetic_dataset(TaskKind::ScriptGen, 60, 17);
  auto idx = RetrievalIndex::build(data);
  auto all = idx.retrieve("bread water oven", idx.size());
  CHECK(std::set<std::string>(all.begin(), all.end()).size() == idx.size());
  for (std::size_t k : {1u, 5u, 15u}) {
    auto top = idx.retrieve("bread water oven", k);
    CHECK(top == std::vector<std::string>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k)));
  }
}
