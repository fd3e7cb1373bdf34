#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "check.hpp"
#include "fixtures.hpp"
#include "structcode/error.hpp"
#include "structcode/graph.hpp"
#include "structcode/synthetic.hpp"

using namespace structcode;

namespace {

LabeledGraph chain(std::initializer_list<const char*> ids) {
  LabeledGraph g;
  const char* prev = nullptr;
  for (const char* id : ids) {
    g.nodes.push_back(Node{id, id});
    if (prev) g.edges.push_back(Edge{prev, id, {}});
    prev = id;
  }
  return g;
}

}  // namespace

TEST_CASE("sanitize_identifier") {
  CHECK(sanitize_identifier("Take out several plates") == "take_out_several_plates");
  CHECK(sanitize_identifier("Begin!!") == "begin");
  CHECK(sanitize_identifier("2 eggs, beaten") == "n_2_eggs_beaten");
  CHECK(code_of([] { sanitize_identifier(" ?! "); }) == ErrorCode::EmptyLabel);
  CHECK(code_of([] { sanitize_identifier(""); }) == ErrorCode::EmptyLabel);

  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    std::size_t n = 1 + uniform_below(rng, 20);
    for (std::size_t j = 0; j < n; ++j) s += static_cast<char>(32 + uniform_below(rng, 95));
    std::string once;
    try {
      once = sanitize_identifier(s);
    } catch (const Error&) {
      continue;
    }
    CHECK(sanitize_identifier(once) == once);
    REQUIRE(!once.empty());
    CHECK((std::islower(static_cast<unsigned char>(once[0])) || once[0] == '_'));
    CHECK(std::all_of(once.begin(), once.end(), [](char c) {
      return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    }));
  }
}

TEST_CASE("resolve_collisions") {
  using V = std::vector<std::string>;
  CHECK(resolve_collisions(V{"a", "b", "a"}) == V{"a", "b", "a_2"});
  CHECK(resolve_collisions(V{"a", "a", "a"}) == V{"a", "a_2", "a_3"});
  CHECK(resolve_collisions(V{"x"}) == V{"x"});
  // a_2 already taken by an input id
  auto out = resolve_collisions(V{"a", "a_2", "a"});
  CHECK(out[0] == "a");
  CHECK(out[1] == "a_2");
  CHECK(out[2] == "a_3");

  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    V ids;
    std::size_t n = uniform_below(rng, 12);
    for (std::size_t j = 0; j < n; ++j) ids.push_back(std::string(1, static_cast<char>('a' + uniform_below(rng, 3))) +
                                                      (uniform_below(rng, 4) == 0 ? "_2" : ""));
    auto r = resolve_collisions(ids);
    REQUIRE(r.size() == ids.size());
    CHECK(std::set<std::string>(r.begin(), r.end()).size() == r.size());
    std::set<std::string> seen;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (seen.insert(ids[j]).second) CHECK(r[j] == ids[j]);
    }
  }
}

TEST_CASE("validate_graph") {
  CHECK(validate_graph(chain({"a", "b", "c"})).empty());

  LabeledGraph dangling = chain({"a"});
  dangling.edges.push_back(Edge{"a", "z", {}});
  auto v = validate_graph(dangling);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DanglingEdge);
  CHECK(v[0].src == "a");
  CHECK(v[0].dst == "z");

  LabeledGraph dup;
  dup.nodes = {Node{"a", "x"}, Node{"a", "y"}};
  v = validate_graph(dup);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DuplicateId);
  CHECK(v[0].id == "a");

  LabeledGraph mixed = chain({"a", "b", "c"});
  mixed.edges[0].relation = "causes";
  v = validate_graph(mixed);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::MixedEdgeTyping);

  v = validate_graph(LabeledGraph{});
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::EmptyGraph);
}

TEST_CASE("is_dag") {
  CHECK(is_dag(chain({"a", "b", "c"})));
  LabeledGraph cyc = chain({"a", "b"});
  cyc.edges.push_back(Edge{"b", "a", {}});
  CHECK_FALSE(is_dag(cyc));
  LabeledGraph self = chain({"a"});
  self.edges.push_back(Edge{"a", "a", {}});
  CHECK_FALSE(is_dag(self));
  CHECK(is_dag(std::get<LabeledGraph>(*fixtures::potpie().gold)));
  LabeledGraph dangling = chain({"a"});
  dangling.edges.push_back(Edge{"a", "z", {}});
  CHECK(code_of([&] { is_dag(dangling); }) == ErrorCode::InvalidGraph);
}

TEST_CASE("topological_order") {
  using V = std::vector<std::string>;
  LabeledGraph fork;
  fork.nodes = {Node{"a", "a"}, Node{"c", "c"}, Node{"b", "b"}};
  fork.edges = {Edge{"a", "c", {}}, Edge{"a", "b", {}}};
  CHECK(topological_order(fork) == V{"a", "b", "c"});

  CHECK(topological_order(chain({"solo"})) == V{"solo"});

  // Diamond: valid orders are a,b,c,d and a,c,b,d; the label tie-break picks b first.
  LabeledGraph diamond;
  diamond.nodes = {Node{"d", "d"}, Node{"c", "c"}, Node{"b", "b"}, Node{"a", "a"}};
  diamond.edges = {Edge{"a", "c", {}}, Edge{"a", "b", {}}, Edge{"c", "d", {}}, Edge{"b", "d", {}}};
  CHECK(topological_order(diamond) == V{"a", "b", "c", "d"});

  LabeledGraph cyc = chain({"a", "b"});
  cyc.edges.push_back(Edge{"b", "a", {}});
  CHECK(code_of([&] { topological_order(cyc); }) == ErrorCode::CyclicGraph);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    LabeledGraph g = random_dag(rng, 3 + uniform_below(rng, 10));
    auto order = topological_order(g);
    CHECK(order == topological_order(g));
    REQUIRE(order.size() == g.nodes.size());
    std::map<std::string, std::size_t> pos;
    for (std::size_t j = 0; j < order.size(); ++j) pos[order[j]] = j;
    CHECK(pos.size() == g.nodes.size());
    for (const auto& e : g.edges) CHECK(pos[e.src] < pos[e.dst]);
  }
}

TEST_CASE("normalize_label") {
  CHECK(normalize_label("  Factory   Farming ") == "factory farming");
  CHECK(normalize_label("pies!") == "pies");
  CHECK(normalize_label("") == "");
  CHECK(normalize_label("a\tb\nc") == "a b c");
}

TEST_CASE("graph_stats") {
  auto s = graph_stats(LabeledGraph{});
  CHECK(s.node_count == 0);
  CHECK(s.edge_count == 0);
  CHECK(s.avg_degree == 0.0);
  LabeledGraph tri = chain({"a", "b", "c"});
  tri.edges.push_back(Edge{"a", "c", {}});
  s = graph_stats(tri);
  CHECK(s.node_count == 3);
  CHECK(s.edge_count == 3);
  CHECK(s.avg_degree == 2.0);
}

TEST_CASE("StateValue and trace validation") {
  CHECK(code_of([] { StateValue::known("   "); }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(StateValue::known(" soil "));
  EntityTrace t = std::get<EntityTrace>(*fixtures::photosynthesis().gold);
  CHECK_NOTHROW(validate_trace(t));
  t.states.pop_back();
  CHECK(code_of([&] { validate_trace(t); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("validate_instance") {
  TaskInstance t = fixtures::potpie(TaskKind::EdgePrediction);
  CHECK_NOTHROW(validate_instance(t));
  t.input.nodes.clear();
  CHECK(code_of([&] { validate_instance(t); }) == ErrorCode::InvalidArgument);
  TaskInstance p = fixtures::potpie();
  p.gold = std::get<EntityTrace>(*fixtures::photosynthesis().gold);
  CHECK(code_of([&] { validate_instance(p); }) == ErrorCode::InvalidArgument);
}
