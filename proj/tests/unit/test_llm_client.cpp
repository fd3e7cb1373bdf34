#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "check.hpp"
#include "fixtures.hpp"
#include "structcode/llm_client.hpp"

using namespace structcode;
using json = nlohmann::json;

namespace {

Prompt prompt_of(const std::string& rendered, const std::string& stub = "") {
  Prompt p;
  p.rendered = rendered;
  p.stub = SourceText{stub, CodeFormat::ScriptTree};
  return p;
}

// A loopback completions server. `handler` decides each response.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/v1/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void reply(httplib::Response& res, const std::string& text) {
  res.set_content(json{{"choices", json::array({json{{"text", text}}})}}.dump(), "application/json");
}

CompletionConfig config_for(const StubServer& s) {
  CompletionConfig c;
  c.endpoint_url = s.url();
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST_CASE("prompt_hash and apply_stop") {
  // FNV-1a 64 test vectors
  CHECK(prompt_hash("") == "cbf29ce484222325");
  CHECK(prompt_hash("a") == "af63dc4c8601ec8c");
  CHECK(prompt_hash("foobar") == "85944171f73967e8");

  CHECK(apply_stop("abc\nclass X", {"\nclass "}) == "abc");
  CHECK(apply_stop("a\n\n\nb\nclass ", {"\nclass ", "\n\n\n"}) == "a");
  CHECK(apply_stop("plain", {"\nclass "}) == "plain");
  CHECK(apply_stop("plain", {}) == "plain");
}

TEST_CASE("validate_config") {
  CHECK_NOTHROW(validate_config(CompletionConfig{}));
  auto bad = [](auto mutate) {
    CompletionConfig c;
    mutate(c);
    return code_of([&] { validate_config(c); });
  };
  CHECK(bad([](CompletionConfig& c) { c.max_tokens = 0; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.temperature = -0.1; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.stop_sequences = {"a", "b", "c", "d", "e"}; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.stop_sequences = {""}; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.parallelism = 0; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.max_retries = -1; }) == ErrorCode::InvalidArgument);
  CHECK(bad([](CompletionConfig& c) { c.timeout_seconds = 0; }) == ErrorCode::InvalidArgument);
}

TEST_CASE("oracle backend returns gold minus stub") {
  TaskInstance t = fixtures::potpie();
  SourceText gold = encode(t, CodeFormat::ScriptTree);
  SourceText stub = make_stub(t, CodeFormat::ScriptTree);
  OracleBackend oracle({{t.id, gold}});
  std::string completion = oracle.complete(prompt_of("...\n\n" + stub.text, stub.text), t.id);
  CHECK(stub.text + completion == gold.text);
  auto decoded = decode(SourceText{stub.text + completion, CodeFormat::ScriptTree});
  CHECK(canonical_form(std::get<LabeledGraph>(decoded.structure)) == canonical_form(std::get<LabeledGraph>(*t.gold)));
  CHECK(code_of([&] { oracle.complete(prompt_of(stub.text, stub.text), "missing"); }) ==
        ErrorCode::MissingOracleEntry);
}

TEST_CASE("canned backend") {
  CannedBackend canned({{prompt_hash("p1"), "one\nclass Next:"}, {prompt_hash("p2"), "two"}});
  CHECK(canned.complete(prompt_of("p1"), "a") == "one");
  CHECK(canned.complete(prompt_of("p2"), "b") == "two");
  CHECK(code_of([&] { canned.complete(prompt_of("p3"), "c"); }) == ErrorCode::MissingOracleEntry);

  std::string path = "canned_test.json";
  {
    std::ofstream out(path);
    out << json{{prompt_hash("p1"), "x"}}.dump();
  }
  CHECK(CannedBackend::from_file(path).complete(prompt_of("p1"), "a") == "x");
  {
    std::ofstream out(path);
    out << "[1, 2]";
  }
  CHECK(code_of([&] { CannedBackend::from_file(path); }) == ErrorCode::SchemaError);
  {
    std::ofstream out(path);
    out << "{\"k\": 3}";
  }
  CHECK(code_of([&] { CannedBackend::from_file(path); }) == ErrorCode::SchemaError);
  std::remove(path.c_str());
  CHECK(code_of([&] { CannedBackend::from_file("does/not/exist.json"); }) == ErrorCode::Io);

  CHECK(make_backend("oracle", {})->describe() == "oracle");
  CHECK(code_of([] { make_backend("gpt", {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("batch_complete") {
  std::map<std::string, std::string> by_hash;
  std::vector<CompletionJob> jobs;
  for (int i = 0; i < 10; ++i) {
    std::string r = "prompt " + std::to_string(i);
    if (i != 3) by_hash[prompt_hash(r)] = "completion " + std::to_string(i);
    jobs.push_back(CompletionJob{"id" + std::to_string(i), prompt_of(r)});
  }
  CannedBackend canned(by_hash);

  std::vector<CompletionJob> five(jobs.begin(), jobs.begin() + 5);
  auto results = batch_complete(canned, five, 4);
  REQUIRE(results.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(results[i].instance_id == "id" + std::to_string(i));
    if (i == 3) {
      CHECK_FALSE(results[i].ok());
      CHECK(results[i].error == ErrorCode::MissingOracleEntry);
      CHECK(!results[i].message.empty());
    } else {
      REQUIRE(results[i].ok());
      CHECK(*results[i].text == "completion " + std::to_string(i));
    }
  }

  // same answers with one worker or many
  auto serial = batch_complete(canned, jobs, 1);
  auto wide = batch_complete(canned, jobs, 8);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK(serial[i].text == wide[i].text);
    CHECK(serial[i].error == wide[i].error);
  }

  CHECK(batch_complete(canned, {}, 4).empty());
}

TEST_CASE("batch_complete respects the parallelism bound") {
  struct Counting : CompletionBackend {
    mutable std::atomic<int> in_flight{0}, peak{0};
    std::string complete(const Prompt& p, const std::string&) const override {
      int now = ++in_flight;
      int seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --in_flight;
      return p.rendered;
    }
    std::string describe() const override { return "counting"; }
  } backend;
  std::vector<CompletionJob> jobs;
  for (int i = 0; i < 24; ++i) jobs.push_back(CompletionJob{std::to_string(i), prompt_of(std::to_string(i))});
  auto results = batch_complete(backend, jobs, 3);
  for (int i = 0; i < 24; ++i) CHECK(*results[i].text == std::to_string(i));
  CHECK(backend.peak.load() <= 3);
}

TEST_CASE("remote backend against a loopback server") {
  std::string seen_body;
  std::string seen_auth;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    reply(res, "  s0 = Node()\nclass Other:\n");
  });
  CompletionConfig c = config_for(server);
  c.model_name = "test-model";
  c.max_tokens = 123;
  ::setenv(kApiKeyEnv, "test-key", 1);
  RemoteBackend remote(c);
  ::unsetenv(kApiKeyEnv);
  CHECK(remote.complete(prompt_of("PROMPT"), "x") == "  s0 = Node()");
  CHECK(seen_auth == "Bearer test-key");

  json body = json::parse(seen_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["prompt"] == "PROMPT");
  CHECK(body["max_tokens"] == 123);
  CHECK(body["temperature"] == 0.0);
  CHECK(body["stop"] == json::array({"\nclass ", "\n\n\n"}));
  CHECK(json::parse(remote.request_body("PROMPT")) == body);

  CompletionConfig small = c;
  small.max_prompt_bytes = 3;
  CHECK(code_of([&] { RemoteBackend(small).complete(prompt_of("PROMPT"), "x"); }) == ErrorCode::PromptTooLarge);

  CHECK(code_of([] {
          CompletionConfig bad;
          bad.endpoint_url = "ftp://nowhere";
          RemoteBackend r(bad);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("remote backend retries 429 with exponential backoff") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 3) {
      res.status = 429;
      return;
    }
    reply(res, "done");
  });
  std::vector<double> waits;
  RemoteBackend remote(config_for(server), [&](std::chrono::duration<double> d) { waits.push_back(d.count()); }, 17);
  CHECK(remote.complete(prompt_of("p"), "x") == "done");
  CHECK(calls.load() == 4);
  REQUIRE(waits.size() == 3);
  for (std::size_t n = 1; n <= waits.size(); ++n) {
    double base = static_cast<double>(1u << (n - 1));
    CHECK(waits[n - 1] >= base);
    CHECK(waits[n - 1] < base + 1);
  }
}

TEST_CASE("remote backend gives up and reports the status") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    if (req.body.find("bad-json") != std::string::npos) {
      res.set_content("{\"choices\": []}", "application/json");
      return;
    }
    res.status = req.body.find("forbidden") != std::string::npos ? 403 : 503;
  });
  CompletionConfig c = config_for(server);
  c.max_retries = 2;
  int sleeps = 0;
  RemoteBackend remote(c, [&](std::chrono::duration<double>) { ++sleeps; });

  try {
    remote.complete(prompt_of("p"), "x");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HttpError);
    CHECK(e.status() == 503);
  }
  CHECK(calls.load() == 3);
  CHECK(sleeps == 2);

  // 4xx other than 429 is not retried
  calls = 0;
  try {
    remote.complete(prompt_of("forbidden"), "x");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HttpError);
    CHECK(e.status() == 403);
  }
  CHECK(calls.load() == 1);

  CHECK(code_of([&] { remote.complete(prompt_of("bad-json"), "x"); }) == ErrorCode::SchemaError);
}

TEST_CASE("retry_delay schedule") {
  CompletionConfig c;
  c.endpoint_url = "http://127.0.0.1:1/x";
  RemoteBackend remote(c, {}, 5);
  for (int n = 1; n <= 6; ++n) {
    double d = remote.retry_delay(n).count();
    CHECK(d >= std::ldexp(1.0, n - 1));
    CHECK(d < std::ldexp(1.0, n - 1) + 1);
  }
}
