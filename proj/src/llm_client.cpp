#include "structcode/llm_client.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace structcode {

using json = nlohmann::json;

void validate_config(const CompletionConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "completion config: " + what); };
  if (c.max_tokens <= 0) bad("max_tokens must be > 0");
  if (!(c.temperature >= 0) || !std::isfinite(c.temperature)) bad("temperature must be >= 0");
  if (c.stop_sequences.size() > 4) bad("at most 4 stop sequences");
  for (const auto& s : c.stop_sequences)
    if (s.empty()) bad("empty stop sequence");
  if (c.timeout_seconds <= 0) bad("timeout_seconds must be > 0");
  if (c.max_retries < 0) bad("max_retries must be >= 0");
  if (c.parallelism < 1) bad("parallelism must be >= 1");
  if (c.max_prompt_bytes == 0) bad("max_prompt_bytes must be > 0");
}

std::string prompt_hash(std::string_view rendered) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : rendered) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string apply_stop(std::string_view text, const std::vector<std::string>& stops) {
  std::size_t cut = text.size();
  for (const auto& s : stops) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  return std::string(text.substr(0, cut));
}

// --- offline backends --------------------------------------------------------

OracleBackend::OracleBackend(std::map<std::string, SourceText> gold, std::vector<std::string> stops)
    : gold_(std::move(gold)), stops_(std::move(stops)) {}

std::string OracleBackend::complete(const Prompt& prompt, const std::string& instance_id) const {
  auto it = gold_.find(instance_id);
  if (it == gold_.end()) throw Error(ErrorCode::MissingOracleEntry, "no gold encoding for '" + instance_id + "'");
  std::string_view text = it->second.text;
  const std::string& stub = prompt.stub.text;
  if (text.substr(0, stub.size()) == stub) text.remove_prefix(stub.size());
  return apply_stop(text, stops_);
}

CannedBackend::CannedBackend(std::map<std::string, std::string> by_hash, std::vector<std::string> stops)
    : by_hash_(std::move(by_hash)), stops_(std::move(stops)) {}

CannedBackend CannedBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open canned completions '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, "canned completions '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "canned completions must be a JSON object");
  std::map<std::string, std::string> m;
  for (auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(ErrorCode::SchemaError, "canned completion for '" + k + "' is not a string");
    m.emplace(k, v.get<std::string>());
  }
  return CannedBackend(std::move(m));
}

std::string CannedBackend::complete(const Prompt& prompt, const std::string& instance_id) const {
  std::string h = prompt_hash(prompt.rendered);
  auto it = by_hash_.find(h);
  if (it == by_hash_.end())
    throw Error(ErrorCode::MissingOracleEntry, "no canned completion for prompt " + h + " ('" + instance_id + "')");
  return apply_stop(it->second, stops_);
}

// --- remote ------------------------------------------------------------------

RemoteBackend::RemoteBackend(CompletionConfig config, Sleeper sleeper, std::uint64_t jitter_seed)
    : config_(std::move(config)), sleeper_(std::move(sleeper)), rng_(jitter_seed) {
  validate_config(config_);
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint_url, m, url_re))
    throw Error(ErrorCode::InvalidArgument, "endpoint URL must be http(s)://host[:port]/path, got '" +
                                                config_.endpoint_url + "'");
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (const char* key = std::getenv(kApiKeyEnv)) api_key_ = key;
  if (!sleeper_) sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
}

std::string RemoteBackend::request_body(std::string_view prompt_text) const {
  json body = {
      {"model", config_.model_name},
      {"prompt", prompt_text},
      {"max_tokens", config_.max_tokens},
      {"temperature", config_.temperature},
      {"stop", config_.stop_sequences},
  };
  return body.dump();
}

std::chrono::duration<double> RemoteBackend::retry_delay(int n) const {
  double jitter;
  {
    std::lock_guard lock(rng_mutex_);
    jitter = uniform01(rng_);
  }
  return std::chrono::duration<double>(std::ldexp(1.0, n - 1) + jitter);
}

std::string RemoteBackend::complete(const Prompt& prompt, const std::string& instance_id) const {
  if (prompt.rendered.size() > config_.max_prompt_bytes)
    throw Error(ErrorCode::PromptTooLarge, "prompt for '" + instance_id + "' is " +
                                               std::to_string(prompt.rendered.size()) + " bytes, limit is " +
                                               std::to_string(config_.max_prompt_bytes));
  const std::string body = request_body(prompt.rendered);
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path_, headers, body, "application/json");
    std::optional<Error> failure;
    bool retryable = false;
    if (!res) {
      auto err = res.error();
      bool timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      failure = Error(timeout ? ErrorCode::Timeout : ErrorCode::HttpError,
                      "request to " + config_.endpoint_url + " failed: " + httplib::to_string(err));
      retryable = true;
    } else if (res->status == 200) {
      try {
        json j = json::parse(res->body);
        return apply_stop(j.at("choices").at(0).at("text").get<std::string>(), config_.stop_sequences);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed completion response: ") + e.what());
      }
    } else {
      failure = Error(ErrorCode::HttpError, "HTTP " + std::to_string(res->status) + " from " + config_.endpoint_url);
      failure->with_status(res->status);
      retryable = res->status == 429 || res->status >= 500;
    }
    if (!retryable || attempt >= config_.max_retries) throw *failure;
    sleeper_(retry_delay(attempt + 1));
  }
}

std::unique_ptr<CompletionBackend> make_backend(std::string_view spec, const std::map<std::string, SourceText>& oracle,
                                                CompletionConfig config) {
  if (spec == "oracle") return std::make_unique<OracleBackend>(oracle, config.stop_sequences);
  if (spec.starts_with("canned:")) {
    auto backend = CannedBackend::from_file(std::string(spec.substr(7)));
    return std::make_unique<CannedBackend>(std::move(backend));
  }
  if (spec.starts_with("remote:")) {
    config.endpoint_url = std::string(spec.substr(7));
    return std::make_unique<RemoteBackend>(std::move(config));
  }
  throw Error(ErrorCode::InvalidArgument,
              "backend must be 'oracle', 'canned:<path>' or 'remote:<url>', got '" + std::string(spec) + "'");
}

std::vector<CompletionResult> batch_complete(const CompletionBackend& backend, const std::vector<CompletionJob>& jobs,
                                             int parallelism) {
  std::vector<CompletionResult> results(jobs.size());
  if (jobs.empty()) return results;
  if (parallelism <= 0) parallelism = backend.parallelism();
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      CompletionResult& r = results[i];
      r.instance_id = jobs[i].instance_id;
      try {
        r.text = backend.complete(jobs[i].prompt, jobs[i].instance_id);
      } catch (const Error& e) {
        r.error = e.code();
        r.message = e.what();
      } catch (const std::exception& e) {
        r.error = ErrorCode::InvalidArgument;
        r.message = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  return results;
}

}  // namespace structcode
