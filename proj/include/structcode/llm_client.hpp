#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "structcode/codec.hpp"
#include "structcode/error.hpp"
#include "structcode/prompt.hpp"
#include "structcode/random.hpp"

namespace structcode {

inline constexpr const char* kApiKeyEnv = "OPENAI_API_KEY";

struct CompletionConfig {
  std::string endpoint_url;
  std::string model_name = "code-davinci-002";
  int max_tokens = 500;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences = {"\nclass ", "\n\n\n"};
  int timeout_seconds = 60;
  int max_retries = 5;
  int parallelism = 4;
  std::size_t max_prompt_bytes = 64 * 1024;
};

// Throws Error(InvalidArgument) for out-of-range fields.
void validate_config(const CompletionConfig& config);

// FNV-1a 64 of the rendered prompt as 16 lowercase hex digits. Canned
// completion files are keyed by this.
std::string prompt_hash(std::string_view rendered);

// Cuts `text` at the earliest occurrence of any stop sequence.
std::string apply_stop(std::string_view text, const std::vector<std::string>& stops);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Completion for `prompt`; stop sequences are already cut off. Must be safe
  // to call concurrently.
  virtual std::string complete(const Prompt& prompt, const std::string& instance_id) const = 0;
  virtual int parallelism() const { return 1; }
  virtual std::string describe() const = 0;
};

// Returns the gold encoding minus the stub, i.e. what a perfect model would
// write. Throws Error(MissingOracleEntry) for unknown ids.
class OracleBackend : public CompletionBackend {
 public:
  explicit OracleBackend(std::map<std::string, SourceText> gold,
                         std::vector<std::string> stops = CompletionConfig{}.stop_sequences);
  std::string complete(const Prompt& prompt, const std::string& instance_id) const override;
  int parallelism() const override { return 4; }
  std::string describe() const override { return "oracle"; }

 private:
  std::map<std::string, SourceText> gold_;
  std::vector<std::string> stops_;
};

// Looks up completions by prompt_hash(prompt.rendered). Throws
// Error(MissingOracleEntry) on a miss.
class CannedBackend : public CompletionBackend {
 public:
  explicit CannedBackend(std::map<std::string, std::string> by_hash,
                         std::vector<std::string> stops = CompletionConfig{}.stop_sequences);
  // JSON object {"<hash>": "<completion>", ...}. Throws Error(Io) or
  // Error(SchemaError).
  static CannedBackend from_file(const std::string& path);
  std::string complete(const Prompt& prompt, const std::string& instance_id) const override;
  int parallelism() const override { return 4; }
  std::string describe() const override { return "canned"; }

 private:
  std::map<std::string, std::string> by_hash_;
  std::vector<std::string> stops_;
};

// OpenAI-compatible completions endpoint. Retries HTTP 429/5xx and timeouts;
// the n-th retry waits 2^(n-1) seconds plus uniform jitter in [0, 1).
class RemoteBackend : public CompletionBackend {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  // The bearer token is read from $OPENAI_API_KEY when present.
  explicit RemoteBackend(CompletionConfig config, Sleeper sleeper = {}, std::uint64_t jitter_seed = 0);

  std::string complete(const Prompt& prompt, const std::string& instance_id) const override;
  int parallelism() const override { return config_.parallelism; }
  std::string describe() const override { return "remote:" + config_.endpoint_url; }

  // The JSON body sent for `prompt_text`.
  std::string request_body(std::string_view prompt_text) const;
  // Delay before retry `n` (1-based): 2^(n-1) + jitter.
  std::chrono::duration<double> retry_delay(int n) const;

 private:
  CompletionConfig config_;
  Sleeper sleeper_;
  std::string api_key_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  mutable std::mutex rng_mutex_;
  mutable Rng rng_;
};

// "oracle", "canned:<path>" or "remote:<url>". The oracle map is needed only
// for "oracle".
std::unique_ptr<CompletionBackend> make_backend(std::string_view spec, const std::map<std::string, SourceText>& oracle,
                                                CompletionConfig config = {});

struct CompletionJob {
  std::string instance_id;
  Prompt prompt;
};

struct CompletionResult {
  std::string instance_id;
  std::optional<std::string> text;
  std::optional<ErrorCode> error;
  std::string message;  // error message when `error` is set

  bool ok() const { return text.has_value(); }
};

// Runs jobs on at most `parallelism` worker threads (backend default when 0).
// Results come back in job order; failures are values.
std::vector<CompletionResult> batch_complete(const CompletionBackend& backend, const std::vector<CompletionJob>& jobs,
                                             int parallelism = 0);

}  // namespace structcode
