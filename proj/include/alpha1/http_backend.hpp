#pragma once

#include <memory>
#include <string>

#include "alpha1/backend.hpp"
#include "alpha1/harness.hpp"

namespace alpha1 {

struct HttpBackendConfig {
  std::string endpoint;  // base URL, e.g. http://localhost:8000
  std::string api_key;   // sent as Bearer token when non-empty
  std::string model;     // optional model name for the request body
  int timeout_s = 120;
};

// Reads ALPHA1_ENDPOINT / ALPHA1_API_KEY; endpoint must be set.
HttpBackendConfig http_config_from_env();

// Client for OpenAI-compatible POST /v1/completions servers. Non-streaming:
// one round trip per segment. Token counts come from usage.completion_tokens;
// when a server omits usage, ceil(bytes/4) is used and flagged. Matched-stop
// attribution needs a server that reports it (vLLM "stop_reason", llama.cpp
// "stopping_word", or a "matched_stop" field); a bare finish_reason "stop"
// with stop sequences configured is ambiguous and rejected as malformed.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  GenerationChunk generate(const GenerationRequest& request) override;
  std::uint64_t count_tokens(std::string_view text) const override;
  bool approximate_token_counts() const override { return true; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Stateless sessions over one shared server config.
class HttpBackendFactory final : public BackendFactory {
 public:
  explicit HttpBackendFactory(HttpBackendConfig config) : config_(std::move(config)) {}
  std::unique_ptr<Backend> session_for(const std::string& task_id) const override;

 private:
  HttpBackendConfig config_;
};

}  // namespace alpha1
