#include "alpha1/http_backend.hpp"

#include <cstdlib>

#include "alpha1/util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace alpha1 {

namespace {

constexpr std::size_t kMaxStopSequences = 4;

std::string getenv_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value != nullptr ? std::string(value) : fallback;
}

}  // namespace

HttpBackendConfig http_config_from_env() {
  HttpBackendConfig config;
  config.endpoint = getenv_or("ALPHA1_ENDPOINT", "");
  config.api_key = getenv_or("ALPHA1_API_KEY", "");
  if (config.endpoint.empty()) {
    throw BackendError(BackendErrorKind::Config, "ALPHA1_ENDPOINT is not set");
  }
  return config;
}

struct HttpBackend::Impl {
  HttpBackendConfig config;
  httplib::Client client;

  explicit Impl(HttpBackendConfig cfg) : config(std::move(cfg)), client(config.endpoint) {
    client.set_connection_timeout(config.timeout_s, 0);
    client.set_read_timeout(config.timeout_s, 0);
    client.set_write_timeout(config.timeout_s, 0);
    if (!config.api_key.empty()) client.set_bearer_token_auth(config.api_key);
  }
};

HttpBackend::HttpBackend(HttpBackendConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  if (impl_->config.endpoint.empty()) {
    throw BackendError(BackendErrorKind::Config, "HTTP backend endpoint must be non-empty");
  }
}

HttpBackend::~HttpBackend() = default;

std::uint64_t HttpBackend::count_tokens(std::string_view text) const {
  return (text.size() + 3) / 4;
}

GenerationChunk HttpBackend::generate(const GenerationRequest& request) {
  if (request.context.empty()) {
    throw BackendError(BackendErrorKind::Config, "generate: context must be non-empty");
  }
  if (request.stop_sequences.size() > kMaxStopSequences) {
    throw BackendError(BackendErrorKind::Config,
                       "generate: at most 4 stop sequences per request");
  }

  nlohmann::json body;
  if (!impl_->config.model.empty()) body["model"] = impl_->config.model;
  body["prompt"] = request.context;
  body["max_tokens"] = request.max_new_tokens;
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  body["stream"] = false;
  if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;
  if (request.seed) body["seed"] = *request.seed;

  const auto res = impl_->client.Post("/v1/completions", body.dump(), "application/json");
  if (!res) {
    throw BackendError(BackendErrorKind::Transport,
                       "POST /v1/completions failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(BackendErrorKind::HttpStatus,
                       "server returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendError(BackendErrorKind::MalformedResponse,
                       std::string("response is not JSON: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw BackendError(BackendErrorKind::MalformedResponse, "response has no choices");
  }
  const auto& choice = doc["choices"][0];
  if (!choice.contains("text") || !choice["text"].is_string()) {
    throw BackendError(BackendErrorKind::MalformedResponse, "choice has no text");
  }

  GenerationChunk chunk;
  chunk.text = choice["text"].get<std::string>();

  if (doc.contains("usage") && doc["usage"].is_object() &&
      doc["usage"].contains("completion_tokens")) {
    chunk.new_token_count = doc["usage"]["completion_tokens"].get<std::uint64_t>();
  } else {
    chunk.new_token_count = count_tokens(chunk.text);
    chunk.approximate_count = true;
    log_warn("server response has no usage.completion_tokens; counting ceil(bytes/4)");
  }

  const std::string finish_reason = choice.value("finish_reason", "");
  if (finish_reason == "length") {
    chunk.finish = FinishReason::Length;
    return chunk;
  }
  if (finish_reason != "stop" && !finish_reason.empty()) {
    throw BackendError(BackendErrorKind::MalformedResponse,
                       "unexpected finish_reason \"" + finish_reason + "\"");
  }

  // "stop" covers both a matched stop sequence and a natural EOS token; the
  // controller needs to know which, so look for the server's attribution.
  std::string matched;
  if (choice.contains("stop_reason") && choice["stop_reason"].is_string()) {
    matched = choice["stop_reason"].get<std::string>();  // vLLM
  } else if (choice.contains("matched_stop") && choice["matched_stop"].is_string()) {
    matched = choice["matched_stop"].get<std::string>();
  } else if (doc.contains("stopping_word") && doc["stopping_word"].is_string()) {
    matched = doc["stopping_word"].get<std::string>();  // llama.cpp server
  }

  if (!matched.empty()) {
    chunk.finish = FinishReason::StopMatched;
    chunk.matched_stop = matched;
    return chunk;
  }
  if (request.stop_sequences.empty()) {
    chunk.finish = FinishReason::Eos;
    return chunk;
  }
  // vLLM reports stop_reason: null for an EOS token even with stops set.
  if (choice.contains("stop_reason") && choice["stop_reason"].is_null()) {
    chunk.finish = FinishReason::Eos;
    return chunk;
  }
  throw BackendError(BackendErrorKind::MalformedResponse,
                     "finish_reason \"stop\" with stop sequences configured, but the server "
                     "did not report which stop matched (stop_reason/matched_stop/stopping_word)");
}

std::unique_ptr<Backend> HttpBackendFactory::session_for(const std::string&) const {
  return std::make_unique<HttpBackend>(config_);
}

}  // namespace alpha1
