#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace alpha1 {

enum class FinishReason { StopMatched, Length, Eos };

struct GenerationRequest {
  std::string context;  // full prompt + completion so far
  std::vector<std::string> stop_sequences;
  std::uint64_t max_new_tokens = 0;
  double temperature = 0.6;
  double top_p = 0.95;
  std::optional<std::uint64_t> seed;
};

struct GenerationChunk {
  std::string text;  // matched stop text excluded
  std::uint64_t new_token_count = 0;
  FinishReason finish = FinishReason::Eos;
  std::optional<std::string> matched_stop;  // set iff finish == StopMatched
  bool approximate_count = false;           // count estimated, not backend-reported
};

enum class BackendErrorKind { Transport, HttpStatus, MalformedResponse, Config };

struct BackendError : std::runtime_error {
  BackendError(BackendErrorKind k, const std::string& what)
      : std::runtime_error(what), kind(k) {}
  BackendErrorKind kind;
};

// Generation backend contract. Implementations are reentrant for sequential
// use within one run; concurrent runs need independent sessions unless the
// implementation is stateless.
class Backend {
 public:
  virtual ~Backend() = default;

  // Emits text up to (excluding) the earliest stop-sequence occurrence, up to
  // max_new_tokens, or to end of stream, and reports which one terminated it.
  virtual GenerationChunk generate(const GenerationRequest& request) = 0;

  // Token count of arbitrary text under this backend's counting rule. Used to
  // charge injected strings against the same budget as generated ones.
  virtual std::uint64_t count_tokens(std::string_view text) const = 0;

  virtual bool approximate_token_counts() const { return false; }
};

}  // namespace alpha1
