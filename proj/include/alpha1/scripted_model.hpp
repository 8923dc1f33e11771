#pragma once

#include <filesystem>
#include <vector>

#include "alpha1/backend.hpp"

namespace alpha1 {

// One emission rule of a scripted model. An "always" rule fires
// unconditionally; an "after_injected" rule fires only while the generation
// context (request context plus text already produced earlier in the same
// call) ends with the given string, which is how injected transition tokens
// steer the script down alternate branches. A rule whose condition does not
// hold when the cursor reaches it is skipped permanently.
struct ScriptRule {
  enum class Trigger { Always, AfterInjected };
  Trigger trigger = Trigger::Always;
  std::string trigger_token;  // AfterInjected only
  std::string emit;
};

struct Script {
  std::vector<ScriptRule> rules;
};

// Schema: {"rules": [{"trigger": "always" | {"after_injected": "<tok>"},
// "emit": "<string>"}]}. Rejects empty emissions and empty rule lists.
Script load_script(const std::filesystem::path& path);
Script parse_script(const std::string& json_text);

// Deterministic mock model: a cursor over script rules plus a pending buffer
// of generated-but-unreturned text (the remainder past a matched stop).
// Tokens are whitespace-delimited words. Instantiate one per run; the cursor
// is not shareable.
class ScriptedModel final : public Backend {
 public:
  explicit ScriptedModel(Script script);

  GenerationChunk generate(const GenerationRequest& request) override;
  std::uint64_t count_tokens(std::string_view text) const override;

 private:
  Script script_;
  std::size_t cursor_ = 0;
  std::string pending_;
};

}  // namespace alpha1
