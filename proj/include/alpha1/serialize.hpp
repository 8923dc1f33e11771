#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alpha1/harness.hpp"
#include "alpha1/transcript.hpp"

namespace alpha1 {

// Versioned transcript JSON (schema_version 1) preserving segment origin and
// phase tags, the final run state, the config snapshot, and the per-decision
// log. Key order is fixed so equal transcripts serialize to equal bytes.
std::string transcript_to_json(const Transcript& transcript);
Transcript transcript_from_json(const std::string& json_text);
void save_transcript(const Transcript& transcript, const std::filesystem::path& path);
Transcript load_transcript(const std::filesystem::path& path);

// One JSON object per line, deterministic fields only (wall-clock time is
// deliberately excluded so identical runs produce identical bytes).
std::string results_to_jsonl(const std::vector<RunResult>& results);
void write_results_jsonl(const std::vector<RunResult>& results, const std::filesystem::path& path);

}  // namespace alpha1
