#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fair_agents/agents/agents.hpp"
#include "fair_agents/orchestrator/outcome.hpp"

namespace fair_agents {

inline constexpr const char* kOutcomesFormat = "fair-agents-outcomes/1";

struct OutcomeRun {
  std::string rule;
  std::vector<QueryOutcome> outcomes;
};

// Everything evaluate needs to rebuild a report without re-running agents.
// Reals are written with round-trip precision; timings are not saved.
struct SavedOutcomes {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string catalog_hash;
  std::vector<AgentSpec> agents;
  std::vector<OutcomeRun> runs;
};

std::string encode_outcomes(const SavedOutcomes& saved);
// Throws SchemaError on truncated or structurally invalid documents.
SavedOutcomes decode_outcomes(const std::string& text);

// Throws IoError.
void save_outcomes(const SavedOutcomes& saved, const std::filesystem::path& path);
// Throws IoError, SchemaError.
SavedOutcomes load_outcomes(const std::filesystem::path& path);

}  // namespace fair_agents
