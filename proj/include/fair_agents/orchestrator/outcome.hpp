#pragma once

#include <map>
#include <string>
#include <vector>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

// Call counts per pipeline stage. Deterministic, so they are persisted.
struct StageCounters {
  long generation_calls = 0;
  long adapter_calls = 0;
  long grounding_calls = 0;
  long aggregation_runs = 0;  // rule evaluations, leave-one-out included
  long evaluation_calls = 0;

  StageCounters& operator+=(const StageCounters& other);
  bool operator==(const StageCounters&) const = default;
};

// Wall time per stage in milliseconds. Only ever logged, never persisted.
struct StageTimings {
  double generation_ms = 0.0;
  double grounding_ms = 0.0;
  double aggregation_ms = 0.0;
  double evaluation_ms = 0.0;

  double total_ms() const { return generation_ms + grounding_ms + aggregation_ms + evaluation_ms; }
};

struct QueryOutcome {
  Query query;
  Ranking final_list;
  // Grounded ballots, weights set to the agent's reliability at the time.
  std::vector<Ballot> per_agent_ballots;
  AggregateResult aggregate;
  std::vector<std::string> active_agents;
  std::map<std::string, std::string> skipped_agents;  // agent id -> reason
  std::map<std::string, std::string> justifications;
  std::map<std::string, long> violations;
  // Fairness regret pushed to the ledger for this query.
  std::map<std::string, double> regret;
  StageCounters counters;
  StageTimings timings;
};

// Field-wise equality that ignores wall-clock timings.
bool same_outcome(const QueryOutcome& a, const QueryOutcome& b);

}  // namespace fair_agents
