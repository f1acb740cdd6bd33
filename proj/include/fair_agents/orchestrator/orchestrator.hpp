#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fair_agents/agents/agents.hpp"
#include "fair_agents/aggregation/aggregation.hpp"
#include "fair_agents/orchestrator/outcome.hpp"

namespace fair_agents {

struct ActivationPolicy {
  enum class Mode { kStatic, kDynamic };

  Mode mode = Mode::kStatic;
  double fairness_threshold = 0.1;  // regret units
  int window = 10;
  // 0 disables the compatibility override (see select_agents).
  double compatibility_min = 0.0;

  bool operator==(const ActivationPolicy&) const = default;
};

// Rolling per-agent regret windows plus cumulative provider exposure.
struct FairnessLedger {
  std::map<std::string, std::deque<double>> per_agent;
  ExposureLedger exposure;
  long queries_processed = 0;

  // Appends a regret value, evicting the oldest beyond `window` entries.
  void record(const std::string& agent_id, double regret, int window);
  // Window full and every entry <= threshold.
  bool consistently_met(const std::string& agent_id, const ActivationPolicy& policy) const;

  bool operator==(const FairnessLedger&) const = default;
};

// Jaccard overlap between the query's weighted categories and the agent's
// compatibility tags; 1.0 when the agent declares no tags.
double compatibility(const Query& query, const AgentSpec& spec);

struct AgentSelection {
  std::vector<AgentSpec> active;  // sorted by agent id
  std::map<std::string, std::string> skipped;
};

// Static: everyone votes. Dynamic: an agent sits out only when its objective
// has been consistently met over a full window, unless the compatibility
// override (compatibility_min > 0 and compatibility >= compatibility_min)
// keeps it in. Throws NoActiveAgents if nobody is left.
AgentSelection select_agents(const Query& query, std::span<const AgentSpec> specs,
                             const FairnessLedger& ledger, const ActivationPolicy& policy);

// Candidates requested from each agent: multiplier * top_n.
int candidate_count_policy(int top_n, int multiplier = 2);

struct OrchestratorOptions {
  ReliabilityConfig reliability;
  int candidate_multiplier = 2;
  bool parallel_agents = false;
  std::optional<std::string> adapter_url;

  bool operator==(const OrchestratorOptions&) const = default;
};

struct EngineState {
  FairnessLedger ledger;
  std::map<std::string, AgentState> agents;

  bool operator==(const EngineState&) const = default;
};

// Runs one query through select -> generate -> ground -> aggregate ->
// measure -> credit exposure. Returns the outcome and the next state.
std::pair<QueryOutcome, EngineState> process_query(const Query& query,
                                                   std::span<const AgentSpec> specs,
                                                   const Catalog& catalog, EngineState state,
                                                   const ActivationPolicy& policy,
                                                   const RuleConfig& rule_config,
                                                   const OrchestratorOptions& options = {});

// Stateful wrapper that threads EngineState through a query stream.
class Orchestrator {
 public:
  Orchestrator(const Catalog& catalog, std::vector<AgentSpec> specs, ActivationPolicy policy,
               RuleConfig rule_config, OrchestratorOptions options = {});

  QueryOutcome process(const Query& query);

  const EngineState& state() const { return state_; }
  const std::vector<AgentSpec>& specs() const { return specs_; }
  void reset() { state_ = EngineState{}; }

 private:
  const Catalog& catalog_;
  std::vector<AgentSpec> specs_;
  ActivationPolicy policy_;
  RuleConfig rule_config_;
  OrchestratorOptions options_;
  EngineState state_;
};

}  // namespace fair_agents
