#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

enum class Objective { kRelevance, kProviderExposure, kPopularityMitigation, kExternal };

std::string_view to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view name);

using ParamValue = std::variant<double, std::string>;

struct AgentSpec {
  std::string agent_id;
  StakeholderRole role = StakeholderRole::kUser;
  Objective objective = Objective::kRelevance;
  // External agents read "endpoint", "persona", "timeout_ms" and, for the
  // mock, "inject_ghosts".
  std::map<std::string, ParamValue> params;
  MetricId objective_metric = MetricId::kNdcg;
  double objective_target = 1.0;
  std::set<std::string> compatibility_tags;

  std::optional<std::string> string_param(const std::string& key) const;
  std::optional<double> number_param(const std::string& key) const;

  bool operator==(const AgentSpec&) const = default;
};

struct ReliabilityConfig {
  double lambda = 0.5;
  double floor = 0.1;  // w_min
};

struct AgentState {
  double reliability_weight = 1.0;
  long cumulative_violations = 0;
  long queries_served = 0;

  bool operator==(const AgentState&) const = default;
};

// weight <- max(floor, weight * (1 - lambda * violations/items)).
AgentState update_reliability(const AgentState& state, long violations_this_query,
                              long items_this_query, const ReliabilityConfig& config = {});

// Cumulative rank-discounted exposure per provider.
struct ExposureLedger {
  std::map<std::string, double> counts;

  double exposure_of(const std::string& provider_id) const;
  // Adds 1/log2(rank+1) to the provider of each listed item (rank is 1-based).
  void credit(std::span<const ItemId> final_list, const Catalog& catalog);

  bool operator==(const ExposureLedger&) const = default;
};

// Category-weight dot product; 0 for items without any weighted category.
double relevance_score(const Query& query, const Item& item);

// The three built-in stakeholder agents. Each one drops items that violate
// the query's constraints, ranks the rest and truncates to k. Ties go to the
// smaller item id. The returned ballot has an empty agent_id.
Ballot generate_relevance(const Query& query, const Catalog& catalog, int k);
Ballot generate_provider_exposure(const Query& query, const Catalog& catalog,
                                  const ExposureLedger& ledger, int k);
Ballot generate_popularity_mitigation(const Query& query, const Catalog& catalog, int k);

}  // namespace fair_agents
