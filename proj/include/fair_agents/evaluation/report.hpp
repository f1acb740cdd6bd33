#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fair_agents/agents/agents.hpp"
#include "fair_agents/orchestrator/outcome.hpp"

namespace fair_agents {

// Graded relevance used for nDCG/recall: the query's explicit grades when
// present, otherwise the preference dot product of every constraint-satisfying
// item with a positive score.
std::map<ItemId, double> query_relevance(const Query& query, const Catalog& catalog);

// Category frequency distribution of `items` over `support` (sorted category
// list). Empty when the items carry no category in the support.
std::vector<double> category_distribution(std::span<const ItemId> items, const Catalog& catalog,
                                          std::span<const std::string> support);

// Value of a per-query metric for `final_list`, or nullopt when its inputs do
// not exist (no relevance, no history, ...). GiniExposure is taken over
// `exposure_before` plus this list's rank-discounted credit, across all
// catalog providers. FairnessRegret and LHalfBalance are system-level and
// always nullopt here.
std::optional<double> evaluate_metric(MetricId metric, const Query& query,
                                      std::span<const ItemId> final_list, const Catalog& catalog,
                                      const ExposureLedger& exposure_before);

struct MetricSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  long count = 0;

  bool operator==(const MetricSummary&) const = default;
};

struct QueryEvaluation {
  std::string query_id;
  Ranking final_list;
  std::map<MetricId, double> metrics;
  std::map<std::string, double> regret;
  std::map<std::string, double> influence;
  std::vector<std::string> active_agents;
  std::map<std::string, std::string> skipped_agents;

  bool operator==(const QueryEvaluation&) const = default;
};

struct EvaluationReport {
  std::string rule;
  std::vector<QueryEvaluation> per_query;
  std::map<MetricId, MetricSummary> aggregate;
  std::map<std::string, MetricSummary> influence;
  // Regret per query index for every agent; nullopt where not computable.
  std::map<std::string, std::vector<std::optional<double>>> drift;
  StageCounters runtime;
  double mean_final_popularity = 0.0;
  // Gini of provider exposure accumulated over the whole stream.
  double cumulative_exposure_gini = 0.0;

  bool operator==(const EvaluationReport&) const = default;
};

// Recomputes every metric from the outcomes (in stream order, replaying the
// exposure ledger). Throws InvalidArgument on an empty outcome list.
EvaluationReport build_report(std::span<const QueryOutcome> outcomes,
                              std::span<const AgentSpec> specs, const Catalog& catalog);

MetricSummary summarize(std::span<const double> values);

}  // namespace fair_agents
