#include "fair_agents/evaluation/report.hpp"

#include <algorithm>
#include <numeric>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/evaluation/metrics.hpp"

namespace fair_agents {

std::map<ItemId, double> query_relevance(const Query& query, const Catalog& catalog) {
  if (!query.relevance.empty()) return query.relevance;
  std::map<ItemId, double> out;
  for (const auto& [id, item] : catalog.items()) {
    if (!satisfies_constraints(query, item)) continue;
    const double score = relevance_score(query, item);
    if (score > 0.0) out.emplace(id, score);
  }
  return out;
}

std::vector<double> category_distribution(std::span<const ItemId> items, const Catalog& catalog,
                                          std::span<const std::string> support) {
  std::vector<double> counts(support.size(), 0.0);
  double total = 0.0;
  for (const auto& id : items) {
    for (const auto& category : catalog.at(id).categories) {
      auto it = std::lower_bound(support.begin(), support.end(), category);
      if (it == support.end() || *it != category) continue;
      counts[static_cast<std::size_t>(it - support.begin())] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) return {};
  for (double& c : counts) c /= total;
  return counts;
}

std::optional<double> evaluate_metric(MetricId metric, const Query& query,
                                      std::span<const ItemId> final_list, const Catalog& catalog,
                                      const ExposureLedger& exposure_before) {
  if (final_list.empty()) return std::nullopt;
  const int k = std::max(query.top_n, 1);
  switch (metric) {
    case MetricId::kNdcg:
    case MetricId::kRecall: {
      const auto relevance = query_relevance(query, catalog);
      std::set<ItemId> relevant;
      for (const auto& [id, grade] : relevance) {
        if (grade > 0.0) relevant.insert(id);
      }
      if (relevant.empty()) return std::nullopt;
      return metric == MetricId::kNdcg ? ndcg_at_k(final_list, relevance, k)
                                       : recall_at_k(final_list, relevant, k);
    }
    case MetricId::kGiniExposure: {
      ExposureLedger after = exposure_before;
      after.credit(final_list, catalog);
      std::vector<double> exposures;
      for (const auto& provider : catalog.providers()) exposures.push_back(after.exposure_of(provider));
      return gini_exposure(exposures);
    }
    case MetricId::kNormEntropy: {
      const auto support = catalog.categories();
      if (support.size() < 2) return std::nullopt;
      const auto p = category_distribution(final_list, catalog, support);
      if (p.empty()) return std::nullopt;
      return normalized_entropy(p);
    }
    case MetricId::kKlDiv:
    case MetricId::kJsDiv: {
      if (query.user_history.empty()) return std::nullopt;
      const auto support = catalog.categories();
      const auto historical = category_distribution(query.user_history, catalog, support);
      const auto recommended = category_distribution(final_list, catalog, support);
      if (historical.empty() || recommended.empty()) return std::nullopt;
      return divergence(historical, recommended,
                        metric == MetricId::kKlDiv ? DivergenceKind::kKl : DivergenceKind::kJs);
    }
    case MetricId::kPopLift: {
      if (query.user_history.empty()) return std::nullopt;
      try {
        return poplift(query.user_history, final_list, catalog);
      } catch (const UndefinedBaseline&) {
        return std::nullopt;
      }
    }
    case MetricId::kFairnessRegret:
    case MetricId::kLHalfBalance:
      return std::nullopt;
  }
  return std::nullopt;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  s.count = static_cast<long>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

EvaluationReport build_report(std::span<const QueryOutcome> outcomes,
                              std::span<const AgentSpec> specs, const Catalog& catalog) {
  if (outcomes.empty()) throw InvalidArgument("build_report: no outcomes");

  EvaluationReport report;
  report.rule = std::string(to_string(outcomes.front().aggregate.rule));

  constexpr MetricId kItemMetrics[] = {MetricId::kNdcg,        MetricId::kRecall,
                                       MetricId::kGiniExposure, MetricId::kNormEntropy,
                                       MetricId::kKlDiv,        MetricId::kJsDiv,
                                       MetricId::kPopLift};

  std::map<MetricId, std::vector<double>> series;
  std::map<std::string, std::vector<double>> influence_series;
  ExposureLedger exposure;
  double popularity_total = 0.0;
  std::size_t popularity_count = 0;

  for (std::size_t q = 0; q < outcomes.size(); ++q) {
    const QueryOutcome& outcome = outcomes[q];
    QueryEvaluation eval;
    eval.query_id = outcome.query.id;
    eval.final_list = outcome.final_list;
    eval.influence = outcome.aggregate.influence;
    eval.active_agents = outcome.active_agents;
    eval.skipped_agents = outcome.skipped_agents;

    for (MetricId metric : kItemMetrics) {
      if (auto v = evaluate_metric(metric, outcome.query, outcome.final_list, catalog, exposure)) {
        eval.metrics.emplace(metric, *v);
      }
    }

    std::vector<double> fairness;
    double regret_total = 0.0;
    for (const auto& spec : specs) {
      std::optional<double> regret;
      if (auto achieved = evaluate_metric(spec.objective_metric, outcome.query,
                                          outcome.final_list, catalog, exposure)) {
        regret = fairness_regret(spec, *achieved);
        eval.regret.emplace(spec.agent_id, *regret);
        regret_total += *regret;
        fairness.push_back(std::clamp(1.0 - *regret, 0.0, 1.0));
      }
      report.drift[spec.agent_id].push_back(regret);
    }
    if (!fairness.empty()) {
      eval.metrics.emplace(MetricId::kFairnessRegret,
                           regret_total / static_cast<double>(fairness.size()));
      eval.metrics.emplace(MetricId::kLHalfBalance, l_half_balance(fairness));
    }

    for (const auto& [metric, value] : eval.metrics) series[metric].push_back(value);
    for (const auto& [agent, value] : eval.influence) influence_series[agent].push_back(value);
    for (const auto& id : outcome.final_list) {
      popularity_total += catalog.at(id).popularity;
      ++popularity_count;
    }
    report.runtime += outcome.counters;
    exposure.credit(outcome.final_list, catalog);
    report.per_query.push_back(std::move(eval));
  }

  for (const auto& [metric, values] : series) report.aggregate.emplace(metric, summarize(values));
  for (const auto& [agent, values] : influence_series) {
    report.influence.emplace(agent, summarize(values));
  }
  report.mean_final_popularity =
      popularity_count == 0 ? 0.0 : popularity_total / static_cast<double>(popularity_count);
  std::vector<double> exposures;
  for (const auto& provider : catalog.providers()) exposures.push_back(exposure.exposure_of(provider));
  const double mass = std::accumulate(exposures.begin(), exposures.end(), 0.0);
  report.cumulative_exposure_gini = mass > 0.0 ? gini_exposure(exposures) : 0.0;
  return report;
}

}  // namespace fair_agents
