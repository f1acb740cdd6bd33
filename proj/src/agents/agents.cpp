#include "fair_agents/agents/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kRelevance:
      return "relevance";
    case Objective::kProviderExposure:
      return "provider_exposure";
    case Objective::kPopularityMitigation:
      return "popularity_mitigation";
    case Objective::kExternal:
      return "external";
  }
  return "?";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "relevance") return Objective::kRelevance;
  if (name == "provider_exposure") return Objective::kProviderExposure;
  if (name == "popularity_mitigation") return Objective::kPopularityMitigation;
  if (name == "external") return Objective::kExternal;
  return std::nullopt;
}

std::optional<std::string> AgentSpec::string_param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

std::optional<double> AgentSpec::number_param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  return std::nullopt;
}

AgentState update_reliability(const AgentState& state, long violations_this_query,
                              long items_this_query, const ReliabilityConfig& config) {
  if (violations_this_query < 0 || items_this_query < violations_this_query) {
    throw InvalidArgument("update_reliability: need items >= violations >= 0");
  }
  const double rate = items_this_query == 0
                          ? 0.0
                          : static_cast<double>(violations_this_query) /
                                static_cast<double>(items_this_query);
  AgentState next = state;
  next.reliability_weight =
      std::max(config.floor, state.reliability_weight * (1.0 - config.lambda * rate));
  // Never raise a weight, even when it currently sits below a newly lowered floor.
  next.reliability_weight = std::min(next.reliability_weight, state.reliability_weight);
  next.cumulative_violations += violations_this_query;
  next.queries_served += 1;
  return next;
}

double ExposureLedger::exposure_of(const std::string& provider_id) const {
  auto it = counts.find(provider_id);
  return it == counts.end() ? 0.0 : it->second;
}

void ExposureLedger::credit(std::span<const ItemId> final_list, const Catalog& catalog) {
  for (std::size_t i = 0; i < final_list.size(); ++i) {
    const Item& item = catalog.at(final_list[i]);
    counts[item.provider_id] += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
}

double relevance_score(const Query& query, const Item& item) {
  double score = 0.0;
  for (const auto& [category, weight] : query.preference_weights) {
    if (item.categories.contains(category)) score += weight;
  }
  return score;
}

namespace {

struct Scored {
  const Item* item;
  double score;
};

// Descending score, ascending id. Items come from the catalog already in id
// order, so a stable sort on score alone keeps the id tie-break.
Ranking top_k(std::vector<Scored> scored, int k, bool descending) {
  std::stable_sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    return descending ? a.score > b.score : a.score < b.score;
  });
  Ranking out;
  const auto limit = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < limit; ++i) out.push_back(scored[i].item->id);
  return out;
}

void require_k(int k) {
  if (k < 1) throw InvalidArgument("candidate count k must be >= 1");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

Ballot generate_relevance(const Query& query, const Catalog& catalog, int k) {
  require_k(k);
  std::vector<Scored> scored;
  for (const auto& [_, item] : catalog.items()) {
    if (satisfies_constraints(query, item)) scored.push_back({&item, relevance_score(query, item)});
  }
  Ballot ballot;
  ballot.ranking = top_k(std::move(scored), k, /*descending=*/true);
  if (ballot.ranking.empty()) {
    ballot.justification = "no catalog item satisfies the query constraints";
    return ballot;
  }
  const Item& top = catalog.at(ballot.ranking.front());
  std::string matched;
  for (const auto& [category, weight] : query.preference_weights) {
    if (weight > 0.0 && top.categories.contains(category)) {
      if (!matched.empty()) matched += ", ";
      matched += category;
    }
  }
  ballot.justification = "top pick " + top.id + " matches " +
                         (matched.empty() ? std::string("no preferred category") : matched);
  return ballot;
}

Ballot generate_provider_exposure(const Query& query, const Catalog& catalog,
                                  const ExposureLedger& ledger, int k) {
  require_k(k);
  std::vector<Scored> scored;
  for (const auto& [_, item] : catalog.items()) {
    if (satisfies_constraints(query, item)) {
      scored.push_back({&item, ledger.exposure_of(item.provider_id)});
    }
  }
  Ballot ballot;
  ballot.ranking = top_k(std::move(scored), k, /*descending=*/false);
  if (ballot.ranking.empty()) {
    ballot.justification = "no catalog item satisfies the query constraints";
    return ballot;
  }
  const Item& top = catalog.at(ballot.ranking.front());
  ballot.justification = "promotes least-exposed provider " + top.provider_id + " (exposure " +
                         format_real(ledger.exposure_of(top.provider_id)) + ")";
  return ballot;
}

Ballot generate_popularity_mitigation(const Query& query, const Catalog& catalog, int k) {
  require_k(k);
  std::vector<Scored> scored;
  for (const auto& [_, item] : catalog.items()) {
    if (satisfies_constraints(query, item)) {
      scored.push_back({&item, (1.0 - item.popularity) + item.sustainability});
    }
  }
  Ballot ballot;
  ballot.ranking = top_k(std::move(scored), k, /*descending=*/true);
  if (ballot.ranking.empty()) {
    ballot.justification = "no catalog item satisfies the query constraints";
    return ballot;
  }
  double total = 0.0;
  for (const auto& id : ballot.ranking) total += catalog.at(id).popularity;
  ballot.justification =
      "mean popularity " + format_real(total / static_cast<double>(ballot.ranking.size()));
  return ballot;
}

}  // namespace fair_agents
