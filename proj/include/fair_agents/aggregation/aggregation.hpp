#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

// Absolute tolerance under which two aggregated reals count as equal.
inline constexpr double kTieTolerance = 1e-9;

struct RuleConfig {
  Rule rule = Rule::kBorda;
  bool use_weights = true;
  int kemeny_exact_limit = 8;
  int kemeny_search_iters = 1000;
  std::uint64_t seed = 0;

  bool operator==(const RuleConfig&) const = default;
};

// Weighted pairwise majority counts over the profile's pool.
//
// A ballot supports a over b when it ranks a above b, or ranks a and leaves b
// out. Two unranked items are tied on that ballot and contribute nothing.
class PairwiseTally {
 public:
  PairwiseTally(Ranking pool, std::vector<double> support);

  const Ranking& pool() const { return pool_; }
  std::size_t size() const { return pool_.size(); }

  // Indices follow pool order.
  double support(std::size_t a, std::size_t b) const { return support_[a * size() + b]; }
  double margin(std::size_t a, std::size_t b) const { return support(a, b) - support(b, a); }

  std::size_t index_of(const ItemId& id) const;

 private:
  Ranking pool_;
  std::vector<double> support_;
};

PairwiseTally pairwise_tally(const PreferenceProfile& profile, bool use_weights);

// Each rule returns a result with `influence` left empty; aggregate() fills it.
AggregateResult rule_borda(const PreferenceProfile& profile, const RuleConfig& config);
AggregateResult rule_copeland(const PreferenceProfile& profile, const RuleConfig& config);
AggregateResult rule_ranked_pairs(const PreferenceProfile& profile, const RuleConfig& config);
AggregateResult rule_kemeny(const PreferenceProfile& profile, const RuleConfig& config);

// Total weighted disagreement between `ranking` (a permutation of the pool)
// and the profile, under the same truncation semantics as the tally.
double kemeny_distance(const PairwiseTally& tally, std::span<const ItemId> ranking);

// Dispatches on config.rule, then computes leave-one-out influence. Throws
// InvalidProfile if no ballot carries positive effective weight.
AggregateResult aggregate(const PreferenceProfile& profile, const RuleConfig& config);

// Rule output without influence.
AggregateResult run_rule(const PreferenceProfile& profile, const RuleConfig& config);

// For each agent: normalized Kendall distance between `consensus` and the
// consensus re-aggregated without that agent's ballots, both restricted to the
// shared pool. A lone agent, or one whose removal leaves no usable ballot,
// gets 1.0.
std::map<std::string, double> influence_loo(const PreferenceProfile& profile,
                                            const RuleConfig& config,
                                            std::span<const ItemId> consensus);

}  // namespace fair_agents
