#pragma once

#include <map>
#include <span>

#include "fair_agents/agents/agents.hpp"
#include "fair_agents/core/types.hpp"

namespace fair_agents {

// Tolerance on sum(p) == 1 for probability vectors.
inline constexpr double kNormalizationTolerance = 1e-9;
// Additive smoothing applied to q before KL.
inline constexpr double kKlSmoothing = 1e-9;

// DCG over the first k entries divided by the ideal DCG over all graded items.
// Returns 0 when no item has positive relevance.
double ndcg_at_k(std::span<const ItemId> ranked, const std::map<ItemId, double>& relevance, int k);

// |top-k ∩ relevant| / |relevant|; 0 for an empty relevant set.
double recall_at_k(std::span<const ItemId> ranked, const std::set<ItemId>& relevant, int k);

// Gini coefficient of non-negative exposures. Throws ZeroMass when they sum
// to 0.
double gini_exposure(std::span<const double> exposures);

// Shannon entropy (base 2) divided by log2(n). Needs n >= 2 and a normalized
// vector; throws NotNormalized otherwise.
double normalized_entropy(std::span<const double> p);

enum class DivergenceKind { kKl, kJs };

// Base-2 divergences. KL smooths q; JS is bounded by 1. Throws LengthMismatch
// or NotNormalized.
double divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind);

// Relative lift of mean catalog popularity of `rec_items` over `profile_items`.
// Throws UndefinedBaseline when the profile is empty or has zero mean
// popularity.
double poplift(std::span<const ItemId> profile_items, std::span<const ItemId> rec_items,
               const Catalog& catalog);

// Shortfall from the agent's target, clamped at 0. Throws
// UnknownMetricDirection for metrics without a direction.
double fairness_regret(MetricId metric, double target, double achieved);
double fairness_regret(const AgentSpec& spec, double achieved);

// (sum of sqrt(f_i))^2 over per-agent fairness values in [0,1].
double l_half_balance(std::span<const double> per_agent_fairness);

}  // namespace fair_agents
