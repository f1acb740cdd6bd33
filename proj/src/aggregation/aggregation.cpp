#include "fair_agents/aggregation/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/core/ranking.hpp"

namespace fair_agents {

namespace {

// Reals are compared after snapping to a 1e-9 grid, which keeps every
// comparator a strict weak ordering while absorbing summation-order noise.
using TieKey = long long;

TieKey tie_key(double value) { return std::llround(value / kTieTolerance); }

double effective_weight(const Ballot& ballot, bool use_weights) {
  return use_weights ? ballot.weight : 1.0;
}

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join_ids(const Ranking& pool, const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i : idx) {
    if (!out.empty()) out += ", ";
    out += pool[i];
  }
  return out;
}

// Orders pool indices by descending score, ascending id, and records a tie
// event for every group of equal scores.
std::vector<std::size_t> order_by_score(const Ranking& pool, const std::vector<double>& score,
                                        std::vector<TieEvent>& trace) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const TieKey ka = tie_key(score[a]), kb = tie_key(score[b]);
    return ka != kb ? ka > kb : a < b;
  });
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && tie_key(score[order[j]]) == tie_key(score[order[i]])) ++j;
    if (j - i > 1) {
      std::vector<std::size_t> group(order.begin() + static_cast<long>(i),
                                     order.begin() + static_cast<long>(j));
      trace.push_back({"score-tie",
                       "items " + join_ids(pool, group) + " tied at " + fmt_real(score[order[i]]),
                       "ordered by item id"});
    }
    i = j;
  }
  return order;
}

Ranking to_ranking(const Ranking& pool, const std::vector<std::size_t>& order) {
  Ranking out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(pool[i]);
  return out;
}

std::map<ItemId, double> to_score_map(const Ranking& pool, const std::vector<double>& score) {
  std::map<ItemId, double> out;
  for (std::size_t i = 0; i < pool.size(); ++i) out.emplace(pool[i], score[i]);
  return out;
}

void require_positive_weight(const PreferenceProfile& profile, bool use_weights) {
  for (const auto& b : profile.ballots()) {
    if (effective_weight(b, use_weights) > 0.0 && !b.ranking.empty()) return;
  }
  throw InvalidProfile("profile has no non-empty ballot with positive weight");
}

}  // namespace

PairwiseTally::PairwiseTally(Ranking pool, std::vector<double> support)
    : pool_(std::move(pool)), support_(std::move(support)) {
  if (support_.size() != pool_.size() * pool_.size()) {
    throw InvalidArgument("PairwiseTally: support matrix does not match pool size");
  }
}

std::size_t PairwiseTally::index_of(const ItemId& id) const {
  auto it = std::lower_bound(pool_.begin(), pool_.end(), id);
  if (it == pool_.end() || *it != id) throw InvalidArgument("item '" + id + "' not in pool");
  return static_cast<std::size_t>(it - pool_.begin());
}

PairwiseTally pairwise_tally(const PreferenceProfile& profile, bool use_weights) {
  const Ranking& pool = profile.pool();
  const std::size_t m = pool.size();
  std::vector<double> support(m * m, 0.0);
  std::vector<std::size_t> ranked;
  std::vector<bool> is_ranked(m);

  for (const auto& ballot : profile.ballots()) {
    const double w = effective_weight(ballot, use_weights);
    if (w == 0.0) continue;
    ranked.clear();
    std::fill(is_ranked.begin(), is_ranked.end(), false);
    for (const auto& id : ballot.ranking) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(pool.begin(), pool.end(), id) - pool.begin());
      ranked.push_back(idx);
      is_ranked[idx] = true;
    }
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      for (std::size_t j = i + 1; j < ranked.size(); ++j) support[ranked[i] * m + ranked[j]] += w;
      for (std::size_t b = 0; b < m; ++b) {
        if (!is_ranked[b]) support[ranked[i] * m + b] += w;
      }
    }
  }
  return PairwiseTally(pool, std::move(support));
}

AggregateResult rule_borda(const PreferenceProfile& profile, const RuleConfig& config) {
  const Ranking& pool = profile.pool();
  const std::size_t m = pool.size();
  std::vector<double> score(m, 0.0);
  std::vector<bool> is_ranked(m);

  for (const auto& ballot : profile.ballots()) {
    const double w = effective_weight(ballot, config.use_weights);
    if (w == 0.0) continue;
    std::fill(is_ranked.begin(), is_ranked.end(), false);
    for (std::size_t pos = 0; pos < ballot.ranking.size(); ++pos) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(pool.begin(), pool.end(), ballot.ranking[pos]) - pool.begin());
      is_ranked[idx] = true;
      score[idx] += w * static_cast<double>(m - 1 - pos);
    }
    // Unranked items share the u lowest position scores {u-1, ..., 0} evenly.
    const std::size_t unranked = m - ballot.ranking.size();
    if (unranked > 0) {
      const double share = w * static_cast<double>(unranked - 1) / 2.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!is_ranked[i]) score[i] += share;
      }
    }
  }

  AggregateResult out;
  out.rule = Rule::kBorda;
  out.consensus = to_ranking(pool, order_by_score(pool, score, out.tiebreak_trace));
  out.scores = to_score_map(pool, score);
  return out;
}

AggregateResult rule_copeland(const PreferenceProfile& profile, const RuleConfig& config) {
  const PairwiseTally tally = pairwise_tally(profile, config.use_weights);
  const std::size_t m = tally.size();
  std::vector<double> score(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const TieKey k = tie_key(tally.margin(a, b));
      if (k > 0) {
        score[a] += 1.0;
      } else if (k == 0) {
        score[a] += 0.5;
      }
    }
  }
  AggregateResult out;
  out.rule = Rule::kCopeland;
  out.consensus = to_ranking(tally.pool(), order_by_score(tally.pool(), score, out.tiebreak_trace));
  out.scores = to_score_map(tally.pool(), score);
  return out;
}

AggregateResult rule_ranked_pairs(const PreferenceProfile& profile, const RuleConfig& config) {
  const PairwiseTally tally = pairwise_tally(profile, config.use_weights);
  const Ranking& pool = tally.pool();
  const std::size_t m = tally.size();
  AggregateResult out;
  out.rule = Rule::kRankedPairs;

  struct Edge {
    std::size_t winner, loser;
    double margin;
    TieKey key;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double margin = tally.margin(i, j);
      const TieKey k = tie_key(margin);
      if (k > 0) {
        edges.push_back({i, j, margin, k});
      } else if (k < 0) {
        edges.push_back({j, i, -margin, -k});
      } else {
        out.tiebreak_trace.push_back(
            {"tied-pair", pool[i] + " vs " + pool[j] + " has zero margin", "left unlocked"});
      }
    }
  }
  // Equal margins lock in lexicographic order of the (winner, loser) id pair;
  // pool indices follow id order.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.key != b.key) return a.key > b.key;
    return std::tie(a.winner, a.loser) < std::tie(b.winner, b.loser);
  });
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].key == edges[i].key) ++j;
    if (j - i > 1) {
      std::string pairs;
      for (std::size_t e = i; e < j; ++e) {
        if (!pairs.empty()) pairs += ", ";
        pairs += pool[edges[e].winner] + ">" + pool[edges[e].loser];
      }
      out.tiebreak_trace.push_back({"margin-tie", "pairs " + pairs + " share margin " +
                                                      fmt_real(edges[i].margin),
                                    "locked in lexicographic pair order"});
    }
    i = j;
  }

  std::vector<std::vector<std::size_t>> locked(m);
  auto reaches = [&](std::size_t from, std::size_t to) {
    std::vector<bool> seen(m, false);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = true;
      for (std::size_t w : locked[v]) stack.push_back(w);
    }
    return false;
  };
  std::vector<double> locked_wins(m, 0.0);
  for (const auto& e : edges) {
    if (reaches(e.loser, e.winner)) {
      out.tiebreak_trace.push_back({"skip",
                                    pool[e.winner] + ">" + pool[e.loser] + " (margin " +
                                        fmt_real(e.margin) + ") would close a cycle",
                                    "skipped"});
      continue;
    }
    locked[e.winner].push_back(e.loser);
    locked_wins[e.winner] += 1.0;
  }

  // Kahn's algorithm, always releasing the smallest available id.
  std::vector<int> indegree(m, 0);
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t w : locked[v]) ++indegree[w];
  }
  std::vector<std::size_t> order;
  std::vector<bool> done(m, false);
  while (order.size() < m) {
    std::vector<std::size_t> available;
    for (std::size_t v = 0; v < m; ++v) {
      if (!done[v] && indegree[v] == 0) available.push_back(v);
    }
    if (available.size() > 1) {
      out.tiebreak_trace.push_back({"order-tie",
                                    "unlocked choice among " + join_ids(pool, available),
                                    "took " + pool[available.front()] + " by item id"});
    }
    const std::size_t next = available.front();
    done[next] = true;
    order.push_back(next);
    for (std::size_t w : locked[next]) --indegree[w];
  }

  out.consensus = to_ranking(pool, order);
  out.scores = to_score_map(pool, locked_wins);
  return out;
}

double kemeny_distance(const PairwiseTally& tally, std::span<const ItemId> ranking) {
  std::vector<std::size_t> idx;
  idx.reserve(ranking.size());
  for (const auto& id : ranking) idx.push_back(tally.index_of(id));
  double total = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) total += tally.support(idx[j], idx[i]);
  }
  return total;
}

namespace {

double order_distance(const PairwiseTally& tally, const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) total += tally.support(order[j], order[i]);
  }
  return total;
}

// Exact minimizer by dynamic programming over the set of items still to be
// placed. best[S] is the cheapest arrangement of S given that everything
// outside S is already placed ahead of it. Walking forward and always taking
// the smallest index that stays optimal yields the lexicographically least
// minimizer.
std::vector<std::size_t> kemeny_exact(const PairwiseTally& tally, std::vector<TieEvent>& trace) {
  const std::size_t m = tally.size();
  const std::size_t full = (std::size_t{1} << m) - 1;
  std::vector<double> best(full + 1, 0.0);

  // Cost of putting x first among S: everyone else in S preferring to be ahead.
  auto lead_cost = [&](std::size_t x, std::size_t set) {
    double c = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      if (y != x && (set >> y & 1U)) c += tally.support(y, x);
    }
    return c;
  };

  for (std::size_t set = 1; set <= full; ++set) {
    double value = 0.0;
    bool first = true;
    for (std::size_t x = 0; x < m; ++x) {
      if (!(set >> x & 1U)) continue;
      const double candidate = lead_cost(x, set) + best[set & ~(std::size_t{1} << x)];
      if (first || tie_key(candidate) < tie_key(value)) value = candidate;
      first = false;
    }
    best[set] = value;
  }

  std::vector<std::size_t> order;
  std::size_t set = full;
  while (set != 0) {
    std::vector<std::size_t> optimal;
    for (std::size_t x = 0; x < m; ++x) {
      if (!(set >> x & 1U)) continue;
      const double candidate = lead_cost(x, set) + best[set & ~(std::size_t{1} << x)];
      if (tie_key(candidate) == tie_key(best[set])) optimal.push_back(x);
    }
    if (optimal.size() > 1) {
      trace.push_back({"order-tie",
                       "several optimal continuations: " + join_ids(tally.pool(), optimal),
                       "took " + tally.pool()[optimal.front()] + " by item id"});
    }
    order.push_back(optimal.front());
    set &= ~(std::size_t{1} << optimal.front());
  }
  return order;
}

// Adjacent-swap hill climbing; stops at a local optimum or after max_passes.
void hill_climb(const PairwiseTally& tally, std::vector<std::size_t>& order, int max_passes) {
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t a = order[i], b = order[i + 1];
      // a ahead of b costs support(b, a); swapping costs support(a, b).
      if (tie_key(tally.support(a, b)) < tie_key(tally.support(b, a))) {
        std::swap(order[i], order[i + 1]);
        improved = true;
      }
    }
    if (!improved) break;
  }
}

constexpr int kKemenyRestarts = 4;

std::vector<std::size_t> kemeny_heuristic(const PreferenceProfile& profile,
                                          const PairwiseTally& tally, const RuleConfig& config,
                                          std::vector<TieEvent>& trace) {
  const AggregateResult seed_result = rule_borda(profile, config);
  std::vector<std::size_t> best;
  for (const auto& id : seed_result.consensus) best.push_back(tally.index_of(id));
  hill_climb(tally, best, config.kemeny_search_iters);
  double best_cost = order_distance(tally, best);

  std::mt19937_64 rng(config.seed);
  for (int restart = 0; restart < kKemenyRestarts; ++restart) {
    std::vector<std::size_t> order(tally.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    hill_climb(tally, order, config.kemeny_search_iters);
    const double cost = order_distance(tally, order);
    const TieKey k = tie_key(cost), kb = tie_key(best_cost);
    if (k < kb || (k == kb && order < best)) {
      best = std::move(order);
      best_cost = cost;
    }
  }
  trace.push_back({"heuristic",
                   "pool of " + std::to_string(tally.size()) + " exceeds exact limit " +
                       std::to_string(config.kemeny_exact_limit),
                   "Borda-seeded local search with " + std::to_string(kKemenyRestarts) +
                       " seeded restarts"});
  return best;
}

}  // namespace

AggregateResult rule_kemeny(const PreferenceProfile& profile, const RuleConfig& config) {
  if (config.kemeny_exact_limit < 2) throw InvalidArgument("kemeny_exact_limit must be >= 2");
  const PairwiseTally tally = pairwise_tally(profile, config.use_weights);
  const std::size_t m = tally.size();

  AggregateResult out;
  out.rule = Rule::kKemeny;
  std::vector<std::size_t> order;
  if (m <= static_cast<std::size_t>(config.kemeny_exact_limit) && m < 8 * sizeof(std::size_t) - 1) {
    order = kemeny_exact(tally, out.tiebreak_trace);
  } else {
    out.heuristic = true;
    order = kemeny_heuristic(profile, tally, config, out.tiebreak_trace);
  }
  out.consensus = to_ranking(tally.pool(), order);
  out.objective = order_distance(tally, order);

  std::vector<double> net(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a != b) net[a] += tally.margin(a, b);
    }
  }
  out.scores = to_score_map(tally.pool(), net);
  return out;
}

AggregateResult run_rule(const PreferenceProfile& profile, const RuleConfig& config) {
  switch (config.rule) {
    case Rule::kBorda:
      return rule_borda(profile, config);
    case Rule::kCopeland:
      return rule_copeland(profile, config);
    case Rule::kRankedPairs:
      return rule_ranked_pairs(profile, config);
    case Rule::kKemeny:
      return rule_kemeny(profile, config);
  }
  throw InvalidArgument("unknown rule");
}

AggregateResult aggregate(const PreferenceProfile& profile, const RuleConfig& config) {
  require_positive_weight(profile, config.use_weights);
  AggregateResult out = run_rule(profile, config);
  out.influence = influence_loo(profile, config, out.consensus);
  return out;
}

std::map<std::string, double> influence_loo(const PreferenceProfile& profile,
                                            const RuleConfig& config,
                                            std::span<const ItemId> consensus) {
  const auto agents = profile.agent_ids();
  std::map<std::string, double> influence;
  if (agents.size() == 1) {
    influence.emplace(agents.front(), 1.0);
    return influence;
  }
  for (const auto& agent : agents) {
    std::vector<Ballot> rest;
    bool usable = false;
    for (const auto& b : profile.ballots()) {
      if (b.agent_id == agent) continue;
      rest.push_back(b);
      usable = usable || (effective_weight(b, config.use_weights) > 0.0 && !b.ranking.empty());
    }
    if (!usable) {
      influence.emplace(agent, 1.0);
      continue;
    }
    const PreferenceProfile reduced(std::move(rest));
    const AggregateResult loo = run_rule(reduced, config);
    const Ranking shared = restrict_to(consensus, reduced.pool());
    const Ranking loo_shared = restrict_to(loo.consensus, shared);
    influence.emplace(agent, kendall_tau(shared, loo_shared).normalized);
  }
  return influence;
}

}  // namespace fair_agents
