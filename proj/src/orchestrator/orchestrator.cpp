#include "fair_agents/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <set>

#include "fair_agents/agents/adapter.hpp"
#include "fair_agents/core/errors.hpp"
#include "fair_agents/core/ranking.hpp"
#include "fair_agents/evaluation/metrics.hpp"
#include "fair_agents/evaluation/report.hpp"

namespace fair_agents {

StageCounters& StageCounters::operator+=(const StageCounters& other) {
  generation_calls += other.generation_calls;
  adapter_calls += other.adapter_calls;
  grounding_calls += other.grounding_calls;
  aggregation_runs += other.aggregation_runs;
  evaluation_calls += other.evaluation_calls;
  return *this;
}

bool same_outcome(const QueryOutcome& a, const QueryOutcome& b) {
  return a.query == b.query && a.final_list == b.final_list &&
         a.per_agent_ballots == b.per_agent_ballots && a.aggregate == b.aggregate &&
         a.active_agents == b.active_agents && a.skipped_agents == b.skipped_agents &&
         a.justifications == b.justifications && a.violations == b.violations &&
         a.regret == b.regret && a.counters == b.counters;
}

void FairnessLedger::record(const std::string& agent_id, double regret, int window) {
  if (window < 1) throw InvalidArgument("ledger window must be >= 1");
  auto& buffer = per_agent[agent_id];
  buffer.push_back(std::max(0.0, regret));
  while (buffer.size() > static_cast<std::size_t>(window)) buffer.pop_front();
}

bool FairnessLedger::consistently_met(const std::string& agent_id,
                                      const ActivationPolicy& policy) const {
  auto it = per_agent.find(agent_id);
  if (it == per_agent.end()) return false;
  const auto& buffer = it->second;
  if (buffer.size() < static_cast<std::size_t>(policy.window)) return false;
  return std::all_of(buffer.begin(), buffer.end(),
                     [&](double r) { return r <= policy.fairness_threshold; });
}

double compatibility(const Query& query, const AgentSpec& spec) {
  if (spec.compatibility_tags.empty()) return 1.0;
  std::set<std::string> wanted;
  for (const auto& [category, weight] : query.preference_weights) {
    if (weight > 0.0) wanted.insert(category);
  }
  std::size_t shared = 0;
  for (const auto& tag : spec.compatibility_tags) shared += wanted.contains(tag) ? 1 : 0;
  const std::size_t united = wanted.size() + spec.compatibility_tags.size() - shared;
  return united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);
}

AgentSelection select_agents(const Query& query, std::span<const AgentSpec> specs,
                             const FairnessLedger& ledger, const ActivationPolicy& policy) {
  if (specs.empty()) throw InvalidArgument("select_agents: no agent specs");
  if (policy.window < 1) throw InvalidArgument("activation window must be >= 1");

  AgentSelection out;
  for (const auto& spec : specs) {
    if (policy.mode == ActivationPolicy::Mode::kDynamic &&
        ledger.consistently_met(spec.agent_id, policy)) {
      const bool override = policy.compatibility_min > 0.0 &&
                            compatibility(query, spec) >= policy.compatibility_min;
      if (!override) {
        out.skipped.emplace(spec.agent_id, "objective consistently met");
        continue;
      }
    }
    out.active.push_back(spec);
  }
  std::sort(out.active.begin(), out.active.end(),
            [](const AgentSpec& a, const AgentSpec& b) { return a.agent_id < b.agent_id; });
  if (out.active.empty()) {
    throw NoActiveAgents("activation policy left no agent active for query '" + query.id + "'");
  }
  return out;
}

int candidate_count_policy(int top_n, int multiplier) {
  if (top_n < 1) throw InvalidArgument("top_n must be >= 1");
  if (multiplier < 1) throw InvalidArgument("candidate multiplier must be >= 1");
  return multiplier * top_n;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// What one agent handed back for a query.
struct Generated {
  std::optional<Ballot> ballot;
  std::string failure;  // set when the adapter failed
  bool external = false;
};

Generated generate_for(const AgentSpec& spec, const Query& query, const Catalog& catalog,
                       const ExposureLedger& exposure, int k,
                       const std::optional<std::string>& adapter_url) {
  Generated out;
  switch (spec.objective) {
    case Objective::kRelevance:
      out.ballot = generate_relevance(query, catalog, k);
      break;
    case Objective::kProviderExposure:
      out.ballot = generate_provider_exposure(query, catalog, exposure, k);
      break;
    case Objective::kPopularityMitigation:
      out.ballot = generate_popularity_mitigation(query, catalog, k);
      break;
    case Objective::kExternal: {
      out.external = true;
      std::vector<const Item*> slice;
      for (const auto& [_, item] : catalog.items()) {
        if (satisfies_constraints(query, item)) slice.push_back(&item);
      }
      try {
        out.ballot = request_external(spec, query, slice, k, adapter_url);
      } catch (const AdapterTimeout& e) {
        out.failure = std::string("adapter timeout: ") + e.what();
      } catch (const AdapterMalformed& e) {
        out.failure = std::string("adapter malformed: ") + e.what();
      } catch (const AdapterError& e) {
        out.failure = std::string("adapter unavailable: ") + e.what();
      }
      break;
    }
  }
  if (out.ballot) out.ballot->agent_id = spec.agent_id;
  return out;
}

}  // namespace

std::pair<QueryOutcome, EngineState> process_query(const Query& query,
                                                   std::span<const AgentSpec> specs,
                                                   const Catalog& catalog, EngineState state,
                                                   const ActivationPolicy& policy,
                                                   const RuleConfig& rule_config,
                                                   const OrchestratorOptions& options) {
  if (catalog.empty()) throw InvalidArgument("process_query: catalog is empty");
  QueryOutcome outcome;
  outcome.query = query;

  // (1) activation
  AgentSelection selection = select_agents(query, specs, state.ledger, policy);
  outcome.skipped_agents = selection.skipped;
  for (const auto& spec : selection.active) outcome.active_agents.push_back(spec.agent_id);

  // (2) generation; results are consumed in agent-id order regardless of
  // completion order.
  const int k = candidate_count_policy(query.top_n, options.candidate_multiplier);
  auto start = Clock::now();
  std::vector<Generated> generated;
  generated.reserve(selection.active.size());
  if (options.parallel_agents && selection.active.size() > 1) {
    std::vector<std::future<Generated>> pending;
    for (const auto& spec : selection.active) {
      pending.push_back(std::async(std::launch::async, [&, spec_ptr = &spec] {
        return generate_for(*spec_ptr, query, catalog, state.ledger.exposure, k,
                            options.adapter_url);
      }));
    }
    for (auto& f : pending) generated.push_back(f.get());
  } else {
    for (const auto& spec : selection.active) {
      generated.push_back(
          generate_for(spec, query, catalog, state.ledger.exposure, k, options.adapter_url));
    }
  }
  outcome.counters.generation_calls = static_cast<long>(generated.size());
  for (const auto& g : generated) outcome.counters.adapter_calls += g.external ? 1 : 0;
  outcome.timings.generation_ms = ms_since(start);

  // (3) grounding and reliability
  start = Clock::now();
  std::vector<Ballot> ballots;
  for (std::size_t i = 0; i < selection.active.size(); ++i) {
    const std::string& agent = selection.active[i].agent_id;
    AgentState& agent_state = state.agents[agent];
    Generated& g = generated[i];
    if (!g.ballot) {
      agent_state = update_reliability(agent_state, 1, 1, options.reliability);
      outcome.violations[agent] = 1;
      outcome.skipped_agents.emplace(agent, g.failure);
      continue;
    }
    const long items = static_cast<long>(g.ballot->ranking.size());
    ++outcome.counters.grounding_calls;
    try {
      GroundedBallot grounded = validate_ballot(*g.ballot, catalog);
      const long v = static_cast<long>(grounded.violations);
      agent_state = update_reliability(agent_state, v, items, options.reliability);
      outcome.violations[agent] = v;
      grounded.ballot.weight = agent_state.reliability_weight;
      if (grounded.ballot.justification) {
        outcome.justifications.emplace(agent, *grounded.ballot.justification);
      }
      ballots.push_back(std::move(grounded.ballot));
    } catch (const EmptyAfterGrounding& e) {
      const auto v = static_cast<long>(e.violations());
      agent_state = update_reliability(agent_state, v, v, options.reliability);
      outcome.violations[agent] = v;
      outcome.skipped_agents.emplace(agent, "empty ballot after grounding");
    }
  }
  outcome.timings.grounding_ms = ms_since(start);
  if (ballots.empty()) {
    throw NoActiveAgents("every active agent was dropped for query '" + query.id + "'");
  }

  // (4) aggregation, (5) truncation
  start = Clock::now();
  const PreferenceProfile profile(ballots);
  outcome.aggregate = aggregate(profile, rule_config);
  outcome.counters.aggregation_runs =
      1 + (profile.agent_ids().size() > 1 ? static_cast<long>(profile.agent_ids().size()) : 0);
  outcome.per_agent_ballots = std::move(ballots);
  const auto n = std::min(outcome.aggregate.consensus.size(), static_cast<std::size_t>(query.top_n));
  outcome.final_list.assign(outcome.aggregate.consensus.begin(),
                            outcome.aggregate.consensus.begin() + static_cast<long>(n));
  outcome.timings.aggregation_ms = ms_since(start);

  // (6) every agent's objective is measured, voting or not
  start = Clock::now();
  for (const auto& spec : specs) {
    ++outcome.counters.evaluation_calls;
    if (auto achieved = evaluate_metric(spec.objective_metric, query, outcome.final_list, catalog,
                                        state.ledger.exposure)) {
      const double regret = fairness_regret(spec, *achieved);
      outcome.regret.emplace(spec.agent_id, regret);
      state.ledger.record(spec.agent_id, regret, policy.window);
    }
  }
  // (7) exposure credit
  state.ledger.exposure.credit(outcome.final_list, catalog);
  ++state.ledger.queries_processed;
  outcome.timings.evaluation_ms = ms_since(start);

  return {std::move(outcome), std::move(state)};
}

Orchestrator::Orchestrator(const Catalog& catalog, std::vector<AgentSpec> specs,
                           ActivationPolicy policy, RuleConfig rule_config,
                           OrchestratorOptions options)
    : catalog_(catalog),
      specs_(std::move(specs)),
      policy_(policy),
      rule_config_(rule_config),
      options_(std::move(options)) {
  std::set<std::string> ids;
  for (const auto& spec : specs_) {
    if (spec.agent_id.empty()) throw InvalidArgument("agent id must be non-empty");
    if (!ids.insert(spec.agent_id).second) {
      throw InvalidArgument("duplicate agent id '" + spec.agent_id + "'");
    }
  }
}

QueryOutcome Orchestrator::process(const Query& query) {
  auto [outcome, next] =
      process_query(query, specs_, catalog_, state_, policy_, rule_config_, options_);
  state_ = std::move(next);
  return std::move(outcome);
}

}  // namespace fair_agents
