#include <cstdlib>

#include <gtest/gtest.h>

#include "fair_agents/agents/adapter.hpp"
#include "fair_agents/core/errors.hpp"
#include "fair_agents/evaluation/metrics.hpp"
#include "fair_agents/evaluation/report.hpp"
#include "fair_agents/orchestrator/orchestrator.hpp"

using namespace fair_agents;

namespace {

Item make(std::string id, std::string provider, std::set<std::string> cats, double pop, double sus) {
  return {std::move(id), std::move(provider), std::move(cats), pop, sus, {}, ""};
}

Catalog six() {
  Catalog c;
  c.add(make("a1", "p1", {"museum"}, 0.9, 0.2));
  c.add(make("a2", "p1", {"beach"}, 0.7, 0.4));
  c.add(make("a3", "p2", {"museum", "food"}, 0.3, 0.8));
  c.add(make("a4", "p2", {"nature"}, 0.2, 0.9));
  c.add(make("a5", "p3", {"food"}, 0.5, 0.5));
  c.add(make("a6", "p3", {"beach", "nature"}, 0.4, 0.7));
  return c;
}

AgentSpec spec(std::string id, Objective obj, MetricId metric, double target) {
  AgentSpec s;
  s.agent_id = std::move(id);
  s.objective = obj;
  s.objective_metric = metric;
  s.objective_target = target;
  return s;
}

std::vector<AgentSpec> three() {
  return {spec("relevance", Objective::kRelevance, MetricId::kNdcg, 1.0),
          spec("exposure", Objective::kProviderExposure, MetricId::kGiniExposure, 0.0),
          spec("popularity", Objective::kPopularityMitigation, MetricId::kPopLift, 0.0)};
}

Query query(std::string id, int top_n = 3) {
  Query q;
  q.id = std::move(id);
  q.preference_weights = {{"museum", 1.0}, {"food", 0.5}};
  q.top_n = top_n;
  return q;
}

ActivationPolicy dynamic(int window, double threshold) {
  ActivationPolicy p;
  p.mode = ActivationPolicy::Mode::kDynamic;
  p.window = window;
  p.fairness_threshold = threshold;
  return p;
}

struct NoEnvOverride {
  NoEnvOverride() { unsetenv(kAdapterUrlEnv); }
  ~NoEnvOverride() { unsetenv(kAdapterUrlEnv); }
};

}  // namespace

TEST(CandidateCount, Policy) {
  EXPECT_EQ(candidate_count_policy(5), 10);
  EXPECT_EQ(candidate_count_policy(1), 2);
  EXPECT_EQ(candidate_count_policy(4, 3), 12);
  EXPECT_THROW(candidate_count_policy(0), InvalidArgument);
  EXPECT_THROW(candidate_count_policy(3, 0), InvalidArgument);
}

TEST(Ledger, RingBufferKeepsLastWindow) {
  FairnessLedger ledger;
  for (int i = 0; i < 10; ++i) ledger.record("a", i, 4);
  EXPECT_EQ(ledger.per_agent["a"], (std::deque<double>{6, 7, 8, 9}));
  ledger.record("b", -0.5, 2);
  EXPECT_EQ(ledger.per_agent["b"].front(), 0.0);
  EXPECT_THROW(ledger.record("a", 0, 0), InvalidArgument);
}

TEST(Activation, StaticKeepsEveryone) {
  FairnessLedger ledger;
  for (int i = 0; i < 5; ++i) ledger.record("exposure", 0.0, 3);
  const auto specs = three();
  const auto sel = select_agents(query("q"), specs, ledger, ActivationPolicy{});
  ASSERT_EQ(sel.active.size(), 3u);
  EXPECT_EQ(sel.active[0].agent_id, "exposure");
  EXPECT_EQ(sel.active[2].agent_id, "relevance");
  EXPECT_TRUE(sel.skipped.empty());
}

TEST(Activation, DynamicNeedsFullWindowUnderThreshold) {
  const auto specs = three();
  FairnessLedger ledger;
  const auto policy = dynamic(3, 0.1);
  ledger.record("exposure", 0.0, 3);
  ledger.record("exposure", 0.05, 3);
  EXPECT_EQ(select_agents(query("q"), specs, ledger, policy).active.size(), 3u);
  ledger.record("exposure", 0.1, 3);  // threshold itself counts as met
  auto sel = select_agents(query("q"), specs, ledger, policy);
  EXPECT_EQ(sel.active.size(), 2u);
  EXPECT_EQ(sel.skipped.count("exposure"), 1u);
  ledger.record("exposure", 0.11, 3);
  EXPECT_EQ(select_agents(query("q"), specs, ledger, policy).active.size(), 3u);
}

TEST(Activation, CompatibilityOverride) {
  auto specs = three();
  specs[1].compatibility_tags = {"museum"};
  FairnessLedger ledger;
  for (int i = 0; i < 3; ++i) ledger.record("exposure", 0.0, 3);
  auto policy = dynamic(3, 0.1);
  EXPECT_EQ(select_agents(query("q"), specs, ledger, policy).skipped.count("exposure"), 1u);
  policy.compatibility_min = 0.5;  // Jaccard({museum,food},{museum}) = 0.5
  EXPECT_TRUE(select_agents(query("q"), specs, ledger, policy).skipped.empty());
  policy.compatibility_min = 0.6;
  EXPECT_EQ(select_agents(query("q"), specs, ledger, policy).skipped.count("exposure"), 1u);
  EXPECT_DOUBLE_EQ(compatibility(query("q"), specs[1]), 0.5);
  EXPECT_EQ(compatibility(query("q"), specs[0]), 1.0);
}

TEST(Activation, NobodyLeftThrows) {
  const std::vector<AgentSpec> specs{spec("only", Objective::kRelevance, MetricId::kNdcg, 1.0)};
  FairnessLedger ledger;
  ledger.record("only", 0.0, 1);
  EXPECT_THROW(select_agents(query("q"), specs, ledger, dynamic(1, 0.1)), NoActiveAgents);
  EXPECT_THROW(select_agents(query("q"), {}, ledger, ActivationPolicy{}), InvalidArgument);
}

// Regrets 0,0,0,0.5,0,0 with W=3 and threshold 0.1.
TEST(Activation, ScheduleExample) {
  const std::vector<AgentSpec> specs{spec("watched", Objective::kRelevance, MetricId::kNdcg, 1.0),
                                     spec("other", Objective::kRelevance, MetricId::kNdcg, 1.0)};
  const std::vector<double> regrets{0, 0, 0, 0.5, 0, 0};
  const std::vector<bool> expected{true, true, true, false, true, true};
  const auto policy = dynamic(3, 0.1);
  FairnessLedger ledger;
  for (std::size_t t = 0; t < regrets.size(); ++t) {
    const auto sel = select_agents(query("q"), specs, ledger, policy);
    const bool active = sel.skipped.count("watched") == 0;
    EXPECT_EQ(active, expected[t]) << "query " << t + 1;
    ledger.record("watched", regrets[t], policy.window);
    ledger.record("other", 1.0, policy.window);
  }
}

TEST(Pipeline, SingleAgentPassesThrough) {
  NoEnvOverride guard;
  const Catalog c = six();
  const std::vector<AgentSpec> specs{spec("solo", Objective::kRelevance, MetricId::kNdcg, 1.0)};
  for (Rule r : kAllRules) {
    RuleConfig rc;
    rc.rule = r;
    Orchestrator orch(c, specs, ActivationPolicy{}, rc);
    const Query q = query("q1", 3);
    const auto out = orch.process(q);
    const Ranking direct = generate_relevance(q, c, 6).ranking;
    EXPECT_EQ(out.final_list, Ranking(direct.begin(), direct.begin() + 3)) << to_string(r);
    EXPECT_EQ(out.aggregate.influence.at("solo"), 1.0);
    EXPECT_EQ(out.counters.aggregation_runs, 1);
  }
}

TEST(Pipeline, GhostsAreDroppedAndWeightDecays) {
  NoEnvOverride guard;
  const Catalog c = six();
  AgentSpec ext = spec("ext", Objective::kExternal, MetricId::kNdcg, 1.0);
  ext.params["inject_ghosts"] = 1.0;
  std::vector<AgentSpec> specs{ext, spec("relevance", Objective::kRelevance, MetricId::kNdcg, 1.0)};
  Orchestrator orch(c, specs, ActivationPolicy{}, RuleConfig{});
  const Query q = query("q1", 3);
  const int k = candidate_count_policy(q.top_n);
  const auto out = orch.process(q);
  for (const auto& id : out.final_list) EXPECT_TRUE(c.contains(id)) << id;
  for (const auto& b : out.per_agent_ballots) {
    for (const auto& id : b.ranking) EXPECT_TRUE(c.contains(id));
  }
  EXPECT_EQ(out.violations.at("ext"), 1);
  EXPECT_DOUBLE_EQ(orch.state().agents.at("ext").reliability_weight, 1.0 - 0.5 / k);
  EXPECT_EQ(orch.state().agents.at("relevance").reliability_weight, 1.0);
  EXPECT_EQ(out.counters.adapter_calls, 1);
  const auto& ext_ballot = *std::find_if(out.per_agent_ballots.begin(), out.per_agent_ballots.end(),
                                         [](const Ballot& b) { return b.agent_id == "ext"; });
  EXPECT_DOUBLE_EQ(ext_ballot.weight, 1.0 - 0.5 / k);

  const auto second = orch.process(query("q2", 3));
  EXPECT_LT(orch.state().agents.at("ext").reliability_weight, 1.0 - 0.5 / k);
  EXPECT_EQ(orch.state().agents.at("ext").queries_served, 2);
  (void)second;
}

TEST(Pipeline, AllGhostBallotIsDropped) {
  NoEnvOverride guard;
  const Catalog c = six();
  AgentSpec ext = spec("ext", Objective::kExternal, MetricId::kNdcg, 1.0);
  ext.params["inject_ghosts"] = 100.0;
  {
    std::vector<AgentSpec> specs{ext, spec("relevance", Objective::kRelevance, MetricId::kNdcg, 1.0)};
    Orchestrator orch(c, specs, ActivationPolicy{}, RuleConfig{});
    const auto out = orch.process(query("q1"));
    EXPECT_EQ(out.skipped_agents.count("ext"), 1u);
    EXPECT_EQ(out.per_agent_ballots.size(), 1u);
    EXPECT_DOUBLE_EQ(orch.state().agents.at("ext").reliability_weight, 0.5);
  }
  Orchestrator lonely(c, {ext}, ActivationPolicy{}, RuleConfig{});
  EXPECT_THROW(lonely.process(query("q1")), NoActiveAgents);
}

TEST(Pipeline, AdapterFailureRecordsViolation) {
  NoEnvOverride guard;
  const Catalog c = six();
  AgentSpec ext = spec("ext", Objective::kExternal, MetricId::kNdcg, 1.0);
  ext.params["endpoint"] = std::string("ftp://unreachable");
  std::vector<AgentSpec> specs{ext, spec("relevance", Objective::kRelevance, MetricId::kNdcg, 1.0)};
  Orchestrator orch(c, specs, ActivationPolicy{}, RuleConfig{});
  const auto out = orch.process(query("q1"));
  EXPECT_EQ(out.violations.at("ext"), 1);
  EXPECT_NE(out.skipped_agents.at("ext").find("adapter"), std::string::npos);
  EXPECT_DOUBLE_EQ(orch.state().agents.at("ext").reliability_weight, 0.5);
}

TEST(Pipeline, SkippedAgentsAreStillMeasured) {
  NoEnvOverride guard;
  const Catalog c = six();
  // Recall with a target of 0 is always met, so "popularity" sits out once its
  // window fills. The compatibility override keeps "relevance" voting.
  std::vector<AgentSpec> specs{spec("relevance", Objective::kRelevance, MetricId::kNdcg, 1.0),
                               spec("popularity", Objective::kPopularityMitigation,
                                    MetricId::kRecall, 0.0)};
  specs[0].compatibility_tags = {"museum", "food"};
  specs[1].compatibility_tags = {"nightlife"};
  auto policy = dynamic(2, 0.1);
  policy.compatibility_min = 0.5;
  Orchestrator orch(c, specs, policy, RuleConfig{});
  std::vector<QueryOutcome> outs;
  for (int i = 0; i < 5; ++i) outs.push_back(orch.process(query("q" + std::to_string(i))));
  EXPECT_TRUE(outs[0].skipped_agents.empty());
  EXPECT_TRUE(outs[1].skipped_agents.empty());
  EXPECT_EQ(outs[2].skipped_agents.count("popularity"), 1u);
  for (const auto& o : outs) {
    EXPECT_EQ(o.regret.size(), 2u);
    EXPECT_EQ(o.counters.evaluation_calls, 2);
  }
  for (const auto& [_, buffer] : orch.state().ledger.per_agent) EXPECT_LE(buffer.size(), 2u);
  EXPECT_EQ(orch.state().ledger.queries_processed, 5);
}

TEST(Pipeline, ExposureCreditedFromFinalList) {
  NoEnvOverride guard;
  const Catalog c = six();
  Orchestrator orch(c, three(), ActivationPolicy{}, RuleConfig{});
  const auto out = orch.process(query("q1"));
  ExposureLedger expected;
  expected.credit(out.final_list, c);
  EXPECT_EQ(orch.state().ledger.exposure, expected);
  orch.reset();
  EXPECT_EQ(orch.state(), EngineState{});
}

TEST(Pipeline, DeterministicAcrossRunsAndParallelism) {
  NoEnvOverride guard;
  const Catalog c = six();
  AgentSpec ext = spec("ext", Objective::kExternal, MetricId::kNdcg, 1.0);
  ext.params["inject_ghosts"] = 2.0;
  auto specs = three();
  specs.push_back(ext);
  for (Rule r : kAllRules) {
    RuleConfig rc;
    rc.rule = r;
    OrchestratorOptions parallel;
    parallel.parallel_agents = true;
    Orchestrator a(c, specs, dynamic(2, 0.2), rc);
    Orchestrator b(c, specs, dynamic(2, 0.2), rc);
    Orchestrator p(c, specs, dynamic(2, 0.2), rc, parallel);
    for (int i = 0; i < 6; ++i) {
      Query q = query("q" + std::to_string(i), 1 + i % 3);
      if (i % 2) q.preference_weights = {{"beach", 1.0}};
      const auto oa = a.process(q);
      EXPECT_TRUE(same_outcome(oa, b.process(q)));
      EXPECT_TRUE(same_outcome(oa, p.process(q)));
    }
    EXPECT_EQ(a.state(), p.state());
  }
}

TEST(Pipeline, RegretMatchesEvaluateMetric) {
  NoEnvOverride guard;
  const Catalog c = six();
  const auto specs = three();
  EngineState state;
  Query q = query("q1");
  q.user_history = {"a2"};
  auto [out, next] = process_query(q, specs, c, state, ActivationPolicy{}, RuleConfig{});
  for (const auto& s : specs) {
    const auto achieved = evaluate_metric(s.objective_metric, q, out.final_list, c, state.ledger.exposure);
    ASSERT_TRUE(achieved);
    EXPECT_DOUBLE_EQ(out.regret.at(s.agent_id), fairness_regret(s, *achieved));
    EXPECT_EQ(next.ledger.per_agent.at(s.agent_id).back(), std::max(0.0, out.regret.at(s.agent_id)));
  }
}

TEST(Orchestrator, RejectsDuplicateIds) {
  const Catalog c = six();
  auto specs = three();
  specs.push_back(specs[0]);
  EXPECT_THROW(Orchestrator(c, specs, ActivationPolicy{}, RuleConfig{}), InvalidArgument);
  Catalog empty;
  EXPECT_THROW(process_query(query("q"), three(), empty, {}, ActivationPolicy{}, RuleConfig{}),
               InvalidArgument);
}
