// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are the constants below and are not tunable
// from the command line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fair_agents/agents/adapter.hpp"
#include "fair_agents/aggregation/aggregation.hpp"
#include "fair_agents/cli/app.hpp"
#include "fair_agents/core/ranking.hpp"
#include "fair_agents/evaluation/metrics.hpp"
#include "fair_agents/evaluation/report.hpp"
#include "fair_agents/io/scenario.hpp"
#include "fair_agents/orchestrator/orchestrator.hpp"
#include "oracles.hpp"

using namespace fair_agents;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricTol = 1e-9;
constexpr double kJsSymmetryTol = 1e-12;
constexpr double kOracleRuntimeLimitS = 60.0;
constexpr double kRunLimitS = 10.0;
constexpr double kCompareLimitS = 60.0;
constexpr std::uint64_t kSeed = 20240601;

const fs::path kData = FAIR_AGENTS_DATA_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;
  int shown = 0;

  // Records a failure; only the first few are described.
  void fail(const std::string& why) {
    pass = false;
    if (shown++ < 3) detail += (detail.empty() ? "" : "; ") + why;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string str(const Ranking& r) {
  std::string out;
  for (const auto& id : r) out += (out.empty() ? "" : ">") + id;
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

AggregateResult run(Rule rule, const std::vector<Ballot>& ballots) {
  RuleConfig config;
  config.rule = rule;
  config.seed = kSeed;
  return aggregate(PreferenceProfile(ballots), config);
}

Ranking oracle_for(Rule rule, const std::vector<Ballot>& ballots) {
  switch (rule) {
    case Rule::kBorda:
      return oracle::borda(ballots);
    case Rule::kCopeland:
      return oracle::copeland(ballots);
    case Rule::kRankedPairs:
      return oracle::ranked_pairs(ballots);
    case Rule::kKemeny:
      return oracle::kemeny(ballots).order;
  }
  return {};
}

bool has_tie_events(const AggregateResult& r) {
  for (const auto& e : r.tiebreak_trace) {
    if (e.kind != "skip") return true;
  }
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fair_agents");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// --- 1 ---------------------------------------------------------------------

Verdict oracle_equivalence() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  Ranking items{"A", "B", "C"};
  std::vector<Ranking> perms;
  do perms.push_back(items);
  while (std::next_permutation(items.begin(), items.end()));
  int profiles = 0;
  for (const auto& r1 : perms) {
    for (const auto& r2 : perms) {
      for (const auto& r3 : perms) {
        ++profiles;
        const std::vector<Ballot> ballots{{"x", r1, std::nullopt, 1.0},
                                          {"y", r2, std::nullopt, 1.0},
                                          {"z", r3, std::nullopt, 1.0}};
        for (Rule rule : kAllRules) {
          const Ranking got = run(rule, ballots).consensus;
          const Ranking want = oracle_for(rule, ballots);
          v.expect(got == want, std::string(to_string(rule)) + " on " + str(r1) + "," + str(r2) + "," +
                                    str(r3) + ": " + str(got) + " vs " + str(want));
        }
      }
    }
  }
  const double secs = seconds_since(start);
  v.expect(profiles == 216, "enumerated " + std::to_string(profiles) + " profiles");
  v.expect(secs < kOracleRuntimeLimitS, "took " + num(secs) + " s");
  if (v.pass) v.detail = "216 profiles x 4 rules match oracles in " + num(secs) + " s";
  return v;
}

// --- 2 ---------------------------------------------------------------------

Verdict kemeny_optimality() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 2);
  for (int t = 0; t < 200; ++t) {
    const auto ballots = oracle::random_full_profile(rng, 5, 7, true);
    const auto got = run(Rule::kKemeny, ballots);
    double best = std::numeric_limits<double>::infinity();
    Ranking perm = oracle::item_labels(5);
    int count = 0;
    do {
      best = std::min(best, oracle::kemeny_cost(ballots, perm));
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double achieved = oracle::kemeny_cost(ballots, got.consensus);
    v.expect(count == 120 && !got.heuristic, "profile " + std::to_string(t) + " not exhaustively checked");
    v.expect(achieved == best, "profile " + std::to_string(t) + ": cost " + num(achieved) + " vs min " + num(best));
    v.expect(got.objective == best,
             "profile " + std::to_string(t) + ": reported objective " + num(got.objective) + " vs " + num(best));
  }
  if (v.pass) v.detail = "200 profiles, distance equals the minimum over 120 permutations";
  return v;
}

// --- 3 ---------------------------------------------------------------------

Verdict condorcet_consistency() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 3);
  int built = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 3 + static_cast<int>(rng() % 4);
    const int n = 3 + static_cast<int>(rng() % 5);
    auto ballots = t % 2 ? oracle::random_full_profile(rng, m, n, true)
                         : oracle::random_truncated_profile(rng, m, n);
    const ItemId winner = oracle::item_labels(m)[rng() % m];
    // Promote the chosen item ballot by ballot until it beats every rival.
    for (auto& b : ballots) {
      if (oracle::condorcet_winner(ballots) == winner) break;
      auto it = std::find(b.ranking.begin(), b.ranking.end(), winner);
      if (it != b.ranking.end()) b.ranking.erase(it);
      b.ranking.insert(b.ranking.begin(), winner);
    }
    if (oracle::condorcet_winner(ballots) != winner) {
      v.fail("could not construct profile " + std::to_string(t));
      continue;
    }
    ++built;
    for (Rule rule : {Rule::kCopeland, Rule::kRankedPairs}) {
      const auto got = run(rule, ballots);
      v.expect(got.consensus.front() == winner, std::string(to_string(rule)) + " profile " +
                                                    std::to_string(t) + " puts " +
                                                    got.consensus.front() + " first, not " + winner);
    }
  }
  if (v.pass) v.detail = std::to_string(built) + " profiles, Copeland and Ranked Pairs rank the winner first";
  return v;
}

// --- 4 ---------------------------------------------------------------------

std::vector<Ballot> mixed_profile(std::mt19937_64& rng, int m, int n) {
  auto full = oracle::random_full_profile(rng, m, n, true);
  auto cut = oracle::random_truncated_profile(rng, m, n);
  std::vector<Ballot> out;
  for (int i = 0; i < n; ++i) out.push_back(rng() % 2 ? full[i] : cut[i]);
  return out;
}

std::vector<Ballot> relabel(std::vector<Ballot> ballots, const std::map<ItemId, ItemId>& f) {
  for (auto& b : ballots) {
    for (auto& id : b.ranking) id = f.at(id);
  }
  return ballots;
}

Ranking relabel(Ranking r, const std::map<ItemId, ItemId>& f) {
  for (auto& id : r) id = f.at(id);
  return r;
}

Verdict axiom_suite() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 4);
  int bijection_checks = 0;
  for (int t = 0; t < 500; ++t) {
    const int m = 2 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto ballots = mixed_profile(rng, m, n);
    const auto labels = oracle::pool_of(ballots);
    const std::string tag = "profile " + std::to_string(t);

    // Order-preserving relabeling: sorted random names.
    std::set<std::string> fresh;
    while (fresh.size() < labels.size()) fresh.insert("poi-" + std::to_string(rng() % 100000));
    std::map<ItemId, ItemId> monotone;
    auto name = fresh.begin();
    for (const auto& id : labels) monotone[id] = *name++;

    // Arbitrary bijection, checked only where no tie-break fired.
    std::vector<ItemId> shuffled(labels.begin(), labels.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::map<ItemId, ItemId> bijection;
    for (std::size_t i = 0; i < labels.size(); ++i) bijection[labels[i]] = shuffled[i];

    // Anonymity: ballots in another order.
    auto permuted = ballots;
    std::shuffle(permuted.begin(), permuted.end(), rng);

    // Unanimity: every agent submits the same full ranking.
    Ranking shared = labels;
    std::shuffle(shared.begin(), shared.end(), rng);
    std::vector<Ballot> unanimous;
    for (int i = 0; i < n; ++i) {
      unanimous.push_back({"u" + std::to_string(i), shared, std::nullopt, oracle::grid_weight(rng)});
    }

    // Weight removal: an extra agent whose items are already in the pool.
    Ranking extra = labels;
    std::shuffle(extra.begin(), extra.end(), rng);
    extra.resize(1 + rng() % extra.size());
    auto with_zero = ballots;
    with_zero.push_back({"muted", extra, std::nullopt, 0.0});

    for (Rule rule : kAllRules) {
      const std::string where = tag + " " + std::string(to_string(rule));
      const auto base = run(rule, ballots);
      v.expect(run(rule, permuted).consensus == base.consensus, where + ": anonymity");
      v.expect(run(rule, relabel(ballots, monotone)).consensus == relabel(base.consensus, monotone),
               where + ": order-preserving neutrality");
      if (!has_tie_events(base)) {
        ++bijection_checks;
        v.expect(run(rule, relabel(ballots, bijection)).consensus == relabel(base.consensus, bijection),
                 where + ": neutrality under bijection");
      }
      v.expect(run(rule, unanimous).consensus == shared, where + ": unanimity");
      v.expect(run(rule, with_zero).consensus == base.consensus, where + ": weight removal");
    }
  }
  if (v.pass) {
    v.detail = "500 profiles x 4 rules, zero violations (" + std::to_string(bijection_checks) +
               " tie-free bijection checks)";
  }
  return v;
}

// --- 5 ---------------------------------------------------------------------

Verdict metric_identities() {
  Verdict v;
  auto near = [&](double got, double want, double tol, const std::string& what) {
    v.expect(std::abs(got - want) <= tol, what + " = " + num(got) + ", expected " + num(want));
  };
  const std::vector<double> uniform4{2.5, 2.5, 2.5, 2.5};
  near(gini_exposure(uniform4), 0.0, kMetricTol, "Gini(uniform)");
  near(gini_exposure(std::vector<double>{0, 0, 0, 4}), 0.75, kMetricTol, "Gini([0,0,0,4])");
  near(normalized_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 1.0, kMetricTol, "H(uniform)");
  near(normalized_entropy(std::vector<double>{1, 0, 0, 0}), 0.0, kMetricTol, "H(point mass)");

  std::mt19937_64 rng(kSeed + 5);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  auto random_dist = [&](std::size_t n) {
    std::vector<double> p(n);
    double s = 0;
    for (auto& x : p) s += (x = unit(rng));
    for (auto& x : p) x /= s;
    return p;
  };
  for (int i = 0; i < 20; ++i) {
    const auto p = random_dist(2 + i % 6);
    near(divergence(p, p, DivergenceKind::kKl), 0.0, kMetricTol, "KL(P,P)");
  }
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 8;
    auto p = random_dist(n), q = random_dist(n);
    if (i % 4 == 0) p[rng() % n] = 0.0;  // sparse supports included
    double s = 0;
    for (double x : p) s += x;
    for (auto& x : p) x /= s;
    worst = std::max(worst, std::abs(divergence(p, q, DivergenceKind::kJs) -
                                     divergence(q, p, DivergenceKind::kJs)));
  }
  v.expect(worst <= kJsSymmetryTol, "JS asymmetry " + num(worst));

  const std::map<ItemId, double> rel{{"x", 3.0}, {"y", 2.0}, {"z", 1.0}};
  near(ndcg_at_k(Ranking{"x", "y", "z"}, rel, 3), 1.0, kMetricTol, "nDCG(ideal)");
  near(ndcg_at_k(Ranking{"a", "b"}, {{"a", 0.0}, {"b", 1.0}}, 2), 0.6309297536, kMetricTol,
       "nDCG((0,1), k=2)");

  Catalog c;
  c.add({"old", "p", {}, 0.2, 0.5, {}, ""});
  c.add({"new", "p", {}, 0.3, 0.5, {}, ""});
  near(poplift(Ranking{"old"}, Ranking{"new"}, c), 0.5, kMetricTol, "PopLift(0.2 -> 0.3)");
  near(l_half_balance(std::vector<double>{0.5, 0.5}), 2.0, kMetricTol, "l_half([0.5,0.5])");
  if (v.pass) v.detail = "all identities within 1e-9; max JS asymmetry " + num(worst);
  return v;
}

// --- 6 ---------------------------------------------------------------------

Verdict activation_schedule() {
  Verdict v;
  AgentSpec watched;
  watched.agent_id = "watched";
  AgentSpec other = watched;
  other.agent_id = "other";
  const std::vector<AgentSpec> specs{watched, other};
  ActivationPolicy policy;
  policy.mode = ActivationPolicy::Mode::kDynamic;
  policy.window = 3;
  policy.fairness_threshold = 0.1;
  const std::vector<double> regrets{0, 0, 0, 0.5, 0, 0};
  const std::vector<std::string> expected{"active", "active", "active", "skipped", "active", "active"};
  std::vector<std::string> got;
  FairnessLedger ledger;
  Query q;
  q.id = "q";
  for (double r : regrets) {
    const auto sel = select_agents(q, specs, ledger, policy);
    got.push_back(sel.skipped.count("watched") ? "skipped" : "active");
    ledger.record("watched", r, policy.window);
    ledger.record("other", 1.0, policy.window);
  }
  std::string seq;
  for (const auto& s : got) seq += (seq.empty() ? "" : ",") + s;
  v.expect(got == expected, "sequence " + seq);
  if (v.pass) v.detail = "[" + seq + "]";
  return v;
}

// --- 7 ---------------------------------------------------------------------

Verdict grounding_end_to_end() {
  Verdict v;
  unsetenv(kAdapterUrlEnv);
  auto loaded = materialize(load_scenario(kData / "tourism.json"));
  AgentSpec ext;
  ext.agent_id = "external";
  ext.role = StakeholderRole::kThirdParty;
  ext.objective = Objective::kExternal;
  ext.params["inject_ghosts"] = 1.0;
  auto specs = loaded.scenario.agents;
  specs.push_back(ext);
  Orchestrator orch(loaded.catalog, specs, loaded.scenario.policy, loaded.scenario.rule_config);
  for (std::size_t i = 0; i < loaded.queries.size(); ++i) {
    const auto& q = loaded.queries[i];
    const auto out = orch.process(q);
    for (const auto& id : out.final_list) {
      v.expect(loaded.catalog.contains(id), q.id + " final list holds " + id);
    }
    v.expect(out.violations.count("external") && out.violations.at("external") == 1,
             q.id + ": expected exactly one violation");
    if (i == 0) {
      const int k = 2 * q.top_n;
      const double want = 1.0 * (1.0 - 0.5 * (1.0 / k));
      const double weight = orch.state().agents.at("external").reliability_weight;
      v.expect(weight == want, "weight after query 1 is " + num(weight) + ", expected " + num(want));
      if (v.pass) v.detail = "weight after query 1 = " + num(weight) + " (k=" + std::to_string(k) + ")";
    }
  }
  if (v.pass) v.detail += "; no ghost id in " + std::to_string(loaded.queries.size()) + " final lists";
  return v;
}

// --- 8 ---------------------------------------------------------------------

Verdict cli_determinism() {
  Verdict v;
  unsetenv(kAdapterUrlEnv);
  const auto dir = fs::temp_directory_path() / "fair_agents_acceptance";
  fs::create_directories(dir);
  const std::string scenario = (kData / "tourism.json").string();
  auto files = [](const fs::path& prefix) {
    const std::string p = prefix.string();
    return slurp(p + ".report.json") + "\x1e" + slurp(p + ".metrics.csv") + "\x1e" +
           slurp(p + ".summary.md");
  };
  for (const char* cmd : {"run", "compare"}) {
    const auto a = dir / (std::string(cmd) + "_a");
    const auto b = dir / (std::string(cmd) + "_b");
    v.expect(cli({cmd, "--scenario", scenario, "--out", a.string(), "--seed", "42"}) == kExitOk,
             std::string(cmd) + " failed");
    v.expect(cli({cmd, "--scenario", scenario, "--out", b.string(), "--seed", "42", "--parallel-agents"}) ==
                 kExitOk,
             std::string(cmd) + " --parallel-agents failed");
    const auto fa = files(a);
    v.expect(fa.size() > 10 && fa == files(b), std::string(cmd) + " outputs differ");
  }
  if (v.pass) v.detail = "run and compare outputs byte-identical, sequential vs parallel";
  return v;
}

// --- 9 ---------------------------------------------------------------------

Verdict influence_sanity() {
  Verdict v;
  std::mt19937_64 rng(kSeed + 9);
  for (int t = 0; t < 100; ++t) {
    const int m = 2 + static_cast<int>(rng() % 5);
    Ranking shared = oracle::item_labels(m);
    std::shuffle(shared.begin(), shared.end(), rng);
    shared.resize(1 + rng() % m);
    std::vector<Ballot> ballots;
    const int n = 2 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      ballots.push_back({"a" + std::to_string(i), shared, std::nullopt, oracle::grid_weight(rng)});
    }
    for (Rule rule : kAllRules) {
      for (const auto& [agent, x] : run(rule, ballots).influence) {
        v.expect(x == 0.0, std::string(to_string(rule)) + " identical ballots: " + agent + " = " + num(x));
      }
    }
  }
  const std::vector<Ballot> opposite{{"X", {"A", "B"}, std::nullopt, 1.0},
                                     {"Y", {"B", "A"}, std::nullopt, 1.0}};
  const auto r = run(Rule::kBorda, opposite);
  v.expect(r.influence.at("X") == 1.0 && r.influence.at("Y") == 0.0,
           "opposite ballots: X=" + num(r.influence.at("X")) + " Y=" + num(r.influence.at("Y")));
  if (v.pass) v.detail = "identical ballots give 0 (100 profiles x 4 rules); opposite Borda pair gives X=1, Y=0";
  return v;
}

// --- 10 --------------------------------------------------------------------

Verdict performance() {
  Verdict v;
  unsetenv(kAdapterUrlEnv);
  const auto dir = fs::temp_directory_path() / "fair_agents_acceptance";
  fs::create_directories(dir);
  const std::string scenario = (kData / "synthetic_tourism.json").string();
  const auto loaded = materialize(load_scenario(scenario));
  v.expect(loaded.catalog.size() == 200 && loaded.queries.size() == 100 &&
               loaded.scenario.agents.size() == 3 && loaded.scenario.rule_config.rule == Rule::kBorda,
           "synthetic scenario shape");

  auto t = std::chrono::steady_clock::now();
  v.expect(cli({"run", "--scenario", scenario, "--out", (dir / "perf_run").string()}) == kExitOk, "run failed");
  const double run_s = seconds_since(t);
  t = std::chrono::steady_clock::now();
  v.expect(cli({"compare", "--scenario", scenario, "--out", (dir / "perf_compare").string()}) == kExitOk,
           "compare failed");
  const double compare_s = seconds_since(t);
  v.expect(run_s < kRunLimitS, "run took " + num(run_s) + " s");
  v.expect(compare_s < kCompareLimitS, "compare took " + num(compare_s) + " s");
  if (v.pass) v.detail = "run " + num(run_s) + " s, compare " + num(compare_s) + " s";
  return v;
}

// --- 11 --------------------------------------------------------------------

EvaluationReport borda_report(const fs::path& scenario) {
  const auto loaded = materialize(load_scenario(scenario));
  OrchestratorOptions options;
  options.reliability = loaded.scenario.reliability;
  options.candidate_multiplier = loaded.scenario.candidate_multiplier;
  RuleConfig config = loaded.scenario.rule_config;
  config.rule = Rule::kBorda;
  Orchestrator orch(loaded.catalog, loaded.scenario.agents, loaded.scenario.policy, config, options);
  std::vector<QueryOutcome> outcomes;
  for (const auto& q : loaded.queries) outcomes.push_back(orch.process(q));
  return build_report(outcomes, loaded.scenario.agents, loaded.catalog);
}

Verdict directional_check() {
  Verdict v;
  unsetenv(kAdapterUrlEnv);
  const auto full = borda_report(kData / "synthetic_tourism.json");
  const auto solo = borda_report(kData / "synthetic_tourism_relevance_only.json");
  v.expect(full.mean_final_popularity < solo.mean_final_popularity,
           "mean popularity " + num(full.mean_final_popularity) + " vs " + num(solo.mean_final_popularity));
  v.expect(full.cumulative_exposure_gini < solo.cumulative_exposure_gini,
           "exposure Gini " + num(full.cumulative_exposure_gini) + " vs " + num(solo.cumulative_exposure_gini));
  if (v.pass) {
    v.detail = "mean popularity " + num(full.mean_final_popularity) + " < " + num(solo.mean_final_popularity) +
               ", Gini " + num(full.cumulative_exposure_gini) + " < " + num(solo.cumulative_exposure_gini);
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"voting-rule oracle equivalence", oracle_equivalence},
      {"Kemeny optimality", kemeny_optimality},
      {"Condorcet consistency", condorcet_consistency},
      {"axiom suite", axiom_suite},
      {"metric identities", metric_identities},
      {"activation state machine", activation_schedule},
      {"grounding end-to-end", grounding_end_to_end},
      {"CLI determinism", cli_determinism},
      {"influence sanity", influence_sanity},
      {"desk-scale performance", performance},
      {"directional framework check", directional_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
