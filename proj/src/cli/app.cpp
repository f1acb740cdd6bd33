#include "fair_agents/cli/app.hpp"

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/evaluation/report.hpp"
#include "fair_agents/io/outcomes_io.hpp"
#include "fair_agents/io/report_writer.hpp"
#include "fair_agents/io/scenario.hpp"
#include "fair_agents/orchestrator/orchestrator.hpp"

namespace fair_agents {

namespace {

struct Invocation {
  std::string scenario_path;
  std::string output_prefix;
  std::string rule = "";
  std::optional<std::uint64_t> seed;
  std::string save_outcomes;
  std::string outcomes_path;
  bool parallel_agents = false;
  std::string adapter_url;
};

// Errors that map to exit code 2.
struct InputError : Error {
  using Error::Error;
};

LoadedScenario load(const Invocation& inv, std::optional<std::uint64_t> seed) {
  try {
    Scenario scenario = load_scenario(inv.scenario_path);
    if (seed) scenario.seed = *seed;
    return materialize(std::move(scenario));
  } catch (const Error& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
}

std::vector<Rule> rules_for(const Invocation& inv, bool compare, Rule scenario_rule) {
  if (inv.rule.empty()) {
    if (compare) return {std::begin(kAllRules), std::end(kAllRules)};
    return {scenario_rule};
  }
  if (inv.rule == "all") return {std::begin(kAllRules), std::end(kAllRules)};
  auto rule = parse_rule(inv.rule);
  if (!rule) throw InputError("unknown rule '" + inv.rule + "'");
  return {*rule};
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out.empty() ? "-" : out;
}

OutcomeRun run_stream(const LoadedScenario& loaded, Rule rule, const Invocation& inv,
                      std::ostream& err) {
  const Scenario& s = loaded.scenario;
  RuleConfig config = s.rule_config;
  config.rule = rule;
  config.seed = s.seed;
  OrchestratorOptions options;
  options.reliability = s.reliability;
  options.candidate_multiplier = s.candidate_multiplier;
  options.parallel_agents = inv.parallel_agents;
  if (!inv.adapter_url.empty()) options.adapter_url = inv.adapter_url;

  // A fresh orchestrator per rule: no ledger state crosses runs.
  Orchestrator orchestrator(loaded.catalog, s.agents, s.policy, config, options);
  OutcomeRun run;
  run.rule = std::string(to_string(rule));
  for (const auto& query : loaded.queries) {
    const auto start = std::chrono::steady_clock::now();
    QueryOutcome outcome = orchestrator.process(query);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::vector<std::string> skipped;
    for (const auto& [agent, _] : outcome.skipped_agents) skipped.push_back(agent);
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", wall_ms);
    err << "query=" << query.id << " rule=" << outcome.aggregate.label()
        << " active=" << join(outcome.active_agents) << " skipped=" << join(skipped)
        << " wall_ms=" << wall << "\n";
    run.outcomes.push_back(std::move(outcome));
  }
  return run;
}

void print_summary(std::ostream& out, const ReportMeta& meta,
                   const std::vector<EvaluationReport>& reports, const ReportPaths& paths) {
  out << meta.scenario << ": " << reports.front().per_query.size() << " queries, seed " << meta.seed
      << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %10s %10s %14s %10s %16s\n", "rule", "ndcg", "recall",
                "gini_exposure", "poplift", "fairness_regret");
  out << line;
  auto mean = [](const EvaluationReport& r, MetricId m) {
    auto it = r.aggregate.find(m);
    return it == r.aggregate.end() ? std::string("n/a") : fixed6(it->second.mean);
  };
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-14s %10s %10s %14s %10s %16s\n", r.rule.c_str(),
                  mean(r, MetricId::kNdcg).c_str(), mean(r, MetricId::kRecall).c_str(),
                  mean(r, MetricId::kGiniExposure).c_str(), mean(r, MetricId::kPopLift).c_str(),
                  mean(r, MetricId::kFairnessRegret).c_str());
    out << line;
  }
  out << "wrote " << paths.json.string() << ", " << paths.csv.string() << ", "
      << paths.markdown.string() << "\n";
}

ReportPaths write_outputs(const ReportMeta& meta, const std::vector<EvaluationReport>& reports,
                          const std::string& prefix) {
  return write_report(meta, reports, prefix);
}

int cmd_run(const Invocation& inv, bool compare, std::ostream& out, std::ostream& err) {
  const LoadedScenario loaded = load(inv, inv.seed);
  if (loaded.dropped_interactions > 0) {
    err << "warning: dropped " << loaded.dropped_interactions
        << " interaction rows naming unknown items\n";
  }
  const auto rules = rules_for(inv, compare, loaded.scenario.rule_config.rule);
  if (!compare && rules.size() != 1) throw InputError("run takes a single rule; use compare for all");

  SavedOutcomes saved;
  saved.scenario = loaded.scenario.name;
  saved.seed = loaded.scenario.seed;
  saved.catalog_hash = loaded.catalog.content_hash();
  saved.agents = loaded.scenario.agents;

  std::vector<EvaluationReport> reports;
  for (Rule rule : rules) {
    OutcomeRun run = run_stream(loaded, rule, inv, err);
    reports.push_back(build_report(run.outcomes, saved.agents, loaded.catalog));
    saved.runs.push_back(std::move(run));
  }

  const ReportMeta meta{saved.scenario, saved.seed, saved.catalog_hash};
  const ReportPaths paths = write_outputs(meta, reports, inv.output_prefix);
  if (!inv.save_outcomes.empty()) save_outcomes(saved, inv.save_outcomes);
  print_summary(out, meta, reports, paths);
  return kExitOk;
}

int cmd_evaluate(const Invocation& inv, std::ostream& out) {
  SavedOutcomes saved;
  try {
    saved = load_outcomes(inv.outcomes_path);
  } catch (const Error& e) {
    throw InputError(std::string("outcomes: ") + e.what());
  }
  // Synthetic catalogs depend on the seed, so rebuild with the recorded one.
  const LoadedScenario loaded = load(inv, saved.seed);
  const std::string hash = loaded.catalog.content_hash();
  if (hash != saved.catalog_hash) {
    throw InputError("catalog hash mismatch: outcomes were produced against catalog " +
                     saved.catalog_hash + " but the scenario's catalog hashes to " + hash);
  }
  std::vector<EvaluationReport> reports;
  for (const auto& run : saved.runs) {
    reports.push_back(build_report(run.outcomes, saved.agents, loaded.catalog));
  }
  const ReportMeta meta{saved.scenario, saved.seed, saved.catalog_hash};
  const ReportPaths paths = write_outputs(meta, reports, inv.output_prefix);
  print_summary(out, meta, reports, paths);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multistakeholder recommendation via agent ballots and social choice"};
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool rule_flag) {
    cmd->add_option("--scenario", inv.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", inv.output_prefix, "Prefix for the report files")->required();
    if (rule_flag) cmd->add_option("--rule", inv.rule, "borda, copeland, ranked-pairs, kemeny or all");
  };
  CLI::App* run = app.add_subcommand("run", "Process the scenario's query stream with one rule");
  CLI::App* compare = app.add_subcommand("compare", "Process the query stream once per rule");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Rebuild the report from saved outcomes");
  for (CLI::App* cmd : {run, compare}) {
    add_common(cmd, true);
    cmd->add_option("--seed", seed, "Override the scenario seed");
    cmd->add_option("--save-outcomes", inv.save_outcomes, "Also write per-query outcomes here");
    cmd->add_flag("--parallel-agents", inv.parallel_agents, "Generate ballots concurrently");
    cmd->add_option("--adapter-url", inv.adapter_url,
                    "Adapter endpoint for external agents (overrides FAIR_AGENTS_ADAPTER_URL)");
  }
  add_common(evaluate, false);
  evaluate->add_option("--outcomes", inv.outcomes_path, "File written by --save-outcomes")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitInvalidInput;
  }
  if (run->parsed() || compare->parsed()) {
    CLI::App* cmd = run->parsed() ? run : compare;
    if (cmd->count("--seed") > 0) inv.seed = seed;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(inv, out);
    return cmd_run(inv, compare->parsed(), out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const NoActiveAgents& e) {
    err << "error: no active agents: " << e.what() << "\n";
    return kExitNoActiveAgents;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace fair_agents
