#include "fair_agents/io/report_writer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/io/csv.hpp"

namespace fair_agents {

using ojson = nlohmann::ordered_json;

namespace {

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

ojson summary_json(const MetricSummary& s) {
  ojson j = ojson::object();
  j["mean"] = round6(s.mean);
  j["min"] = round6(s.min);
  j["max"] = round6(s.max);
  j["count"] = s.count;
  return j;
}

ojson counters_json(const StageCounters& c) {
  ojson j = ojson::object();
  j["generation_calls"] = c.generation_calls;
  j["adapter_calls"] = c.adapter_calls;
  j["grounding_calls"] = c.grounding_calls;
  j["aggregation_runs"] = c.aggregation_runs;
  j["evaluation_calls"] = c.evaluation_calls;
  return j;
}

ojson number_map(const std::map<std::string, double>& m) {
  ojson j = ojson::object();
  for (const auto& [k, v] : m) j[k] = round6(v);
  return j;
}

// Per-query metrics shown in tables; system-level ones come last.
std::vector<MetricId> metric_columns() {
  return {std::begin(kAllMetrics), std::end(kAllMetrics)};
}

std::vector<std::string> all_agents(std::span<const EvaluationReport> runs) {
  std::set<std::string> agents;
  for (const auto& run : runs) {
    for (const auto& [agent, _] : run.drift) agents.insert(agent);
    for (const auto& q : run.per_query) {
      for (const auto& [agent, _] : q.influence) agents.insert(agent);
    }
  }
  return {agents.begin(), agents.end()};
}

void check_runs(std::span<const EvaluationReport> runs) {
  if (runs.empty()) throw InvalidArgument("write_report: no runs");
  for (const auto& run : runs) {
    if (run.per_query.empty()) throw InvalidArgument("write_report: run '" + run.rule + "' has no queries");
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

ReportPaths report_paths(const std::filesystem::path& prefix) {
  const std::string p = prefix.string();
  return {p + ".report.json", p + ".metrics.csv", p + ".summary.md"};
}

std::string render_report_json(const ReportMeta& meta, std::span<const EvaluationReport> runs) {
  ojson doc = ojson::object();
  doc["format"] = "fair-agents-report/1";
  doc["scenario"] = meta.scenario;
  doc["seed"] = meta.seed;
  doc["catalog_hash"] = meta.catalog_hash;
  ojson out_runs = ojson::array();
  for (const auto& run : runs) {
    ojson r = ojson::object();
    r["rule"] = run.rule;
    r["queries"] = run.per_query.size();
    ojson aggregate = ojson::object();
    for (const auto& [metric, summary] : run.aggregate) {
      aggregate[std::string(to_string(metric))] = summary_json(summary);
    }
    r["aggregate"] = std::move(aggregate);
    r["mean_final_popularity"] = round6(run.mean_final_popularity);
    r["cumulative_exposure_gini"] = round6(run.cumulative_exposure_gini);
    ojson influence = ojson::object();
    for (const auto& [agent, summary] : run.influence) influence[agent] = summary_json(summary);
    r["influence"] = std::move(influence);
    ojson drift = ojson::object();
    for (const auto& [agent, series] : run.drift) {
      ojson values = ojson::array();
      for (const auto& v : series) values.push_back(v ? ojson(round6(*v)) : ojson(nullptr));
      drift[agent] = std::move(values);
    }
    r["drift"] = std::move(drift);
    r["runtime"] = counters_json(run.runtime);

    ojson per_query = ojson::array();
    for (const auto& q : run.per_query) {
      ojson e = ojson::object();
      e["query_id"] = q.query_id;
      e["final_list"] = q.final_list;
      ojson metrics = ojson::object();
      for (const auto& [metric, value] : q.metrics) metrics[std::string(to_string(metric))] = round6(value);
      e["metrics"] = std::move(metrics);
      e["regret"] = number_map(q.regret);
      e["influence"] = number_map(q.influence);
      e["active_agents"] = q.active_agents;
      ojson skipped = ojson::object();
      for (const auto& [agent, reason] : q.skipped_agents) skipped[agent] = reason;
      e["skipped_agents"] = std::move(skipped);
      per_query.push_back(std::move(e));
    }
    r["per_query"] = std::move(per_query);
    out_runs.push_back(std::move(r));
  }
  doc["runs"] = std::move(out_runs);
  return doc.dump(2) + "\n";
}

std::string render_metrics_csv(std::span<const EvaluationReport> runs) {
  const auto metrics = metric_columns();
  const auto agents = all_agents(runs);
  std::vector<std::string> header = {"rule", "query_index", "query_id"};
  for (MetricId m : metrics) header.emplace_back(to_string(m));
  for (const auto& a : agents) header.push_back("regret:" + a);
  for (const auto& a : agents) header.push_back("influence:" + a);
  for (auto& h : header) h = csv::escape(h);
  std::string out = join(header, ",") + "\n";

  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.per_query.size(); ++i) {
      const auto& q = run.per_query[i];
      std::vector<std::string> row = {csv::escape(run.rule), std::to_string(i), csv::escape(q.query_id)};
      for (MetricId m : metrics) {
        auto it = q.metrics.find(m);
        row.push_back(it == q.metrics.end() ? "" : fixed6(it->second));
      }
      for (const auto& a : agents) {
        auto it = q.regret.find(a);
        row.push_back(it == q.regret.end() ? "" : fixed6(it->second));
      }
      for (const auto& a : agents) {
        auto it = q.influence.find(a);
        row.push_back(it == q.influence.end() ? "" : fixed6(it->second));
      }
      out += join(row, ",") + "\n";
    }
  }
  return out;
}

std::string render_summary_md(const ReportMeta& meta, std::span<const EvaluationReport> runs) {
  const auto metrics = metric_columns();
  const auto agents = all_agents(runs);
  std::string md;
  md += "# Report: " + meta.scenario + "\n\n";
  md += "- seed: " + std::to_string(meta.seed) + "\n";
  md += "- catalog hash: " + meta.catalog_hash + "\n";
  md += "- queries: " + std::to_string(runs.empty() ? 0 : runs.front().per_query.size()) + "\n";
  md += "- rules: " + std::to_string(runs.size()) + "\n\n";

  md += "## Fairness and accuracy by rule\n\n";
  md += "Mean per-query values. Cumulative Gini is taken over provider exposure for the whole stream.\n\n";
  std::vector<std::string> head = {"rule"};
  for (MetricId m : metrics) head.emplace_back(to_string(m));
  head.emplace_back("cumulative_gini");
  head.emplace_back("mean_popularity");
  md += "| " + join(head, " | ") + " |\n";
  md += "|";
  for (std::size_t i = 0; i < head.size(); ++i) md += (i == 0 ? "---|" : "---:|");
  md += "\n";
  for (const auto& run : runs) {
    std::vector<std::string> row = {run.rule};
    for (MetricId m : metrics) {
      auto it = run.aggregate.find(m);
      row.push_back(it == run.aggregate.end() ? "n/a" : fixed6(it->second.mean));
    }
    row.push_back(fixed6(run.cumulative_exposure_gini));
    row.push_back(fixed6(run.mean_final_popularity));
    md += "| " + join(row, " | ") + " |\n";
  }
  md += "\n";

  for (const auto& run : runs) {
    md += "## Rule: " + run.rule + "\n\n";
    md += "### Metrics\n\n| metric | mean | min | max | count |\n|---|---:|---:|---:|---:|\n";
    for (MetricId m : metrics) {
      auto it = run.aggregate.find(m);
      if (it == run.aggregate.end()) {
        md += "| " + std::string(to_string(m)) + " | n/a | n/a | n/a | 0 |\n";
        continue;
      }
      const auto& s = it->second;
      md += "| " + std::string(to_string(m)) + " | " + fixed6(s.mean) + " | " + fixed6(s.min) +
            " | " + fixed6(s.max) + " | " + std::to_string(s.count) + " |\n";
    }
    md += "\n### Influence (leave-one-out)\n\n| agent | mean | min | max | queries |\n|---|---:|---:|---:|---:|\n";
    for (const auto& [agent, s] : run.influence) {
      md += "| " + agent + " | " + fixed6(s.mean) + " | " + fixed6(s.min) + " | " + fixed6(s.max) +
            " | " + std::to_string(s.count) + " |\n";
    }
    md += "\n### Regret drift\n\n";
    std::vector<std::string> dhead = {"query"};
    for (const auto& [agent, _] : run.drift) dhead.push_back(agent);
    md += "| " + join(dhead, " | ") + " |\n|---|";
    for (std::size_t i = 1; i < dhead.size(); ++i) md += "---:|";
    md += "\n";
    for (std::size_t q = 0; q < run.per_query.size(); ++q) {
      std::vector<std::string> row = {run.per_query[q].query_id};
      for (const auto& [agent, series] : run.drift) {
        row.push_back(q < series.size() && series[q] ? fixed6(*series[q]) : "n/a");
      }
      md += "| " + join(row, " | ") + " |\n";
    }
    md += "\n### Activity\n\n";
    for (const auto& agent : agents) {
      std::size_t active = 0;
      for (const auto& q : run.per_query) {
        for (const auto& a : q.active_agents) active += a == agent;
      }
      md += "- " + agent + ": active on " + std::to_string(active) + " of " +
            std::to_string(run.per_query.size()) + " queries\n";
    }
    const auto& c = run.runtime;
    md += "\nStage calls: generation " + std::to_string(c.generation_calls) + ", adapter " +
          std::to_string(c.adapter_calls) + ", grounding " + std::to_string(c.grounding_calls) +
          ", aggregation " + std::to_string(c.aggregation_runs) + ", evaluation " +
          std::to_string(c.evaluation_calls) + ".\n\n";
  }
  return md;
}

ReportPaths write_report(const ReportMeta& meta, std::span<const EvaluationReport> runs,
                         const std::filesystem::path& prefix) {
  check_runs(runs);
  const ReportPaths paths = report_paths(prefix);
  write_file(paths.json, render_report_json(meta, runs));
  write_file(paths.csv, render_metrics_csv(runs));
  write_file(paths.markdown, render_summary_md(meta, runs));
  return paths;
}

}  // namespace fair_agents
