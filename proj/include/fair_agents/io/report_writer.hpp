#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "fair_agents/evaluation/report.hpp"

namespace fair_agents {

struct ReportMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string catalog_hash;
};

struct ReportPaths {
  std::filesystem::path json;     // PREFIX.report.json
  std::filesystem::path csv;      // PREFIX.metrics.csv
  std::filesystem::path markdown; // PREFIX.summary.md
};

ReportPaths report_paths(const std::filesystem::path& prefix);

// Every real is written with 6 decimals (rounded in JSON, "%.6f" in CSV and
// markdown) and keys appear in a fixed order, so identical runs give
// identical bytes. Each run is one rule's report over the same query stream.
std::string render_report_json(const ReportMeta& meta, std::span<const EvaluationReport> runs);
std::string render_metrics_csv(std::span<const EvaluationReport> runs);
std::string render_summary_md(const ReportMeta& meta, std::span<const EvaluationReport> runs);

// Writes all three files. Throws InvalidArgument for no runs or a run without
// queries, IoError when a file cannot be written.
ReportPaths write_report(const ReportMeta& meta, std::span<const EvaluationReport> runs,
                         const std::filesystem::path& prefix);

// "%.6f" with negative zero printed as zero.
std::string fixed6(double value);

}  // namespace fair_agents
