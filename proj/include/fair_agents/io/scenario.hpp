#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fair_agents/agents/agents.hpp"
#include "fair_agents/aggregation/aggregation.hpp"
#include "fair_agents/io/catalog_io.hpp"
#include "fair_agents/io/synthetic.hpp"
#include "fair_agents/orchestrator/orchestrator.hpp"

namespace fair_agents {

struct CatalogSource {
  // Resolved against the scenario file's directory. Empty for synthetic.
  std::filesystem::path path;
  CatalogFormat format = CatalogFormat::kCsv;
  std::optional<SyntheticCatalogParams> synthetic;

  bool is_synthetic() const { return synthetic.has_value(); }
};

struct QuerySpec {
  Query query;
  // When set, user_history is filled from the interaction log (unless the
  // query lists one explicitly).
  std::optional<std::string> user;
};

struct Scenario {
  std::string name;
  CatalogSource catalog;
  std::optional<std::filesystem::path> interactions;
  std::vector<AgentSpec> agents;
  ActivationPolicy policy;
  RuleConfig rule_config;
  ReliabilityConfig reliability;
  int candidate_multiplier = 2;
  std::vector<QuerySpec> queries;
  std::vector<PersonaParams> personas;
  std::uint64_t seed = 0;
};

// Parses and validates a scenario document. Relative paths resolve against
// `base_dir`. Throws SchemaError (with a field path such as
// "agents[1].objective_metric"), UnknownMetricId, UnknownRule.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

// A scenario with its catalog and query stream materialized.
struct LoadedScenario {
  Scenario scenario;
  Catalog catalog;
  std::vector<Query> queries;
  std::size_t dropped_interactions = 0;
};

// Builds the catalog (from file, or synthetic from the seed), resolves user
// histories and expands personas. The seed also becomes the rule seed.
// Throws SchemaError when a user_history id is not in the catalog, plus
// whatever the catalog/interaction loaders throw.
LoadedScenario materialize(Scenario scenario);

}  // namespace fair_agents
