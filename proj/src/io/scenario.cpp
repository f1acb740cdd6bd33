#include "fair_agents/io/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

using nlohmann::json;

namespace {

// A JSON value plus the dotted path that led to it, for error messages.
struct Node {
  const json& value;
  std::string path;

  Node field(const std::string& key) const {
    const std::string at = path.empty() ? key : path + "." + key;
    if (!value.is_object()) fail("expected an object");
    auto it = value.find(key);
    if (it == value.end()) throw SchemaError(at, "required field is missing");
    return {*it, at};
  }
  Node element(std::size_t i) const {
    return {value.at(i), path + "[" + std::to_string(i) + "]"};
  }
  bool has(const std::string& key) const { return value.is_object() && value.contains(key); }

  [[noreturn]] void fail(const std::string& what) const {
    throw SchemaError(path.empty() ? "<root>" : path, what);
  }

  void expect_object() const {
    if (!value.is_object()) fail("expected an object");
  }
  void expect_array() const {
    if (!value.is_array()) fail("expected an array");
  }
  void only_keys(std::initializer_list<std::string_view> allowed) const {
    expect_object();
    for (const auto& [key, _] : value.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) field(key).fail("unknown field");
    }
  }

  std::string str() const {
    if (!value.is_string()) fail("expected a string");
    return value.get<std::string>();
  }
  double number() const {
    if (!value.is_number()) fail("expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double number_in(double lo, double hi) const {
    const double v = number();
    if (v < lo || v > hi) {
      std::ostringstream os;
      os << "value " << v << " outside [" << lo << ", " << hi << "]";
      fail(os.str());
    }
    return v;
  }
  long long integer(long long lo, long long hi = std::numeric_limits<long long>::max()) const {
    if (!value.is_number_integer()) fail("expected an integer");
    if (value.is_number_unsigned() &&
        value.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      fail("integer out of range");
    }
    const long long v = value.get<long long>();
    if (v < lo || v > hi) fail("integer out of range");
    return v;
  }
  bool boolean() const {
    if (!value.is_boolean()) fail("expected true or false");
    return value.get<bool>();
  }
  std::uint64_t seed() const {
    if (!value.is_number_integer()) fail("expected a non-negative integer");
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    const auto v = value.get<long long>();
    if (v < 0) fail("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  std::vector<std::string> strings() const {
    expect_array();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(element(i).str());
    return out;
  }
  std::map<std::string, double> weights() const {
    expect_object();
    std::map<std::string, double> out;
    for (const auto& [key, _] : value.items()) {
      out.emplace(key, field(key).number_in(0.0, std::numeric_limits<double>::max()));
    }
    return out;
  }
};

Constraint parse_constraint(const Node& n) {
  n.only_keys({"attribute", "op", "value"});
  Constraint c;
  c.attribute = n.field("attribute").str();
  if (c.attribute.empty()) n.field("attribute").fail("must not be empty");
  const Node op = n.field("op");
  auto dir = parse_direction(op.str());
  if (!dir) op.fail("expected \"<=\" or \">=\"");
  c.direction = *dir;
  c.value = n.field("value").number();
  return c;
}

std::vector<Constraint> parse_constraints(const Node& n) {
  n.expect_array();
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < n.value.size(); ++i) out.push_back(parse_constraint(n.element(i)));
  return out;
}

MetricId default_metric(Objective objective) {
  switch (objective) {
    case Objective::kProviderExposure:
      return MetricId::kGiniExposure;
    case Objective::kPopularityMitigation:
      return MetricId::kPopLift;
    case Objective::kRelevance:
    case Objective::kExternal:
      break;
  }
  return MetricId::kNdcg;
}

double ideal_target(MetricId metric) {
  return metric_info(metric).direction == MetricDirection::kHigherIsBetter ? 1.0 : 0.0;
}

AgentSpec parse_agent(const Node& n) {
  n.only_keys({"id", "role", "objective", "objective_metric", "objective_target",
               "compatibility_tags", "params"});
  AgentSpec spec;
  spec.agent_id = n.field("id").str();
  if (spec.agent_id.empty()) n.field("id").fail("must not be empty");

  const Node role = n.field("role");
  auto r = parse_role(role.str());
  if (!r) role.fail("expected one of user, provider, third_party");
  spec.role = *r;

  const Node objective = n.field("objective");
  auto o = parse_objective(objective.str());
  if (!o) {
    objective.fail("expected one of relevance, provider_exposure, popularity_mitigation, external");
  }
  spec.objective = *o;

  spec.objective_metric = default_metric(spec.objective);
  if (n.has("objective_metric")) {
    const Node m = n.field("objective_metric");
    const std::string name = m.str();
    auto id = parse_metric(name);
    if (!id) throw UnknownMetricId(m.path, name);
    spec.objective_metric = *id;
  }
  const MetricInfo& info = metric_info(spec.objective_metric);
  if (info.direction == MetricDirection::kNone) {
    n.field("objective_metric").fail("metric '" + std::string(info.name) +
                                     "' has no direction and cannot be an agent objective");
  }
  spec.objective_target = ideal_target(spec.objective_metric);
  if (n.has("objective_target")) {
    // PopLift targets are compared by magnitude; the codomain still bounds them.
    spec.objective_target = n.field("objective_target").number_in(info.lower, info.upper);
  }

  if (n.has("compatibility_tags")) {
    for (auto& tag : n.field("compatibility_tags").strings()) spec.compatibility_tags.insert(tag);
  }
  if (n.has("params")) {
    const Node params = n.field("params");
    params.expect_object();
    for (const auto& [key, v] : params.value.items()) {
      const Node p = params.field(key);
      if (v.is_string()) {
        spec.params.emplace(key, v.get<std::string>());
      } else if (v.is_number()) {
        spec.params.emplace(key, p.number());
      } else {
        p.fail("parameter values must be strings or numbers");
      }
    }
  }
  if (auto ghosts = spec.number_param("inject_ghosts"); ghosts && *ghosts < 0) {
    n.field("params").field("inject_ghosts").fail("must be >= 0");
  }
  if (auto t = spec.number_param("timeout_ms"); t && *t <= 0) {
    n.field("params").field("timeout_ms").fail("must be positive");
  }
  return spec;
}

ActivationPolicy parse_policy(const Node& n) {
  n.only_keys({"mode", "fairness_threshold", "window", "compatibility_min"});
  ActivationPolicy policy;
  if (n.has("mode")) {
    const Node mode = n.field("mode");
    const std::string m = mode.str();
    if (m == "static") {
      policy.mode = ActivationPolicy::Mode::kStatic;
    } else if (m == "dynamic") {
      policy.mode = ActivationPolicy::Mode::kDynamic;
    } else {
      mode.fail("expected \"static\" or \"dynamic\"");
    }
  }
  if (n.has("fairness_threshold")) {
    policy.fairness_threshold =
        n.field("fairness_threshold").number_in(0.0, std::numeric_limits<double>::max());
  }
  if (n.has("window")) policy.window = static_cast<int>(n.field("window").integer(1, 1'000'000));
  if (n.has("compatibility_min")) {
    policy.compatibility_min = n.field("compatibility_min").number_in(0.0, 1.0);
  }
  return policy;
}

// The exact Kemeny search keeps a table of 2^m entries.
constexpr int kMaxKemenyExactLimit = 20;

RuleConfig parse_rule_config(const Node& n) {
  RuleConfig config;
  auto set_rule = [&](const Node& name_node) {
    const std::string name = name_node.str();
    auto rule = parse_rule(name);
    if (!rule) throw UnknownRule(name_node.path, name);
    config.rule = *rule;
  };
  if (n.value.is_string()) {
    set_rule(n);
    return config;
  }
  n.only_keys({"name", "use_weights", "kemeny_exact_limit", "kemeny_search_iters"});
  set_rule(n.field("name"));
  if (n.has("use_weights")) config.use_weights = n.field("use_weights").boolean();
  if (n.has("kemeny_exact_limit")) {
    config.kemeny_exact_limit =
        static_cast<int>(n.field("kemeny_exact_limit").integer(1, kMaxKemenyExactLimit));
  }
  if (n.has("kemeny_search_iters")) {
    config.kemeny_search_iters =
        static_cast<int>(n.field("kemeny_search_iters").integer(0, 1'000'000'000));
  }
  return config;
}

CatalogSource parse_catalog_source(const Node& n, const std::filesystem::path& base_dir) {
  CatalogSource source;
  if (n.value.is_string()) {
    source.path = base_dir / n.str();
    auto fmt = catalog_format_for(source.path);
    if (!fmt) n.fail("cannot infer the catalog format from the extension; use {path, format}");
    source.format = *fmt;
    return source;
  }
  n.only_keys({"path", "format", "synthetic"});
  if (n.has("synthetic")) {
    if (n.has("path") || n.has("format")) n.fail("use either path or synthetic, not both");
    const Node s = n.field("synthetic");
    s.only_keys({"item_count", "provider_count", "categories", "max_categories_per_item"});
    SyntheticCatalogParams params;
    if (s.has("item_count")) params.item_count = static_cast<int>(s.field("item_count").integer(1, 100'000));
    if (s.has("provider_count")) {
      params.provider_count = static_cast<int>(s.field("provider_count").integer(1, 1000));
    }
    params.categories = s.field("categories").strings();
    if (params.categories.empty()) s.field("categories").fail("must not be empty");
    if (std::set<std::string>(params.categories.begin(), params.categories.end()).size() !=
        params.categories.size()) {
      s.field("categories").fail("categories must be distinct");
    }
    if (s.has("max_categories_per_item")) {
      params.max_categories_per_item =
          static_cast<int>(s.field("max_categories_per_item").integer(1, 1000));
    }
    source.synthetic = std::move(params);
    return source;
  }
  source.path = base_dir / n.field("path").str();
  if (n.has("format")) {
    const Node f = n.field("format");
    auto fmt = parse_catalog_format(f.str());
    if (!fmt) f.fail("expected \"csv\" or \"json\"");
    source.format = *fmt;
  } else {
    auto fmt = catalog_format_for(source.path);
    if (!fmt) n.fail("cannot infer the catalog format; add \"format\"");
    source.format = *fmt;
  }
  return source;
}

QuerySpec parse_query(const Node& n, int default_top_n) {
  n.only_keys({"id", "text", "preference_weights", "constraints", "user_history", "user", "top_n",
               "relevance"});
  QuerySpec spec;
  Query& q = spec.query;
  q.id = n.field("id").str();
  if (q.id.empty()) n.field("id").fail("must not be empty");
  if (n.has("text")) q.text = n.field("text").str();
  if (n.has("preference_weights")) q.preference_weights = n.field("preference_weights").weights();
  if (n.has("constraints")) q.constraints = parse_constraints(n.field("constraints"));
  if (n.has("user_history")) q.user_history = n.field("user_history").strings();
  if (n.has("user")) spec.user = n.field("user").str();
  q.top_n = default_top_n;
  if (n.has("top_n")) q.top_n = static_cast<int>(n.field("top_n").integer(1, 10'000));
  if (n.has("relevance")) {
    const Node rel = n.field("relevance");
    rel.expect_object();
    for (const auto& [key, _] : rel.value.items()) {
      q.relevance.emplace(key, rel.field(key).number_in(0.0, std::numeric_limits<double>::max()));
    }
  }
  return spec;
}

PersonaParams parse_persona(const Node& n, int default_top_n) {
  n.only_keys({"persona_text", "category_weights", "constraint_templates", "query_count", "top_n"});
  PersonaParams p;
  p.persona_text = n.field("persona_text").str();
  p.category_weights = n.field("category_weights").weights();
  if (n.has("constraint_templates")) {
    p.constraint_templates = parse_constraints(n.field("constraint_templates"));
  }
  if (n.has("query_count")) {
    p.query_count = static_cast<int>(n.field("query_count").integer(1, 1'000'000));
  }
  p.top_n = default_top_n;
  if (n.has("top_n")) p.top_n = static_cast<int>(n.field("top_n").integer(1, 10'000));
  return p;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  const Node root{doc, ""};
  root.only_keys({"name", "catalog", "interactions", "agents", "policy", "rule", "reliability",
                  "candidate_multiplier", "top_n", "queries", "personas", "seed"});

  auto required = [&](const std::string& key) {
    if (!root.has(key)) throw SchemaError(key, "required field is missing");
    return root.field(key);
  };

  Scenario s;
  s.name = required("name").str();
  s.catalog = parse_catalog_source(required("catalog"), base_dir);
  if (root.has("interactions")) s.interactions = base_dir / root.field("interactions").str();

  const Node agents = required("agents");
  agents.expect_array();
  if (agents.value.empty()) agents.fail("at least one agent is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < agents.value.size(); ++i) {
    const Node a = agents.element(i);
    AgentSpec spec = parse_agent(a);
    if (!ids.insert(spec.agent_id).second) {
      a.field("id").fail("duplicate agent id '" + spec.agent_id + "'");
    }
    s.agents.push_back(std::move(spec));
  }

  if (root.has("policy")) s.policy = parse_policy(root.field("policy"));
  if (root.has("rule")) s.rule_config = parse_rule_config(root.field("rule"));
  if (root.has("reliability")) {
    const Node r = root.field("reliability");
    r.only_keys({"lambda", "floor"});
    if (r.has("lambda")) s.reliability.lambda = r.field("lambda").number_in(0.0, 1.0);
    if (r.has("floor")) s.reliability.floor = r.field("floor").number_in(0.0, 1.0);
  }
  if (root.has("candidate_multiplier")) {
    s.candidate_multiplier = static_cast<int>(root.field("candidate_multiplier").integer(1, 1000));
  }
  int top_n = 5;
  if (root.has("top_n")) top_n = static_cast<int>(root.field("top_n").integer(1, 10'000));

  if (root.has("queries")) {
    const Node qs = root.field("queries");
    qs.expect_array();
    std::set<std::string> qids;
    for (std::size_t i = 0; i < qs.value.size(); ++i) {
      QuerySpec q = parse_query(qs.element(i), top_n);
      if (!qids.insert(q.query.id).second) {
        qs.element(i).field("id").fail("duplicate query id '" + q.query.id + "'");
      }
      s.queries.push_back(std::move(q));
    }
  }
  if (root.has("personas")) {
    const Node ps = root.field("personas");
    ps.expect_array();
    for (std::size_t i = 0; i < ps.value.size(); ++i) {
      s.personas.push_back(parse_persona(ps.element(i), top_n));
    }
  }
  if (s.queries.empty() && s.personas.empty()) {
    throw SchemaError("queries", "at least one query or persona is required");
  }
  s.seed = required("seed").seed();
  s.rule_config.seed = s.seed;
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

LoadedScenario materialize(Scenario scenario) {
  LoadedScenario out;
  scenario.rule_config.seed = scenario.seed;
  if (scenario.catalog.is_synthetic()) {
    out.catalog = generate_synthetic_catalog(*scenario.catalog.synthetic, scenario.seed);
  } else {
    out.catalog = load_catalog(scenario.catalog.path, scenario.catalog.format);
  }
  if (out.catalog.empty()) throw SchemaError("catalog", "catalog has no items");

  InteractionSet interactions;
  if (scenario.interactions) {
    interactions = load_interactions(*scenario.interactions, out.catalog);
    out.dropped_interactions = interactions.dropped_unknown_items;
  }

  for (std::size_t i = 0; i < scenario.queries.size(); ++i) {
    const QuerySpec& spec = scenario.queries[i];
    Query q = spec.query;
    const std::string path = "queries[" + std::to_string(i) + "]";
    if (spec.user && q.user_history.empty()) {
      if (!scenario.interactions) {
        throw SchemaError(path + ".user", "no interactions file to resolve the user from");
      }
      auto it = interactions.by_user.find(*spec.user);
      if (it != interactions.by_user.end()) {
        for (const auto& row : it->second) q.user_history.push_back(row.item_id);
      }
    }
    for (const auto& id : q.user_history) {
      if (!out.catalog.contains(id)) {
        throw SchemaError(path + ".user_history", "item '" + id + "' is not in the catalog");
      }
    }
    out.queries.push_back(std::move(q));
  }
  if (!scenario.personas.empty()) {
    for (auto& q : generate_synthetic(scenario.personas, out.catalog, scenario.seed)) {
      out.queries.push_back(std::move(q));
    }
  }
  out.scenario = std::move(scenario);
  return out;
}

}  // namespace fair_agents
