#include "fair_agents/io/outcomes_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

ojson encode_query(const Query& q) {
  ojson j = ojson::object();
  j["id"] = q.id;
  j["text"] = q.text;
  j["preference_weights"] = q.preference_weights;
  ojson constraints = ojson::array();
  for (const auto& c : q.constraints) {
    constraints.push_back(
        {{"attribute", c.attribute}, {"op", std::string(to_string(c.direction))}, {"value", c.value}});
  }
  j["constraints"] = std::move(constraints);
  j["user_history"] = q.user_history;
  j["top_n"] = q.top_n;
  j["relevance"] = q.relevance;
  return j;
}

ojson encode_aggregate(const AggregateResult& a) {
  ojson j = ojson::object();
  j["rule"] = std::string(to_string(a.rule));
  j["heuristic"] = a.heuristic;
  j["consensus"] = a.consensus;
  j["influence"] = a.influence;
  ojson trace = ojson::array();
  for (const auto& t : a.tiebreak_trace) {
    trace.push_back({{"kind", t.kind}, {"description", t.description}, {"resolution", t.resolution}});
  }
  j["tiebreak_trace"] = std::move(trace);
  j["scores"] = a.scores;
  j["objective"] = a.objective;
  return j;
}

ojson encode_outcome(const QueryOutcome& o) {
  ojson j = ojson::object();
  j["query"] = encode_query(o.query);
  j["final_list"] = o.final_list;
  ojson ballots = ojson::array();
  for (const auto& b : o.per_agent_ballots) {
    ojson e = ojson::object();
    e["agent_id"] = b.agent_id;
    e["ranking"] = b.ranking;
    e["justification"] = b.justification ? ojson(*b.justification) : ojson(nullptr);
    e["weight"] = b.weight;
    ballots.push_back(std::move(e));
  }
  j["per_agent_ballots"] = std::move(ballots);
  j["aggregate"] = encode_aggregate(o.aggregate);
  j["active_agents"] = o.active_agents;
  j["skipped_agents"] = o.skipped_agents;
  j["justifications"] = o.justifications;
  j["violations"] = o.violations;
  j["regret"] = o.regret;
  j["counters"] = {{"generation_calls", o.counters.generation_calls},
                   {"adapter_calls", o.counters.adapter_calls},
                   {"grounding_calls", o.counters.grounding_calls},
                   {"aggregation_runs", o.counters.aggregation_runs},
                   {"evaluation_calls", o.counters.evaluation_calls}};
  return j;
}

ojson encode_agent(const AgentSpec& s) {
  ojson j = ojson::object();
  j["id"] = s.agent_id;
  j["role"] = std::string(to_string(s.role));
  j["objective"] = std::string(to_string(s.objective));
  j["objective_metric"] = std::string(to_string(s.objective_metric));
  j["objective_target"] = s.objective_target;
  j["compatibility_tags"] = s.compatibility_tags;
  ojson params = ojson::object();
  for (const auto& [k, v] : s.params) {
    params[k] = std::holds_alternative<double>(v) ? ojson(std::get<double>(v))
                                                  : ojson(std::get<std::string>(v));
  }
  j["params"] = std::move(params);
  return j;
}

template <typename T>
T enum_from(std::optional<T> parsed, const std::string& what, const std::string& name) {
  if (!parsed) throw SchemaError(what, "unknown value '" + name + "'");
  return *parsed;
}

Query decode_query(const json& j) {
  Query q;
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  q.preference_weights = j.at("preference_weights").get<std::map<std::string, double>>();
  for (const auto& c : j.at("constraints")) {
    Constraint con;
    con.attribute = c.at("attribute").get<std::string>();
    const auto op = c.at("op").get<std::string>();
    con.direction = enum_from(parse_direction(op), "query.constraints.op", op);
    con.value = c.at("value").get<double>();
    q.constraints.push_back(std::move(con));
  }
  q.user_history = j.at("user_history").get<std::vector<std::string>>();
  q.top_n = j.at("top_n").get<int>();
  q.relevance = j.at("relevance").get<std::map<std::string, double>>();
  return q;
}

AggregateResult decode_aggregate(const json& j) {
  AggregateResult a;
  const auto rule = j.at("rule").get<std::string>();
  a.rule = enum_from(parse_rule(rule), "aggregate.rule", rule);
  a.heuristic = j.at("heuristic").get<bool>();
  a.consensus = j.at("consensus").get<Ranking>();
  a.influence = j.at("influence").get<std::map<std::string, double>>();
  for (const auto& t : j.at("tiebreak_trace")) {
    a.tiebreak_trace.push_back({t.at("kind").get<std::string>(), t.at("description").get<std::string>(),
                                t.at("resolution").get<std::string>()});
  }
  a.scores = j.at("scores").get<std::map<std::string, double>>();
  a.objective = j.at("objective").get<double>();
  return a;
}

QueryOutcome decode_outcome(const json& j) {
  QueryOutcome o;
  o.query = decode_query(j.at("query"));
  o.final_list = j.at("final_list").get<Ranking>();
  for (const auto& b : j.at("per_agent_ballots")) {
    Ballot ballot;
    ballot.agent_id = b.at("agent_id").get<std::string>();
    ballot.ranking = b.at("ranking").get<Ranking>();
    if (!b.at("justification").is_null()) ballot.justification = b.at("justification").get<std::string>();
    ballot.weight = b.at("weight").get<double>();
    o.per_agent_ballots.push_back(std::move(ballot));
  }
  o.aggregate = decode_aggregate(j.at("aggregate"));
  o.active_agents = j.at("active_agents").get<std::vector<std::string>>();
  o.skipped_agents = j.at("skipped_agents").get<std::map<std::string, std::string>>();
  o.justifications = j.at("justifications").get<std::map<std::string, std::string>>();
  o.violations = j.at("violations").get<std::map<std::string, long>>();
  o.regret = j.at("regret").get<std::map<std::string, double>>();
  const auto& c = j.at("counters");
  o.counters.generation_calls = c.at("generation_calls").get<long>();
  o.counters.adapter_calls = c.at("adapter_calls").get<long>();
  o.counters.grounding_calls = c.at("grounding_calls").get<long>();
  o.counters.aggregation_runs = c.at("aggregation_runs").get<long>();
  o.counters.evaluation_calls = c.at("evaluation_calls").get<long>();
  return o;
}

AgentSpec decode_agent(const json& j) {
  AgentSpec s;
  s.agent_id = j.at("id").get<std::string>();
  const auto role = j.at("role").get<std::string>();
  s.role = enum_from(parse_role(role), "agents.role", role);
  const auto objective = j.at("objective").get<std::string>();
  s.objective = enum_from(parse_objective(objective), "agents.objective", objective);
  const auto metric = j.at("objective_metric").get<std::string>();
  s.objective_metric = enum_from(parse_metric(metric), "agents.objective_metric", metric);
  s.objective_target = j.at("objective_target").get<double>();
  s.compatibility_tags = j.at("compatibility_tags").get<std::set<std::string>>();
  for (const auto& [k, v] : j.at("params").items()) {
    if (v.is_number()) {
      s.params.emplace(k, v.get<double>());
    } else {
      s.params.emplace(k, v.get<std::string>());
    }
  }
  return s;
}

}  // namespace

std::string encode_outcomes(const SavedOutcomes& saved) {
  ojson doc = ojson::object();
  doc["format"] = kOutcomesFormat;
  doc["scenario"] = saved.scenario;
  doc["seed"] = saved.seed;
  doc["catalog_hash"] = saved.catalog_hash;
  ojson agents = ojson::array();
  for (const auto& a : saved.agents) agents.push_back(encode_agent(a));
  doc["agents"] = std::move(agents);
  ojson runs = ojson::array();
  for (const auto& run : saved.runs) {
    ojson outcomes = ojson::array();
    for (const auto& o : run.outcomes) outcomes.push_back(encode_outcome(o));
    runs.push_back({{"rule", run.rule}, {"outcomes", std::move(outcomes)}});
  }
  doc["runs"] = std::move(runs);
  return doc.dump(1) + "\n";
}

SavedOutcomes decode_outcomes(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("outcomes", std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != kOutcomesFormat) {
      throw SchemaError("outcomes.format", std::string("expected '") + kOutcomesFormat + "'");
    }
    SavedOutcomes saved;
    saved.scenario = doc.at("scenario").get<std::string>();
    saved.seed = doc.at("seed").get<std::uint64_t>();
    saved.catalog_hash = doc.at("catalog_hash").get<std::string>();
    for (const auto& a : doc.at("agents")) saved.agents.push_back(decode_agent(a));
    for (const auto& r : doc.at("runs")) {
      OutcomeRun run;
      run.rule = r.at("rule").get<std::string>();
      for (const auto& o : r.at("outcomes")) run.outcomes.push_back(decode_outcome(o));
      if (run.outcomes.empty()) throw SchemaError("outcomes.runs", "run '" + run.rule + "' is empty");
      saved.runs.push_back(std::move(run));
    }
    if (saved.runs.empty()) throw SchemaError("outcomes.runs", "no runs");
    return saved;
  } catch (const json::exception& e) {
    throw SchemaError("outcomes", e.what());
  }
}

void save_outcomes(const SavedOutcomes& saved, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << encode_outcomes(saved);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SavedOutcomes load_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open outcomes '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_outcomes(ss.str());
}

}  // namespace fair_agents
