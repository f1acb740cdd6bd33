#include "fair_agents/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <limits>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/core/hash.hpp"
#include "fair_agents/core/ranking.hpp"

namespace fair_agents {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string_view to_string(StakeholderRole role) {
  switch (role) {
    case StakeholderRole::kUser:
      return "user";
    case StakeholderRole::kProvider:
      return "provider";
    case StakeholderRole::kThirdParty:
      return "third_party";
  }
  return "?";
}

std::optional<StakeholderRole> parse_role(std::string_view name) {
  if (name == "user") return StakeholderRole::kUser;
  if (name == "provider") return StakeholderRole::kProvider;
  if (name == "third_party") return StakeholderRole::kThirdParty;
  return std::nullopt;
}

std::optional<double> Item::attribute(std::string_view name) const {
  if (name == "popularity") return popularity;
  if (name == "sustainability") return sustainability;
  auto it = attributes.find(std::string(name));
  if (it == attributes.end()) return std::nullopt;
  return it->second;
}

Catalog::Catalog(std::vector<Item> items) {
  for (auto& item : items) add(std::move(item));
}

void Catalog::add(Item item) {
  if (item.id.empty()) throw InvalidArgument("item id must be non-empty");
  if (!(item.popularity >= 0.0 && item.popularity <= 1.0)) {
    throw InvalidArgument("item '" + item.id + "': popularity outside [0,1]");
  }
  if (!(item.sustainability >= 0.0 && item.sustainability <= 1.0)) {
    throw InvalidArgument("item '" + item.id + "': sustainability outside [0,1]");
  }
  if (items_.contains(item.id)) throw DuplicateItemId(item.id);

  auto& ids = provider_index_[item.provider_id];
  ids.insert(std::upper_bound(ids.begin(), ids.end(), item.id), item.id);
  ItemId key = item.id;
  items_.emplace(std::move(key), std::move(item));
}

const Item* Catalog::find(std::string_view id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : &it->second;
}

const Item& Catalog::at(std::string_view id) const {
  const Item* item = find(id);
  if (item == nullptr) throw InvalidArgument("unknown item '" + std::string(id) + "'");
  return *item;
}

std::vector<std::string> Catalog::providers() const {
  std::vector<std::string> out;
  out.reserve(provider_index_.size());
  for (const auto& [provider, _] : provider_index_) out.push_back(provider);
  return out;
}

std::vector<std::string> Catalog::categories() const {
  std::set<std::string> all;
  for (const auto& [_, item] : items_) all.insert(item.categories.begin(), item.categories.end());
  return {all.begin(), all.end()};
}

std::string Catalog::content_hash() const {
  // Unit separator / record separator keep field boundaries unambiguous.
  auto state = kFnvOffsetBasis;
  char num[64];
  auto put = [&](std::string_view s) {
    state = fnv1a64(s, state);
    state = fnv1a64("\x1f", state);
  };
  auto put_num = [&](double v) {
    std::snprintf(num, sizeof num, "%.17g", v);
    put(num);
  };
  for (const auto& [id, item] : items_) {
    put(item.id);
    put(item.provider_id);
    for (const auto& c : item.categories) put(c);
    put("|");
    put_num(item.popularity);
    put_num(item.sustainability);
    for (const auto& [name, value] : item.attributes) {
      put(name);
      put_num(value);
    }
    put(item.description);
    state = fnv1a64("\x1e", state);
  }
  return to_hex(state);
}

bool Constraint::satisfied_by(const Item& item) const {
  auto v = item.attribute(attribute);
  if (!v) return false;
  return direction == Direction::kAtMost ? *v <= value : *v >= value;
}

std::string_view to_string(Constraint::Direction direction) {
  return direction == Constraint::Direction::kAtMost ? "<=" : ">=";
}

std::optional<Constraint::Direction> parse_direction(std::string_view op) {
  if (op == "<=" || op == "le" || op == "at_most") return Constraint::Direction::kAtMost;
  if (op == ">=" || op == "ge" || op == "at_least") return Constraint::Direction::kAtLeast;
  return std::nullopt;
}

bool satisfies_constraints(const Query& query, const Item& item) {
  return std::all_of(query.constraints.begin(), query.constraints.end(),
                     [&](const Constraint& c) { return c.satisfied_by(item); });
}

PreferenceProfile::PreferenceProfile(std::vector<Ballot> ballots)
    : ballots_(std::move(ballots)) {
  for (const auto& b : ballots_) {
    if (!(b.weight >= 0.0 && b.weight <= 1.0)) {
      throw InvalidProfile("ballot of '" + b.agent_id + "' has weight outside [0,1]");
    }
    std::set<std::string_view> seen;
    for (const auto& id : b.ranking) {
      if (!seen.insert(id).second) {
        throw InvalidProfile("ballot of '" + b.agent_id + "' repeats item '" + id + "'");
      }
    }
  }
  pool_ = candidate_pool(ballots_);
}

std::vector<std::string> PreferenceProfile::agent_ids() const {
  std::set<std::string> ids;
  for (const auto& b : ballots_) ids.insert(b.agent_id);
  return {ids.begin(), ids.end()};
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kBorda:
      return "borda";
    case Rule::kCopeland:
      return "copeland";
    case Rule::kRankedPairs:
      return "ranked-pairs";
    case Rule::kKemeny:
      return "kemeny";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view name) {
  std::string lower;
  for (char c : name) {
    if (c == '_' || c == ' ') c = '-';
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "borda") return Rule::kBorda;
  if (lower == "copeland") return Rule::kCopeland;
  if (lower == "ranked-pairs" || lower == "rankedpairs") return Rule::kRankedPairs;
  if (lower == "kemeny") return Rule::kKemeny;
  return std::nullopt;
}

std::string AggregateResult::label() const {
  std::string out(to_string(rule));
  if (heuristic) out += "-heuristic";
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<MetricInfo, 9> kMetricTable{{
    {MetricId::kNdcg, "ndcg", MetricDirection::kHigherIsBetter, 0.0, 1.0},
    {MetricId::kRecall, "recall", MetricDirection::kHigherIsBetter, 0.0, 1.0},
    {MetricId::kGiniExposure, "gini_exposure", MetricDirection::kLowerIsBetter, 0.0, 1.0},
    {MetricId::kNormEntropy, "norm_entropy", MetricDirection::kHigherIsBetter, 0.0, 1.0},
    {MetricId::kKlDiv, "kl_div", MetricDirection::kLowerIsBetter, 0.0, kInf},
    {MetricId::kJsDiv, "js_div", MetricDirection::kLowerIsBetter, 0.0, 1.0},
    {MetricId::kPopLift, "poplift", MetricDirection::kAbsLowerIsBetter, -1.0, kInf},
    {MetricId::kFairnessRegret, "fairness_regret", MetricDirection::kNone, 0.0, kInf},
    {MetricId::kLHalfBalance, "l_half_balance", MetricDirection::kNone, 0.0, kInf},
}};

}  // namespace

const MetricInfo& metric_info(MetricId id) {
  return kMetricTable[static_cast<std::size_t>(id)];
}

std::string_view to_string(MetricId id) { return metric_info(id).name; }

std::optional<MetricId> parse_metric(std::string_view name) {
  for (const auto& info : kMetricTable) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

}  // namespace fair_agents
