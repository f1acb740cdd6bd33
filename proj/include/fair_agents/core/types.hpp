#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fair_agents {

using ItemId = std::string;
using Ranking = std::vector<ItemId>;

enum class StakeholderRole { kUser, kProvider, kThirdParty };

std::string_view to_string(StakeholderRole role);
std::optional<StakeholderRole> parse_role(std::string_view name);

// An entry of the verified knowledge base. Everything an agent recommends must
// resolve to one of these.
struct Item {
  ItemId id;
  std::string provider_id;
  std::set<std::string> categories;
  double popularity = 0.5;
  double sustainability = 0.5;
  std::map<std::string, double> attributes;
  std::string description;

  // Named numeric attribute lookup. "popularity" and "sustainability" resolve
  // to the dedicated fields; anything else goes through `attributes`.
  std::optional<double> attribute(std::string_view name) const;

  bool operator==(const Item&) const = default;
};

class Catalog {
 public:
  using ItemMap = std::map<ItemId, Item, std::less<>>;

  Catalog() = default;
  explicit Catalog(std::vector<Item> items);

  // Throws DuplicateItemId, or InvalidArgument for an empty id or an
  // out-of-range popularity/sustainability.
  void add(Item item);

  const Item* find(std::string_view id) const;
  const Item& at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  // Ordered by id.
  const ItemMap& items() const { return items_; }
  const std::map<std::string, std::vector<ItemId>>& provider_index() const {
    return provider_index_;
  }
  std::vector<std::string> providers() const;
  std::vector<std::string> categories() const;

  // FNV-1a 64 over a canonical dump of all items, as 16 hex digits.
  std::string content_hash() const;

 private:
  ItemMap items_;
  std::map<std::string, std::vector<ItemId>> provider_index_;
};

// Threshold predicate over a named item attribute.
struct Constraint {
  enum class Direction { kAtMost, kAtLeast };

  std::string attribute;
  Direction direction = Direction::kAtMost;
  double value = 0.0;

  // Items without the attribute fail the constraint.
  bool satisfied_by(const Item& item) const;

  bool operator==(const Constraint&) const = default;
};

std::string_view to_string(Constraint::Direction direction);
std::optional<Constraint::Direction> parse_direction(std::string_view op);

struct Query {
  std::string id;
  std::string text;
  std::map<std::string, double> preference_weights;
  std::vector<Constraint> constraints;
  std::vector<ItemId> user_history;
  int top_n = 5;
  // Optional graded ground truth for accuracy metrics. When empty, relevance is
  // derived from the preference weights.
  std::map<ItemId, double> relevance;

  bool operator==(const Query&) const = default;
};

bool satisfies_constraints(const Query& query, const Item& item);

struct Ballot {
  std::string agent_id;
  Ranking ranking;
  std::optional<std::string> justification;
  double weight = 1.0;

  bool operator==(const Ballot&) const = default;
};

// Weighted ballots entering aggregation, with the candidate pool derived from
// them (sorted by id).
class PreferenceProfile {
 public:
  // Throws NoCandidates when every ballot is empty, InvalidProfile when a ballot
  // repeats an item or carries a weight outside [0,1].
  explicit PreferenceProfile(std::vector<Ballot> ballots);

  const std::vector<Ballot>& ballots() const { return ballots_; }
  const Ranking& pool() const { return pool_; }

  // Distinct agent ids, sorted.
  std::vector<std::string> agent_ids() const;

 private:
  std::vector<Ballot> ballots_;
  Ranking pool_;
};

enum class Rule { kBorda, kCopeland, kRankedPairs, kKemeny };

inline constexpr Rule kAllRules[] = {Rule::kBorda, Rule::kCopeland,
                                     Rule::kRankedPairs, Rule::kKemeny};

std::string_view to_string(Rule rule);
std::optional<Rule> parse_rule(std::string_view name);

struct TieEvent {
  std::string kind;  // "score-tie", "margin-tie", "skip", "order-tie", ...
  std::string description;
  std::string resolution;

  bool operator==(const TieEvent&) const = default;
};

struct AggregateResult {
  Rule rule = Rule::kBorda;
  bool heuristic = false;
  Ranking consensus;
  std::map<std::string, double> influence;
  std::vector<TieEvent> tiebreak_trace;
  std::map<ItemId, double> scores;
  // Total weighted Kendall distance for Kemeny; 0 for the other rules.
  double objective = 0.0;

  // "borda", "copeland", "ranked-pairs", "kemeny" or "kemeny-heuristic".
  std::string label() const;

  bool operator==(const AggregateResult&) const = default;
};

enum class MetricId {
  kNdcg,
  kRecall,
  kGiniExposure,
  kNormEntropy,
  kKlDiv,
  kJsDiv,
  kPopLift,
  kFairnessRegret,
  kLHalfBalance,
};

inline constexpr MetricId kAllMetrics[] = {
    MetricId::kNdcg,         MetricId::kRecall,         MetricId::kGiniExposure,
    MetricId::kNormEntropy,  MetricId::kKlDiv,          MetricId::kJsDiv,
    MetricId::kPopLift,      MetricId::kFairnessRegret, MetricId::kLHalfBalance,
};

enum class MetricDirection { kHigherIsBetter, kLowerIsBetter, kAbsLowerIsBetter, kNone };

struct MetricInfo {
  MetricId id;
  std::string_view name;
  MetricDirection direction;
  double lower;  // codomain bounds; +inf for unbounded above
  double upper;
};

const MetricInfo& metric_info(MetricId id);
std::string_view to_string(MetricId id);
std::optional<MetricId> parse_metric(std::string_view name);

}  // namespace fair_agents
