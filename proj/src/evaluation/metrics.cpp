#include "fair_agents/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

namespace {

void require_k(int k) {
  if (k < 1) throw InvalidArgument("cutoff k must be >= 1");
}

void require_normalized(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw NotNormalized(std::string(what) + ": negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw NotNormalized(std::string(what) + ": entries sum to " + std::to_string(sum));
  }
}

double kl(std::span<const double> p, std::span<const double> q) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) total += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(total, 0.0);
}

}  // namespace

double ndcg_at_k(std::span<const ItemId> ranked, const std::map<ItemId, double>& relevance,
                 int k) {
  require_k(k);
  const auto limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    auto it = relevance.find(ranked[i]);
    if (it != relevance.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<double> ideal;
  ideal.reserve(relevance.size());
  for (const auto& [_, rel] : relevance) ideal.push_back(rel);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(ideal.size(), static_cast<std::size_t>(k)); ++i) {
    idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double recall_at_k(std::span<const ItemId> ranked, const std::set<ItemId>& relevant, int k) {
  require_k(k);
  if (relevant.empty()) return 0.0;
  const auto limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) hits += relevant.contains(ranked[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double gini_exposure(std::span<const double> exposures) {
  if (exposures.empty()) throw InvalidArgument("gini_exposure: empty input");
  std::vector<double> x(exposures.begin(), exposures.end());
  for (double v : x) {
    if (!(v >= 0.0)) throw InvalidArgument("gini_exposure: negative exposure");
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total <= 0.0) throw ZeroMass();
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  return acc / (n * total);
}

double normalized_entropy(std::span<const double> p) {
  if (p.size() < 2) throw InvalidArgument("normalized_entropy: need at least 2 outcomes");
  require_normalized(p, "normalized_entropy");
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return std::clamp(h / std::log2(static_cast<double>(p.size())), 0.0, 1.0);
}

double divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind) {
  if (p.size() != q.size()) throw LengthMismatch("divergence: vectors differ in length");
  require_normalized(p, "divergence(p)");
  require_normalized(q, "divergence(q)");

  if (kind == DivergenceKind::kKl) {
    std::vector<double> smoothed(q.begin(), q.end());
    double total = 0.0;
    for (double& v : smoothed) total += (v += kKlSmoothing);
    for (double& v : smoothed) v /= total;
    return kl(p, smoothed);
  }
  std::vector<double> mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
  return std::min(1.0, 0.5 * kl(p, mid) + 0.5 * kl(q, mid));
}

double poplift(std::span<const ItemId> profile_items, std::span<const ItemId> rec_items,
               const Catalog& catalog) {
  if (profile_items.empty()) throw UndefinedBaseline("poplift: empty profile");
  if (rec_items.empty()) throw InvalidArgument("poplift: empty recommendation list");
  auto mean_pop = [&](std::span<const ItemId> ids) {
    double total = 0.0;
    for (const auto& id : ids) total += catalog.at(id).popularity;
    return total / static_cast<double>(ids.size());
  };
  const double base = mean_pop(profile_items);
  if (base <= 0.0) throw UndefinedBaseline("poplift: profile mean popularity is 0");
  return (mean_pop(rec_items) - base) / base;
}

double fairness_regret(MetricId metric, double target, double achieved) {
  switch (metric_info(metric).direction) {
    case MetricDirection::kHigherIsBetter:
      return std::max(0.0, target - achieved);
    case MetricDirection::kLowerIsBetter:
      return std::max(0.0, achieved - target);
    case MetricDirection::kAbsLowerIsBetter:
      return std::max(0.0, std::abs(achieved) - target);
    case MetricDirection::kNone:
      break;
  }
  throw UnknownMetricDirection("metric '" + std::string(to_string(metric)) +
                               "' has no regret direction");
}

double fairness_regret(const AgentSpec& spec, double achieved) {
  return fairness_regret(spec.objective_metric, spec.objective_target, achieved);
}

double l_half_balance(std::span<const double> per_agent_fairness) {
  double root_sum = 0.0;
  for (double f : per_agent_fairness) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("l_half_balance: entry outside [0,1]");
    root_sum += std::sqrt(f);
  }
  return root_sum * root_sum;
}

}  // namespace fair_agents
