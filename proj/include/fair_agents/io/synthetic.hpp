#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

// Portable 64-bit linear congruential generator (Knuth's MMIX constants).
// state' = state * 6364136223846793005 + 1442695040888963407 (mod 2^64);
// uniform() takes the top 53 bits of the new state.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  // In [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // In [0, n); n must be positive.
  std::size_t below(std::size_t n) {
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
  }

 private:
  std::uint64_t state_;
};

struct PersonaParams {
  std::string persona_text;
  std::map<std::string, double> category_weights;
  std::vector<Constraint> constraint_templates;
  int query_count = 1;
  int top_n = 5;

  bool operator==(const PersonaParams&) const = default;
};

inline constexpr double kPersonaNoise = 0.1;
inline constexpr double kConstraintInclusion = 0.5;

// For each persona (in order) and each of its queries: weights perturbed by
// uniform noise in [-0.1, 0.1] (clamped at 0, categories in name order), then
// each constraint template kept with probability 0.5. One shared Lcg64 seeded
// with `seed` drives the whole run. Query ids are "<persona>-<query>", both
// 0-based.
std::vector<Query> generate_synthetic(std::span<const PersonaParams> personas,
                                      const Catalog& catalog, std::uint64_t seed);

struct SyntheticCatalogParams {
  int item_count = 200;
  int provider_count = 20;
  std::vector<std::string> categories;
  int max_categories_per_item = 3;

  bool operator==(const SyntheticCatalogParams&) const = default;
};

// Tourism-flavoured catalog with skewed provider sizes and popularity that
// grows with the number of categories an item covers.
Catalog generate_synthetic_catalog(const SyntheticCatalogParams& params, std::uint64_t seed);

}  // namespace fair_agents
