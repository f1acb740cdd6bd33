#include "fair_agents/io/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

std::vector<Query> generate_synthetic(std::span<const PersonaParams> personas,
                                      const Catalog& catalog, std::uint64_t seed) {
  if (catalog.empty()) throw InvalidArgument("generate_synthetic: catalog is empty");
  Lcg64 rng(seed);
  std::vector<Query> out;
  for (std::size_t p = 0; p < personas.size(); ++p) {
    const PersonaParams& persona = personas[p];
    if (persona.query_count < 1) throw InvalidArgument("persona query_count must be >= 1");
    for (int q = 0; q < persona.query_count; ++q) {
      Query query;
      query.id = std::to_string(p) + "-" + std::to_string(q);
      query.text = persona.persona_text + " (request " + std::to_string(q + 1) + ")";
      query.top_n = persona.top_n;
      for (const auto& [category, weight] : persona.category_weights) {
        const double noise = (2.0 * rng.uniform() - 1.0) * kPersonaNoise;
        query.preference_weights.emplace(category, std::max(0.0, weight + noise));
      }
      for (const auto& tmpl : persona.constraint_templates) {
        if (rng.uniform() < kConstraintInclusion) query.constraints.push_back(tmpl);
      }
      out.push_back(std::move(query));
    }
  }
  return out;
}

Catalog generate_synthetic_catalog(const SyntheticCatalogParams& params, std::uint64_t seed) {
  if (params.item_count < 1 || params.provider_count < 1 || params.categories.empty()) {
    throw InvalidArgument("synthetic catalog needs items, providers and categories");
  }
  Lcg64 rng(seed);
  const auto n_cats = params.categories.size();
  const auto max_cats = static_cast<std::size_t>(
      std::clamp<int>(params.max_categories_per_item, 1, static_cast<int>(n_cats)));
  Catalog catalog;
  char buf[32];
  for (int i = 0; i < params.item_count; ++i) {
    Item item;
    std::snprintf(buf, sizeof buf, "item-%04d", i);
    item.id = buf;
    // Cubic skew: low provider indices own most of the catalog.
    const double u = rng.uniform();
    const auto provider = static_cast<int>(std::floor(u * u * u * params.provider_count));
    std::snprintf(buf, sizeof buf, "prov-%03d", std::min(provider, params.provider_count - 1));
    item.provider_id = buf;

    const std::size_t want = 1 + rng.below(max_cats);
    while (item.categories.size() < want) item.categories.insert(params.categories[rng.below(n_cats)]);

    const double breadth = static_cast<double>(item.categories.size() - 1) / static_cast<double>(max_cats);
    item.popularity = std::clamp(0.6 * rng.uniform() * rng.uniform() + 0.4 * breadth, 0.0, 1.0);
    item.sustainability = std::clamp(0.6 * (1.0 - item.popularity) + 0.4 * rng.uniform(), 0.0, 1.0);

    std::string cats;
    for (const auto& c : item.categories) cats += (cats.empty() ? "" : ", ") + c;
    item.description = "Synthetic attraction " + std::to_string(i) + " (" + cats + ")";
    catalog.add(std::move(item));
  }
  return catalog;
}

}  // namespace fair_agents
