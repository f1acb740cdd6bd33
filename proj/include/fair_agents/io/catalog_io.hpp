#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

enum class CatalogFormat { kCsv, kJson };

std::optional<CatalogFormat> parse_catalog_format(std::string_view name);
// By extension: .csv or .json.
std::optional<CatalogFormat> catalog_format_for(const std::filesystem::path& path);

// CSV header: id,provider_id,categories,popularity,sustainability,description
// in any order; categories are ';'-separated; any further column is read as a
// numeric attribute. Missing popularity/sustainability default to 0.5.
//
// Throws DuplicateItemId, MissingRequiredField (id), MalformedRecord (with the
// offending line; record index for JSON), IoError when the file cannot be read.
Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format);
Catalog parse_catalog_csv(std::istream& in);
Catalog parse_catalog_json(const std::string& text);

std::string catalog_to_csv(const Catalog& catalog);
std::string catalog_to_json(const Catalog& catalog);
void write_catalog(const Catalog& catalog, const std::filesystem::path& path, CatalogFormat format);

struct Interaction {
  ItemId item_id;
  double rating = 0.0;
  std::string timestamp;  // as written
  std::int64_t epoch_seconds = 0;

  bool operator==(const Interaction&) const = default;
};

struct InteractionSet {
  // Per user, sorted by timestamp (stable for equal timestamps).
  std::map<std::string, std::vector<Interaction>> by_user;
  // Rows naming an item that is not in the catalog.
  std::size_t dropped_unknown_items = 0;
};

// CSV header: user_id,item_id,rating,timestamp. Throws MalformedRecord.
InteractionSet load_interactions(const std::filesystem::path& path, const Catalog& catalog);
InteractionSet parse_interactions_csv(std::istream& in, const Catalog& catalog);

// Seconds since the Unix epoch for YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM].
std::optional<std::int64_t> parse_iso8601(std::string_view text);

}  // namespace fair_agents
