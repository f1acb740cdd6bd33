#include "fair_agents/io/catalog_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fair_agents/core/errors.hpp"
#include "fair_agents/io/csv.hpp"

namespace fair_agents {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_unit_interval(double v, const char* field, std::size_t line) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw MalformedRecord(line, std::string(field) + " outside [0,1]");
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::optional<CatalogFormat> parse_catalog_format(std::string_view name) {
  if (name == "csv" || name == "CSV") return CatalogFormat::kCsv;
  if (name == "json" || name == "JSON") return CatalogFormat::kJson;
  return std::nullopt;
}

std::optional<CatalogFormat> catalog_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return CatalogFormat::kCsv;
  if (ext == ".json") return CatalogFormat::kJson;
  return std::nullopt;
}

Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format) {
  const std::string text = read_file(path);
  if (format == CatalogFormat::kJson) return parse_catalog_json(text);
  std::istringstream in(text);
  return parse_catalog_csv(in);
}

Catalog parse_catalog_csv(std::istream& in) {
  const auto rows = csv::read(in);
  if (rows.empty()) throw MalformedRecord(1, "missing header row");

  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(trim(header[i]), i);
  if (!column.contains("id")) throw MissingRequiredField(rows.front().line, "id");
  static const std::set<std::string> kKnown = {"id",         "provider_id",    "categories",
                                               "popularity", "sustainability", "description"};

  Catalog catalog;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw MalformedRecord(row.line, "expected " + std::to_string(header.size()) +
                                          " fields, found " + std::to_string(row.fields.size()));
    }
    auto cell = [&](const char* name) -> std::string {
      auto it = column.find(name);
      return it == column.end() ? std::string() : row.fields[it->second];
    };

    Item item;
    item.id = trim(cell("id"));
    if (item.id.empty()) throw MissingRequiredField(row.line, "id");
    item.provider_id = trim(cell("provider_id"));
    std::stringstream cats(cell("categories"));
    for (std::string c; std::getline(cats, c, ';');) {
      if (auto t = trim(c); !t.empty()) item.categories.insert(t);
    }
    for (const char* field : {"popularity", "sustainability"}) {
      const std::string raw = trim(cell(field));
      double value = 0.5;
      if (!raw.empty()) {
        auto parsed = parse_double(raw);
        if (!parsed) throw MalformedRecord(row.line, std::string(field) + " is not a number");
        value = *parsed;
      }
      check_unit_interval(value, field, row.line);
      (std::string_view(field) == "popularity" ? item.popularity : item.sustainability) = value;
    }
    item.description = cell("description");
    for (const auto& [name, idx] : column) {
      if (kKnown.contains(name)) continue;
      const std::string raw = trim(row.fields[idx]);
      if (raw.empty()) continue;
      auto parsed = parse_double(raw);
      if (!parsed) throw MalformedRecord(row.line, "attribute '" + name + "' is not a number");
      item.attributes.emplace(name, *parsed);
    }
    catalog.add(std::move(item));
  }
  return catalog;
}

Catalog parse_catalog_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(1, std::string("invalid JSON: ") + e.what());
  }
  const json* items = &doc;
  if (doc.is_object()) {
    auto it = doc.find("items");
    if (it == doc.end()) throw MalformedRecord(1, "missing 'items' array");
    items = &*it;
  }
  if (!items->is_array()) throw MalformedRecord(1, "catalog must be an array of items");

  Catalog catalog;
  std::size_t record = 0;
  for (const auto& entry : *items) {
    ++record;
    if (!entry.is_object()) throw MalformedRecord(record, "item is not an object");
    auto id = entry.find("id");
    if (id == entry.end() || !id->is_string() || id->get<std::string>().empty()) {
      throw MissingRequiredField(record, "id");
    }
    try {
      Item item;
      item.id = id->get<std::string>();
      item.provider_id = entry.value("provider_id", std::string());
      if (auto c = entry.find("categories"); c != entry.end()) {
        for (const auto& cat : *c) item.categories.insert(cat.get<std::string>());
      }
      item.popularity = entry.value("popularity", 0.5);
      item.sustainability = entry.value("sustainability", 0.5);
      check_unit_interval(item.popularity, "popularity", record);
      check_unit_interval(item.sustainability, "sustainability", record);
      if (auto a = entry.find("attributes"); a != entry.end()) {
        for (const auto& [name, value] : a->items()) item.attributes.emplace(name, value.get<double>());
      }
      item.description = entry.value("description", std::string());
      catalog.add(std::move(item));
    } catch (const json::exception& e) {
      throw MalformedRecord(record, e.what());
    }
  }
  return catalog;
}

std::string catalog_to_csv(const Catalog& catalog) {
  std::set<std::string> attribute_names;
  for (const auto& [_, item] : catalog.items()) {
    for (const auto& [name, _v] : item.attributes) attribute_names.insert(name);
  }
  std::string out = "id,provider_id,categories,popularity,sustainability,description";
  for (const auto& name : attribute_names) out += "," + csv::escape(name);
  out += "\n";
  for (const auto& [_, item] : catalog.items()) {
    std::string cats;
    for (const auto& c : item.categories) {
      if (!cats.empty()) cats += ";";
      cats += c;
    }
    out += csv::escape(item.id) + "," + csv::escape(item.provider_id) + "," + csv::escape(cats) +
           "," + format_number(item.popularity) + "," + format_number(item.sustainability) + "," +
           csv::escape(item.description);
    for (const auto& name : attribute_names) {
      out += ",";
      if (auto it = item.attributes.find(name); it != item.attributes.end()) {
        out += format_number(it->second);
      }
    }
    out += "\n";
  }
  return out;
}

std::string catalog_to_json(const Catalog& catalog) {
  json items = json::array();
  for (const auto& [_, item] : catalog.items()) {
    items.push_back({{"id", item.id},
                     {"provider_id", item.provider_id},
                     {"categories", item.categories},
                     {"popularity", item.popularity},
                     {"sustainability", item.sustainability},
                     {"attributes", item.attributes},
                     {"description", item.description}});
  }
  return json{{"items", std::move(items)}}.dump(2) + "\n";
}

void write_catalog(const Catalog& catalog, const std::filesystem::path& path,
                   CatalogFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << (format == CatalogFormat::kCsv ? catalog_to_csv(catalog) : catalog_to_json(catalog));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double s = 0.0;
  std::string t = trim(text);
  if (t.size() < 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    if (pos + len > t.size()) return false;
    auto [p, ec] = std::from_chars(t.data() + pos, t.data() + pos + len, out);
    return ec == std::errc() && p == t.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d)) return std::nullopt;
  std::size_t pos = 10;
  int offset_minutes = 0;
  if (pos < t.size() && (t[pos] == 'T' || t[pos] == ' ')) {
    if (!num(pos + 1, 2, h) || pos + 3 >= t.size() || t[pos + 3] != ':' || !num(pos + 4, 2, mi)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < t.size() && t[pos] == ':') {
      std::size_t end = pos + 1;
      while (end < t.size() && (std::isdigit(static_cast<unsigned char>(t[end])) || t[end] == '.')) ++end;
      auto parsed = parse_double(std::string_view(t).substr(pos + 1, end - pos - 1));
      if (!parsed) return std::nullopt;
      s = *parsed;
      pos = end;
    }
    if (pos < t.size()) {
      if (t[pos] == 'Z' && pos + 1 == t.size()) {
        pos += 1;
      } else if ((t[pos] == '+' || t[pos] == '-') && t.size() == pos + 6 && t[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!num(pos + 1, 2, oh) || !num(pos + 4, 2, om)) return std::nullopt;
        offset_minutes = (t[pos] == '-' ? -1 : 1) * (oh * 60 + om);
        pos = t.size();
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != t.size()) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s >= 61.0) return std::nullopt;
  const auto days = sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 +
         static_cast<std::int64_t>(s) - offset_minutes * 60;
}

InteractionSet load_interactions(const std::filesystem::path& path, const Catalog& catalog) {
  std::istringstream in(read_file(path));
  return parse_interactions_csv(in, catalog);
}

InteractionSet parse_interactions_csv(std::istream& in, const Catalog& catalog) {
  InteractionSet out;
  const auto rows = csv::read(in);
  if (rows.empty()) return out;

  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(trim(header[i]), i);
  for (const char* required : {"user_id", "item_id", "rating", "timestamp"}) {
    if (!column.contains(required)) {
      throw MalformedRecord(rows.front().line, std::string("missing required column '") + required + "'");
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw MalformedRecord(row.line, "expected " + std::to_string(header.size()) + " fields");
    }
    const std::string user = trim(row.fields[column["user_id"]]);
    Interaction interaction;
    interaction.item_id = trim(row.fields[column["item_id"]]);
    if (user.empty() || interaction.item_id.empty()) {
      throw MalformedRecord(row.line, "empty user_id or item_id");
    }
    auto rating = parse_double(row.fields[column["rating"]]);
    if (!rating) throw MalformedRecord(row.line, "rating is not a number");
    interaction.rating = *rating;
    interaction.timestamp = trim(row.fields[column["timestamp"]]);
    auto epoch = parse_iso8601(interaction.timestamp);
    if (!epoch) throw MalformedRecord(row.line, "timestamp is not ISO-8601");
    interaction.epoch_seconds = *epoch;
    if (!catalog.contains(interaction.item_id)) {
      ++out.dropped_unknown_items;
      continue;
    }
    out.by_user[user].push_back(std::move(interaction));
  }
  for (auto& [_, list] : out.by_user) {
    std::stable_sort(list.begin(), list.end(), [](const Interaction& a, const Interaction& b) {
      return a.epoch_seconds < b.epoch_seconds;
    });
  }
  return out;
}

}  // namespace fair_agents
