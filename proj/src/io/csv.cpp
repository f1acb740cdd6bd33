#include "fair_agents/io/csv.hpp"

#include "fair_agents/core/errors.hpp"

namespace fair_agents::csv {

std::vector<Row> read(std::istream& in) {
  std::vector<Row> rows;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    bool row_done = false;
    bool any_content = false;
    while (i < text.size() && !row_done) {
      const char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          quoted = false;
          after_quote = true;
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || after_quote) throw MalformedRecord(line, "stray quote");
          quoted = true;
          any_content = true;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          after_quote = false;
          any_content = true;
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row_done = true;
          break;
        default:
          if (after_quote) throw MalformedRecord(line, "text after closing quote");
          field.push_back(c);
          any_content = true;
      }
      ++i;
    }
    if (quoted) throw MalformedRecord(row.line, "unterminated quoted field");
    if (!any_content) continue;
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace fair_agents::csv
