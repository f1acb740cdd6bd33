#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace fair_agents::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF tolerated. Blank lines are skipped.
// Throws MalformedRecord on an unterminated quote or stray quote.
std::vector<Row> read(std::istream& in);

// Quotes the field if it contains a comma, quote, or line break.
std::string escape(std::string_view field);

}  // namespace fair_agents::csv
