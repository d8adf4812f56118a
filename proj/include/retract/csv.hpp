#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace retract::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain commas, quotes ("") and
/// newlines. Blank lines are skipped. Throws retract::Error on an
/// unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace retract::csv
