#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bbvi::csv {

// Shortest representation that round-trips to the same double. '.' decimal
// separator, no locale involvement.
std::string format_double(double value);

// RFC-style quoting: fields containing commas, quotes, or newlines are
// wrapped in double quotes with embedded quotes doubled.
std::string escape(const std::string& field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Writes an optional "# generated-at ..." comment (suppressed when
// deterministic), then header and rows.
void write(std::ostream& os, const Table& table, bool deterministic);

}  // namespace bbvi::csv
