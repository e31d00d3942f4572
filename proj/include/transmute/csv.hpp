#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace transmute::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format(double v);

/// Writes one row; fields are emitted verbatim, comma separated.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws if missing
};

Table read(std::istream& in);

double to_double(const std::string& field);

}  // namespace transmute::csv
