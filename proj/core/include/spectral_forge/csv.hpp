#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by every CSV export: 17-significant-digit numbers and a
// block of "# key=value" metadata lines ahead of the column header.
namespace spectral_forge::csv {

std::string format_double(double v);
double parse_double(std::string_view token);

using Metadata = std::map<std::string, std::string>;

void write_metadata(std::ostream& out, const Metadata& meta);

struct Table {
  Metadata metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Parses '#' metadata, one header line and numeric rows. Throws ParseError
// with the offending line number.
Table read_table(std::istream& in);

}  // namespace spectral_forge::csv
