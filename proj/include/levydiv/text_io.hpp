#pragma once

#include <initializer_list>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace levydiv {

/// a, a + step, ... up to b inclusive (with a 1e-9 * step slack).
std::vector<double> grid_points(double a, double b, double step);

/// Number formatted with 12 significant digits.
std::string format_number(double v);

void write_csv_row(std::ostream& os, std::initializer_list<double> values);
void write_csv_row(std::ostream& os, const std::vector<double>& values);

/// Ordered flat `key = value` records.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(std::ostream& os, const KeyValues& kv);
/// Parses `key = value` lines, skipping blanks and '#' comments.
std::map<std::string, std::string> read_key_values(std::istream& is);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace levydiv
