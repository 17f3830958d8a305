#pragma once

#include <string>
#include <vector>

namespace epipanel::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// RFC-4180-ish reader: quoted fields, embedded commas/quotes/newlines.
Table read_file(const std::string& path);
Table parse(const std::string& text);

std::string escape(const std::string& field);

// Canonical numeric formatting for result files; shortest round-trippable
// representation so identical runs emit identical bytes.
std::string format_number(double v);

}  // namespace epipanel::csv
