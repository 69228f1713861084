#ifndef HOBJ_CSV_HPP
#define HOBJ_CSV_HPP

#include <string>
#include <vector>

namespace hobj
{

// RFC-4180 field quoting.
std::string csv_field(const std::string &s);
std::string csv_row(const std::vector<std::string> &fields);
// Shortest text that parses back to the same double; empty for NaN.
std::string format_double(double v);

std::vector<std::vector<std::string>> parse_csv(const std::string &text);

} // namespace hobj

#endif
