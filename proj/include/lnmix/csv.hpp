#pragma once

#include <string>
#include <vector>

namespace lnmix::csv {

// Splits one CSV line on commas. No quoting support: none of the formats
// written by this project ever needs it (labels contain no commas).
std::vector<std::string> split(const std::string& line);

// Parses a double, requiring the whole field to be consumed and the value
// to be finite. Throws ParseError mentioning `context` otherwise.
double parse_double(const std::string& field, const std::string& context);

long parse_long(const std::string& field, const std::string& context);

// Shortest-width formatting that still round-trips exactly (%.17g).
std::string format_double(double v);

// Reads all lines of a text file; throws ParseError if it cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

void write_text(const std::string& path, const std::string& content);

}  // namespace lnmix::csv
