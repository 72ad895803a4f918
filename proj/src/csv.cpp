#include "lnmix/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "lnmix/errors.hpp"

namespace lnmix::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& field, const std::string& context) {
  if (field.empty()) throw ParseError(context + ": empty numeric field");
  const char* begin = field.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + field.size()) {
    throw ParseError(context + ": not a number: '" + field + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(context + ": non-finite value: '" + field + "'");
  }
  return v;
}

long parse_long(const std::string& field, const std::string& context) {
  if (field.empty()) throw ParseError(context + ": empty integer field");
  const char* begin = field.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end != begin + field.size()) {
    throw ParseError(context + ": not an integer: '" + field + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw ParseError("write failed: " + path);
}

}  // namespace lnmix::csv
