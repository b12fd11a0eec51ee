#pragma once

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmimo {

/// Shortest decimal form that round-trips a double exactly.
inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

/// Scientific notation with 17 significant digits (round-trip safe).
inline std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return std::string(buf);
}

inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::string(buf);
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

inline std::string expect_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error(std::string("unexpected end of input, expected ") +
                             what);
  }
  return line;
}

inline double parse_double(const std::string& tok) {
  std::size_t pos = 0;
  const double v = std::stod(tok, &pos);
  if (pos != tok.size()) {
    throw std::runtime_error("malformed number: '" + tok + "'");
  }
  return v;
}

inline unsigned long long parse_uint(const std::string& tok) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(tok, &pos);
  if (pos != tok.size()) {
    throw std::runtime_error("malformed integer: '" + tok + "'");
  }
  return v;
}

}  // namespace dmimo
