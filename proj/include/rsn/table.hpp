#pragma once

// Column-named record emission: CSV with 17-significant-digit numbers and
// '\n' line ends, or JSON as an array of objects with the same field names.
// Numeric text never depends on the global locale.

#include <cmath>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "common.hpp"

namespace rsn {

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;  // each row matches header in length
};

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

inline std::string cell_csv(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return fmt17(*d);
  return csv_quote(std::get<std::string>(c));
}

inline std::string cell_json(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return "null";
    return fmt17(*d);
  }
  return json_quote(std::get<std::string>(c));
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_quote(t.header[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += detail::cell_csv(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const Table& t) {
  std::string out = "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",\n " : "\n ";
    out += '{';
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      if (i) out += ',';
      out += detail::json_quote(t.header[i]);
      out += ':';
      out += detail::cell_json(t.rows[r][i]);
    }
    out += '}';
  }
  out += t.rows.empty() ? "]\n" : "\n]\n";
  return out;
}

}  // namespace rsn
