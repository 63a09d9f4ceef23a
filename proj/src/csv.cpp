#include "rlfi/csv.hpp"

#include <charconv>
#include <cstdio>

#include "rlfi/errors.hpp"

namespace rlfi {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> rows;
  std::vector<std::string> row;
  std::string field;
  int line = 1;
  int row_line = 1;
  std::size_t i = 0;
  bool row_open = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back({std::move(row), row_line});
    row.clear();
    row_open = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (!row_open) row_line = line;
    row_open = true;
    if (c == '"' && field.empty()) {
      const int start_line = line;
      ++i;
      while (true) {
        if (i >= text.size()) throw ParseError(start_line, "unterminated quoted field");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field += text[i++];
      }
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        throw ParseError(line, "unexpected character after closing quote");
      }
      continue;
    }
    if (c == '"') throw ParseError(line, "quote inside unquoted field");
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_row();
      i += 2;
      ++line;
    } else if (c == '\n') {
      end_row();
      ++i;
      ++line;
    } else {
      field += c;
      ++i;
    }
  }
  if (row_open) end_row();
  return rows;
}

double parse_real(const std::string& s, int line, std::string_view column) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(line, std::string(column) + ": '" + s + "' is not a number");
  }
  return v;
}

long long parse_integer(const std::string& s, int line, std::string_view column) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(line, std::string(column) + ": '" + s + "' is not an integer");
  }
  return v;
}

}  // namespace rlfi
