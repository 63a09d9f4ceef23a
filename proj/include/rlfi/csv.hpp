#ifndef RLFI_CSV_HPP_
#define RLFI_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace rlfi {

// %.12g, the precision used for every numeric report column.
std::string format_g12(double v);

// Shortest text that parses back to exactly `v`.
std::string format_exact(double v);

// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

std::string csv_row(const std::vector<std::string>& fields);

struct CsvRecord {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line the record starts on
};

// RFC 4180 reader. Accepts LF or CRLF; a trailing newline is optional.
// Throws ParseError with the 1-based line of the problem.
std::vector<CsvRecord> parse_csv(std::string_view text);

// Whole-string conversions; throw ParseError(line, ...).
double parse_real(const std::string& s, int line, std::string_view column);
long long parse_integer(const std::string& s, int line, std::string_view column);

}  // namespace rlfi

#endif  // RLFI_CSV_HPP_
