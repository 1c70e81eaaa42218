#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace soak::csv {

// Whole-file reader: quoted fields, embedded commas/quotes/newlines, CRLF
// line ends. Every record keeps its raw field strings.
std::vector<std::vector<std::string>> read_file(const std::string& path);
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes a field only when it needs quoting.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Shortest round-trip decimal form (%.17g trimmed via re-parse).
std::string format_double(double value);
// Fixed display form, e.g. format_fixed(1.25, 1) == "1.2".
std::string format_fixed(double value, int decimals);

// strtod-based; ok reports full-field consumption of a finite-or-inf/nan
// literal. Callers reject non-finite values themselves where needed.
double parse_double(std::string_view text, bool& ok);

}  // namespace soak::csv
