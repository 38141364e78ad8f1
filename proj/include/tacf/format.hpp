#pragma once

#include <string>

namespace tacf {

/// Decimal text with 12 significant digits ("%.12g").
std::string format_real(double value);

/// `value` rounded to 12 significant digits, so that shortest-round-trip
/// printers emit at most 12 digits.
double round12(double value);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on failure.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tacf
