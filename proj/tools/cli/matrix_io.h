#pragma once

#include <string>
#include <string_view>

#include "polytrace/matrix.h"
#include "polytrace/scalar.h"

namespace polytrace::cli {

// Plain CSV, one matrix row per line, no header. Cells are decimal
// literals (with optional exponent) or rationals a/b. Blank lines are
// ignored; ragged rows are an error.

Matrix<Rational> parse_matrix_rational(std::string_view text);
/// Decimal cells go through std::from_chars, so they round correctly.
Matrix<double> parse_matrix_double(std::string_view text);

std::string format_matrix(const Matrix<Rational>& a);
/// Shortest round-trip decimal for each entry.
std::string format_matrix(const Matrix<double>& a);

/// Whole file contents; throws IoError when it cannot be read.
std::string read_text_file(const std::string& path);

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a partial file behind.
void write_text_file_atomic(const std::string& path, const std::string& contents);

}  // namespace polytrace::cli
