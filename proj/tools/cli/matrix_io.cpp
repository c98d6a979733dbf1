#include "cli/matrix_io.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli/errors.h"
#include "polytrace/error.h"

namespace polytrace::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::vector<std::string>> split_cells(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      cells.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && cells.size() != rows.front().size())
      throw UsageError("csv row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw UsageError("csv matrix is empty");
  return rows;
}

template <class T, class Parse>
Matrix<T> parse_with(std::string_view text, Parse parse) {
  const auto rows = split_cells(text);
  Matrix<T> out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const auto& cell = rows[r][c];
      if (cell.empty())
        throw UsageError("empty csv cell at row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      try {
        out(r, c) = parse(cell);
      } catch (const polytrace::Error& e) {
        throw UsageError("bad csv cell '" + cell + "': " + e.what());
      }
    }
  return out;
}

double parse_double_cell(const std::string& cell) {
  if (cell.find('/') != std::string::npos) return parse_rational(cell).get_d();
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw polytrace::Error("not a number");
  return v;
}

template <class T, class Format>
std::string format_with(const Matrix<T>& a, Format format) {
  std::string out;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (c > 0) out += ',';
      out += format(a(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

Matrix<Rational> parse_matrix_rational(std::string_view text) {
  return parse_with<Rational>(text, [](const std::string& cell) { return parse_rational(cell); });
}

Matrix<double> parse_matrix_double(std::string_view text) {
  return parse_with<double>(text, parse_double_cell);
}

std::string format_matrix(const Matrix<Rational>& a) {
  return format_with(a, [](const Rational& v) { return v.get_str(); });
}

std::string format_matrix(const Matrix<double>& a) {
  return format_with(a, [](double v) { return ScalarTraits<double>::to_string(v); });
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw UsageError("cannot read '" + path + "'");
  return buf.str();
}

void write_text_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << contents;
    out.close();
    if (!out) {
      std::remove(tmp.c_str());
      throw UsageError("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw UsageError("cannot write '" + path + "': " + ec.message());
  }
}

}  // namespace polytrace::cli
