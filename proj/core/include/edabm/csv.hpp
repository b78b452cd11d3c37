#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace edabm {

/// Minimal reader for the comma-separated interchange files. Fields never
/// contain commas or quotes (list values use ';'), so no quoting is handled.
/// Lines starting with '#' and blank lines are skipped anywhere in the file.
class CsvReader {
 public:
  /// Reads the header row; throws ParseError if the stream has none.
  explicit CsvReader(std::istream& in);

  const std::vector<std::string>& header() const noexcept { return header_; }

  /// Throws ParseError naming the missing column.
  std::size_t column(std::string_view name) const;

  /// Requires the header to equal `expected` exactly.
  void expect_header(const std::vector<std::string_view>& expected) const;

  /// Advances to the next data row. Returns false at end of input. Rows with
  /// a different field count than the header are rejected.
  bool next();

  std::size_t line() const noexcept { return line_; }
  std::string_view field(std::size_t index) const { return fields_.at(index); }

  double number(std::size_t index) const;
  std::int64_t integer(std::size_t index) const;

 private:
  bool read_line(std::string& out);

  std::istream& in_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
  std::string current_;
  std::vector<std::string_view> fields_;
};

std::vector<std::string_view> split(std::string_view text, char sep);

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

}  // namespace edabm
