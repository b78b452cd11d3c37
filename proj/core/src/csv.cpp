#include "edabm/csv.hpp"

#include <charconv>
#include <cmath>

#include "edabm/error.hpp"

namespace edabm {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvReader::CsvReader(std::istream& in) : in_(in) {
  std::string line;
  if (!read_line(line)) throw ParseError(1, "header", "missing header row");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  for (auto f : split(line, ',')) header_.emplace_back(f);
}

bool CsvReader::read_line(std::string& out) {
  while (std::getline(in_, out)) {
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    if (out.empty() || out.front() == '#') continue;
    return true;
  }
  return false;
}

std::size_t CsvReader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ParseError(line_, std::string(name), "column missing from header");
}

void CsvReader::expect_header(
    const std::vector<std::string_view>& expected) const {
  bool same = expected.size() == header_.size();
  for (std::size_t i = 0; same && i < expected.size(); ++i) {
    same = expected[i] == header_[i];
  }
  if (!same) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
    throw ParseError(line_, "header", "expected header '" + want + "'");
  }
}

bool CsvReader::next() {
  if (!read_line(current_)) return false;
  fields_ = split(current_, ',');
  if (fields_.size() != header_.size()) {
    throw ParseError(line_, "row",
                     "expected " + std::to_string(header_.size()) +
                         " fields, found " + std::to_string(fields_.size()));
  }
  return true;
}

double CsvReader::number(std::size_t index) const {
  const std::string_view text = field(index);
  if (text == "inf") return INFINITY;
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} ||
      res.ptr != text.data() + text.size()) {
    throw ParseError(line_, header_[index],
                     "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t CsvReader::integer(std::size_t index) const {
  const std::string_view text = field(index);
  std::int64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} ||
      res.ptr != text.data() + text.size()) {
    throw ParseError(line_, header_[index],
                     "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace edabm
