#include "edabm/timestamp.hpp"

#include <charconv>
#include <cstdio>

namespace edabm {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width,
              int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto res = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return res.ec == std::errc{};
}

}  // namespace

std::optional<TimePoint> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  // 0123456789012345
  // YYYY-MM-DDTHH:MM
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  if (text.size() < 16) return std::nullopt;
  if (!read_int(text, 0, 4, y) || text[4] != '-' || !read_int(text, 5, 2, mo) ||
      text[7] != '-' || !read_int(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != ' ') || !read_int(text, 11, 2, h) ||
      text[13] != ':' || !read_int(text, 14, 2, mi)) {
    return std::nullopt;
  }
  if (text.size() > 16) {
    int s = 0;
    if (text[16] != ':' || !read_int(text, 17, 2, s) || s > 60) {
      return std::nullopt;
    }
    if (text.size() > 19) {
      if (text[19] != '.' || text.size() == 20) return std::nullopt;
      for (std::size_t i = 20; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
      }
    }
  }
  if (h > 23 || mi > 59) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return TimePoint{sys_days{ymd}} + hours{h} + minutes{mi};
}

std::string format_timestamp(TimePoint t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const auto in_day = t - day_start;
  const auto h = duration_cast<hours>(in_day).count();
  const auto mi = (in_day - hours{h}).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h),
                static_cast<int>(mi));
  return buf;
}

}  // namespace edabm
