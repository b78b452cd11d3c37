#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace edabm {

/// Wall-clock instant at minute resolution. Event-log times are naive local
/// times; no timezone arithmetic is applied anywhere.
using TimePoint = std::chrono::sys_time<std::chrono::minutes>;

/// Accepts `YYYY-MM-DDTHH:MM` or `YYYY-MM-DD HH:MM`, optionally followed by
/// `:SS` or `:SS.fff`; seconds are floored away.
std::optional<TimePoint> parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM`.
std::string format_timestamp(TimePoint t);

/// Origin of simulated clocks when written as timestamps (midnight, so that
/// minute offsets map directly onto the hour-of-day arrival table).
inline constexpr TimePoint kSimulationEpoch{std::chrono::sys_days{
    std::chrono::year{2000} / std::chrono::January / 1}};

inline TimePoint sim_minute_to_timestamp(std::int64_t minute) {
  return kSimulationEpoch + std::chrono::minutes{minute};
}

inline std::int64_t timestamp_to_sim_minute(TimePoint t) {
  return (t - kSimulationEpoch).count();
}

}  // namespace edabm
