#pragma once

#include <compare>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edabm/activity.hpp"
#include "edabm/timestamp.hpp"

namespace edabm {

/// One row of the event log: `stay_id,activity,timestamp`.
struct StayEvent {
  std::string stay_id;
  Activity activity = Activity::Arrival;
  TimePoint timestamp{};

  bool operator==(const StayEvent&) const = default;
};

/// An activity together with the minutes attributed to it. In a raw
/// trajectory this is the recorded gap since the previous event (waiting plus
/// execution); after cleaning it is the execution-time estimate.
struct Step {
  Activity activity = Activity::Triage;
  double minutes = 0.0;

  bool operator==(const Step&) const = default;
};

/// Arrival is implicit: steps start with the first activity after arrival and
/// end with discharge.
struct RawTrajectory {
  std::string stay_id;
  TimePoint arrival{};
  std::vector<Step> steps;
};

struct CleanTrajectory {
  std::string stay_id;
  std::vector<Step> steps;

  double total_minutes() const noexcept;
  bool operator==(const CleanTrajectory&) const = default;
};

/// Ordered activity pair (A, B): the step into B from its predecessor A.
struct Transition {
  Activity from = Activity::Arrival;
  Activity to = Activity::Triage;

  auto operator<=>(const Transition&) const = default;
};

/// Transition of step `index`; the predecessor of step 0 is arrival.
Transition transition_at(std::span<const Step> steps, std::size_t index);

/// Median and median absolute deviation of one transition's recorded
/// durations. `mad` is the median of |tau - median|, the robust scale that
/// pairs with the 0.6745 / 1.4826 normal-consistency constants.
struct TransitionStat {
  double median = 0.0;
  double mad = 0.0;
  std::size_t support = 0;
};

using TransitionStats = std::map<Transition, TransitionStat>;

inline constexpr double kDefaultZThreshold = 3.0;
inline constexpr double kZScoreScale = 0.6745;
inline constexpr double kMadToSigma = 1.4826;

// ---- parsing / reconstruction --------------------------------------------

/// Parses the event-log CSV. Throws ParseError on malformed rows, unknown
/// activities, or a second arrival for the same stay.
std::vector<StayEvent> parse_event_log(std::istream& in);
void write_event_log(std::ostream& out, std::span<const StayEvent> events);

/// Groups events by stay (first-appearance order) and turns consecutive
/// timestamps into step durations. Equal timestamps keep input order.
std::vector<RawTrajectory> extract_trajectories(
    std::span<const StayEvent> events);

// ---- temporal conformance --------------------------------------------------

TransitionStats compute_transition_stats(
    std::span<const RawTrajectory> trajectories);

/// 0.6745 (tau - median) / mad. With mad == 0 any tau above the median is a
/// deviation (+inf) and any tau below it is -inf.
double modified_zscore(double tau, double median, double mad);

/// median + k * 1.4826 * mad: the value a deviating duration is clamped to.
double conformance_bound(const TransitionStat& stat, double k);

/// Replaces every recorded duration whose modified z-score exceeds `k` with
/// the conformance bound; conforming durations are copied unchanged.
CleanTrajectory remove_waiting_times(const RawTrajectory& raw,
                                     const TransitionStats& stats,
                                     double k = kDefaultZThreshold);

std::vector<CleanTrajectory> remove_waiting_times(
    std::span<const RawTrajectory> raw, const TransitionStats& stats,
    double k = kDefaultZThreshold);

// ---- file formats ---------------------------------------------------------

/// `stay_id,step_index,activity,duration_min`
void write_clean_trajectories(std::ostream& out,
                              std::span<const CleanTrajectory> trajectories);
std::vector<CleanTrajectory> read_clean_trajectories(std::istream& in);

/// `from,to,median_min,mad_min,support`
void write_transition_stats(std::ostream& out, const TransitionStats& stats);

}  // namespace edabm
