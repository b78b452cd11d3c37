#include "edabm/eventlog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"
#include "edabm/stats.hpp"

namespace edabm {

double CleanTrajectory::total_minutes() const noexcept {
  return std::accumulate(steps.begin(), steps.end(), 0.0,
                         [](double acc, const Step& s) { return acc + s.minutes; });
}

Transition transition_at(std::span<const Step> steps, std::size_t index) {
  return {index == 0 ? Activity::Arrival : steps[index - 1].activity,
          steps[index].activity};
}

std::vector<StayEvent> parse_event_log(std::istream& in) {
  CsvReader csv(in);
  csv.expect_header({"stay_id", "activity", "timestamp"});
  std::vector<StayEvent> events;
  std::unordered_set<std::string> arrived;
  while (csv.next()) {
    StayEvent ev;
    ev.stay_id = std::string(csv.field(0));
    if (ev.stay_id.empty()) {
      throw ParseError(csv.line(), "stay_id", "empty identifier");
    }
    const auto activity = parse_activity(csv.field(1));
    if (!activity) {
      throw ParseError(csv.line(), "activity",
                       "unknown activity '" + std::string(csv.field(1)) +
                           "'; allowed: " + std::string(activity_names()));
    }
    ev.activity = *activity;
    const auto ts = parse_timestamp(csv.field(2));
    if (!ts) {
      throw ParseError(csv.line(), "timestamp",
                       "not an ISO-8601 minute timestamp: '" +
                           std::string(csv.field(2)) + "'");
    }
    ev.timestamp = *ts;
    if (ev.activity == Activity::Arrival && !arrived.insert(ev.stay_id).second) {
      throw ParseError(csv.line(), "activity",
                       "duplicate arrival for stay '" + ev.stay_id + "'");
    }
    events.push_back(std::move(ev));
  }
  return events;
}

void write_event_log(std::ostream& out, std::span<const StayEvent> events) {
  out << "stay_id,activity,timestamp\n";
  for (const auto& ev : events) {
    out << ev.stay_id << ',' << to_string(ev.activity) << ','
        << format_timestamp(ev.timestamp) << '\n';
  }
}

std::vector<RawTrajectory> extract_trajectories(
    std::span<const StayEvent> events) {
  std::unordered_map<std::string_view, std::size_t> index;
  std::vector<std::vector<const StayEvent*>> groups;
  for (const auto& ev : events) {
    auto [it, inserted] = index.try_emplace(ev.stay_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&ev);
  }

  std::vector<RawTrajectory> out;
  out.reserve(groups.size());
  for (auto& group : groups) {
    const std::string& id = group.front()->stay_id;
    const auto count = [&](Activity a) {
      return std::count_if(group.begin(), group.end(),
                           [a](const StayEvent* e) { return e->activity == a; });
    };
    if (count(Activity::Arrival) == 0) {
      throw ValidationError("stay '" + id + "' has no arrival event");
    }
    if (count(Activity::Discharge) == 0) {
      throw ValidationError("stay '" + id + "' has no discharge event");
    }
    if (count(Activity::Arrival) > 1 || count(Activity::Discharge) > 1) {
      throw ValidationError("stay '" + id +
                            "' has more than one arrival or discharge event");
    }
    std::stable_sort(group.begin(), group.end(),
                     [](const StayEvent* a, const StayEvent* b) {
                       return a->timestamp < b->timestamp;
                     });
    if (group.front()->activity != Activity::Arrival ||
        group.back()->activity != Activity::Discharge) {
      throw ValidationError(
          "stay '" + id +
          "' has non-monotone timestamps: events recorded before arrival or "
          "after discharge");
    }
    RawTrajectory traj;
    traj.stay_id = id;
    traj.arrival = group.front()->timestamp;
    traj.steps.reserve(group.size() - 1);
    for (std::size_t i = 1; i < group.size(); ++i) {
      const auto gap = group[i]->timestamp - group[i - 1]->timestamp;
      traj.steps.push_back(
          {group[i]->activity, static_cast<double>(gap.count())});
    }
    out.push_back(std::move(traj));
  }
  return out;
}

TransitionStats compute_transition_stats(
    std::span<const RawTrajectory> trajectories) {
  if (trajectories.empty()) {
    throw ValidationError("transition statistics need at least one trajectory");
  }
  std::map<Transition, std::vector<double>> samples;
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      samples[transition_at(t.steps, i)].push_back(t.steps[i].minutes);
    }
  }
  TransitionStats stats;
  for (auto& [key, values] : samples) {
    TransitionStat s;
    s.support = values.size();
    s.median = median(values);
    for (double& v : values) v = std::abs(v - s.median);
    s.mad = median(std::move(values));
    stats.emplace(key, s);
  }
  return stats;
}

double modified_zscore(double tau, double median, double mad) {
  if (!(mad >= 0.0)) {
    throw ValidationError("median absolute deviation must be non-negative");
  }
  if (mad == 0.0) {
    if (tau == median) return 0.0;
    return tau > median ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
  }
  return kZScoreScale * (tau - median) / mad;
}

double conformance_bound(const TransitionStat& stat, double k) {
  return stat.median + k * (kMadToSigma * stat.mad);
}

CleanTrajectory remove_waiting_times(const RawTrajectory& raw,
                                     const TransitionStats& stats, double k) {
  CleanTrajectory clean{raw.stay_id, raw.steps};
  for (std::size_t i = 0; i < clean.steps.size(); ++i) {
    const Transition key = transition_at(raw.steps, i);
    const auto it = stats.find(key);
    if (it == stats.end()) {
      throw ValidationError("no transition statistics for (" +
                            std::string(to_string(key.from)) + ", " +
                            std::string(to_string(key.to)) + ") in stay '" +
                            raw.stay_id + "'");
    }
    const TransitionStat& s = it->second;
    if (modified_zscore(raw.steps[i].minutes, s.median, s.mad) > k) {
      clean.steps[i].minutes = conformance_bound(s, k);
    }
  }
  return clean;
}

std::vector<CleanTrajectory> remove_waiting_times(
    std::span<const RawTrajectory> raw, const TransitionStats& stats,
    double k) {
  std::vector<CleanTrajectory> out;
  out.reserve(raw.size());
  for (const auto& t : raw) out.push_back(remove_waiting_times(t, stats, k));
  return out;
}

void write_clean_trajectories(std::ostream& out,
                              std::span<const CleanTrajectory> trajectories) {
  out << "stay_id,step_index,activity,duration_min\n";
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      out << t.stay_id << ',' << i << ',' << to_string(t.steps[i].activity)
          << ',' << format_number(t.steps[i].minutes) << '\n';
    }
  }
}

std::vector<CleanTrajectory> read_clean_trajectories(std::istream& in) {
  CsvReader csv(in);
  csv.expect_header({"stay_id", "step_index", "activity", "duration_min"});
  std::vector<CleanTrajectory> out;
  std::unordered_map<std::string, std::size_t> index;
  while (csv.next()) {
    const std::string id(csv.field(0));
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) out.push_back({id, {}});
    auto& traj = out[it->second];
    const auto step_index = csv.integer(1);
    if (step_index != static_cast<std::int64_t>(traj.steps.size())) {
      throw ParseError(csv.line(), "step_index",
                       "steps of stay '" + id + "' must be contiguous from 0");
    }
    const auto activity = parse_activity(csv.field(2));
    if (!activity || *activity == Activity::Arrival) {
      throw ParseError(csv.line(), "activity",
                       "invalid trajectory activity '" +
                           std::string(csv.field(2)) + "'");
    }
    const double minutes = csv.number(3);
    if (!(minutes >= 0.0) || !std::isfinite(minutes)) {
      throw ParseError(csv.line(), "duration_min",
                       "duration must be finite and non-negative");
    }
    traj.steps.push_back({*activity, minutes});
  }
  return out;
}

void write_transition_stats(std::ostream& out, const TransitionStats& stats) {
  out << "from,to,median_min,mad_min,support\n";
  for (const auto& [key, s] : stats) {
    out << to_string(key.from) << ',' << to_string(key.to) << ','
        << format_number(s.median) << ',' << format_number(s.mad) << ','
        << s.support << '\n';
  }
}

}  // namespace edabm
