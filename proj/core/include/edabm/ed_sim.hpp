#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edabm/activity.hpp"
#include "edabm/patient_pool.hpp"
#include "edabm/rng.hpp"

namespace edabm {

inline constexpr std::int64_t kMinutesPerHour = 60;
inline constexpr std::int64_t kMinutesPerDay = 24 * kMinutesPerHour;

/// System conditions of the ED environment.
struct EDEnvironmentParams {
  /// Mean arrivals per hour, indexed by clock hour 0..23.
  std::array<double, 24> hourly_arrival_rate{};
  int bed_capacity = 1;
  int clinician_capacity = 1;
  int imaging_capacity = 1;
  /// Whole minutes added to every execution of the keyed activity.
  std::map<Activity, int> workflow_delays;
  int tick_minutes = 1;

  /// Throws ValidationError on negative rates or delays, or capacities < 1.
  void validate() const;

  int delay_for(Activity a) const noexcept;
  /// Slots of a seizable resource; unlimited for ResourceClass::None.
  int capacity(ResourceClass rc) const noexcept;

  bool operator==(const EDEnvironmentParams&) const = default;
};

/// Baseline parameters with an optional perturbed set that is in effect on
/// the half-open minute interval [start, end).
class ParamSchedule {
 public:
  explicit ParamSchedule(EDEnvironmentParams baseline);
  ParamSchedule(EDEnvironmentParams baseline, EDEnvironmentParams perturbed,
                std::int64_t start_minute, std::int64_t end_minute);

  const EDEnvironmentParams& baseline() const noexcept { return baseline_; }
  const EDEnvironmentParams& at(std::int64_t minute) const noexcept;
  bool has_overlay() const noexcept { return overlay_.has_value(); }

 private:
  struct Overlay {
    EDEnvironmentParams params;
    std::int64_t start;
    std::int64_t end;
  };
  EDEnvironmentParams baseline_;
  std::optional<Overlay> overlay_;
};

/// A discharged simulated stay.
struct SyntheticStay {
  SimStayId id;
  std::string source_patient_id;
  /// Index into the pool the stay was sampled from; npos when read from file.
  std::size_t source_index = std::numeric_limits<std::size_t>::max();
  std::int64_t arrival_minute = 0;
  std::int64_t discharge_minute = 0;
  double simulated_los_hours = 0.0;
  int simulated_label = 0;
  int acuity = 0;
  Disposition disposition = Disposition::Home;
  std::int64_t execution_minutes = 0;
  std::int64_t bed_wait_minutes = 0;
  /// Bed wait plus the waits before each activity.
  std::int64_t total_wait_minutes = 0;
  std::vector<std::int32_t> step_wait_minutes;
};

using SyntheticDataset = std::vector<SyntheticStay>;

/// State observed at the end of every tick.
struct TickSnapshot {
  std::int64_t minute = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t discharges = 0;
  std::size_t waiting = 0;
  std::size_t bedded = 0;
  int clinicians_busy = 0;
  int imaging_busy = 0;
  const EDEnvironmentParams* params = nullptr;

  std::size_t census() const noexcept { return waiting + bedded; }
};

using TickObserver = std::function<void(const TickSnapshot&)>;

/// Rounds execution durations to whole minutes on the cumulative sum, so the
/// quantised total differs from the exact total by at most half a minute.
std::vector<std::int32_t> quantize_durations(std::span<const Step> steps);

/// Number of arrivals in one tick: Poisson with mean
/// rate[clock_hour] * tick_minutes / 60.
int generate_arrivals(const EDEnvironmentParams& params, int clock_hour,
                      Rng& rng);

struct WaitingPatient {
  SimStayId id;
  int acuity = 0;
  std::int64_t arrival_minute = 0;
};

/// Removes from `queue` and returns up to `free_beds` patients in priority
/// order: acuity ascending (1 is most urgent), then arrival, then id. The
/// remaining queue keeps its order.
std::vector<WaitingPatient> assign_beds(std::vector<WaitingPatient>& queue,
                                        int free_beds);

/// The agent-based ED. Each tick runs three phases in order: arrivals, bed
/// assignment, treatment. Activities only begin once a bed is assigned, and
/// clinician/imaging activities additionally hold one slot of their resource
/// for their whole execution.
class EmergencyDepartment {
 public:
  EmergencyDepartment(const ParamSchedule& schedule, const PatientPool& pool,
                      std::uint64_t seed, std::uint32_t run_id = 0,
                      double los_threshold_hours = kDefaultLosThreshold);

  std::int64_t now() const noexcept { return now_; }

  /// Phase 1. Draws this tick's arrivals and queues them for a bed.
  int arrivals_phase();
  /// Phase 2. Fills free beds from the waiting queue.
  std::size_t bed_phase();
  /// Phase 3. Completes finished activities, then starts pending activities
  /// in (acuity, bed time, id) priority wherever a slot is free.
  void treatment_phase();

  /// Moves the clock to the next tick.
  void advance_clock() noexcept;

  /// Runs the three phases (arrivals only when `accept_arrivals`), then
  /// advances the clock by one tick.
  void step(bool accept_arrivals = true);

  /// Queues a specific pool record as arriving now. For scripted scenarios.
  SimStayId admit(std::size_t record_index);

  bool empty() const noexcept { return waiting_.empty() && bedded_.empty(); }
  TickSnapshot snapshot() const;

  /// Discharged stays since the last call, in discharge order.
  std::vector<SyntheticStay> take_discharged();

 private:
  struct Occupant {
    SimStayId id;
    std::size_t record = 0;
    int acuity = 0;
    std::int64_t arrival = 0;
    std::int64_t bed_at = -1;
    std::size_t cursor = 0;
    std::int64_t ready_at = 0;
    std::int64_t activity_end = -1;
    ResourceClass holding = ResourceClass::None;
    std::int64_t exec_total = 0;
    std::int64_t wait_total = 0;
    std::vector<std::int32_t> step_waits;
  };

  const std::vector<std::int32_t>& base_durations(std::size_t record);
  void queue_arrival(std::size_t record_index);
  void start_pending(Occupant& p, const EDEnvironmentParams& params);
  void discharge(Occupant& p);
  int& busy(ResourceClass rc) noexcept;

  const ParamSchedule& schedule_;
  const PatientPool& pool_;
  std::uint32_t run_id_;
  double los_threshold_;
  std::int64_t now_ = 0;

  Rng arrival_rng_;
  Rng sample_rng_;
  Rng surplus_arrival_rng_;
  Rng surplus_sample_rng_;
  Rng thinning_rng_;

  std::vector<std::vector<std::int32_t>> durations_;
  std::vector<Occupant> patients_;  // indexed by SimStayId::seq
  std::vector<WaitingPatient> waiting_;
  std::vector<std::uint64_t> bedded_;  // seqs, kept in priority order
  int clinicians_busy_ = 0;
  int imaging_busy_ = 0;
  int unlimited_ = 0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t discharges_ = 0;
  std::vector<SyntheticStay> discharged_;
};

struct SimulationOptions {
  /// Arrivals are generated on [0, horizon); the run then drains until the
  /// ED is empty.
  std::int64_t horizon_minutes = 0;
  /// Stays arriving before this minute are discarded.
  std::int64_t warmup_minutes = 0;
  std::uint64_t seed = 0;
  std::uint32_t run_id = 0;
  double los_threshold_hours = kDefaultLosThreshold;
  TickObserver observer;
};

/// One stochastic run. Returns the stays that arrived on [warmup, horizon),
/// ordered by arrival sequence. Deterministic for fixed inputs and seed.
SyntheticDataset run_simulation(const ParamSchedule& schedule,
                                const PatientPool& pool,
                                const SimulationOptions& options);

SyntheticDataset run_simulation(const EDEnvironmentParams& params,
                                const PatientPool& pool,
                                const SimulationOptions& options);

// ---- file format ----------------------------------------------------------

/// `run_id,sim_id,source_patient_id,arrival_time,discharge_time,
/// simulated_los_hours,simulated_label,acuity,disposition,total_wait_min`
void write_dataset_header(std::ostream& out);
void write_dataset_rows(std::ostream& out, std::span<const SyntheticStay> stays);
std::vector<SyntheticStay> read_dataset(std::istream& in);

}  // namespace edabm
