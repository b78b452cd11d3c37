#include "edabm/ed_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"
#include "edabm/timestamp.hpp"

namespace edabm {

namespace {

// Stream indices under the per-run seed. Baseline arrivals and their patient
// draws use their own streams so that a run with extra arrivals replays the
// baseline arrivals unchanged and adds the surplus on top.
enum Stream : std::uint64_t {
  kArrivalStream = 1,
  kSampleStream = 2,
  kSurplusArrivalStream = 3,
  kSurplusSampleStream = 4,
  kThinningStream = 5,
};

// Longest drain tolerated after the horizon before the run is declared stuck.
constexpr std::int64_t kMaxDrainMinutes = 365 * kMinutesPerDay;

int poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

auto priority_key(const WaitingPatient& p) {
  return std::tuple(p.acuity, p.arrival_minute, p.id);
}

}  // namespace

void EDEnvironmentParams::validate() const {
  for (double r : hourly_arrival_rate) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw ValidationError("hourly arrival rates must be finite and >= 0");
    }
  }
  if (bed_capacity < 1 || clinician_capacity < 1 || imaging_capacity < 1) {
    throw ValidationError("bed, clinician and imaging capacities must be >= 1");
  }
  for (const auto& [activity, minutes] : workflow_delays) {
    if (minutes < 0) {
      throw ValidationError("workflow delay for " +
                            std::string(to_string(activity)) + " is negative");
    }
  }
  if (tick_minutes < 1) throw ValidationError("tick_minutes must be >= 1");
}

int EDEnvironmentParams::delay_for(Activity a) const noexcept {
  const auto it = workflow_delays.find(a);
  return it == workflow_delays.end() ? 0 : it->second;
}

int EDEnvironmentParams::capacity(ResourceClass rc) const noexcept {
  switch (rc) {
    case ResourceClass::Clinician:
      return clinician_capacity;
    case ResourceClass::Imaging:
      return imaging_capacity;
    default:
      return std::numeric_limits<int>::max();
  }
}

ParamSchedule::ParamSchedule(EDEnvironmentParams baseline)
    : baseline_(std::move(baseline)) {
  baseline_.validate();
}

ParamSchedule::ParamSchedule(EDEnvironmentParams baseline,
                             EDEnvironmentParams perturbed,
                             std::int64_t start_minute, std::int64_t end_minute)
    : baseline_(std::move(baseline)),
      overlay_(Overlay{std::move(perturbed), start_minute, end_minute}) {
  baseline_.validate();
  overlay_->params.validate();
  if (overlay_->params.tick_minutes != baseline_.tick_minutes) {
    throw ValidationError("perturbed parameters must keep the tick size");
  }
  if (end_minute < start_minute) {
    throw ValidationError("overlay window ends before it starts");
  }
}

const EDEnvironmentParams& ParamSchedule::at(std::int64_t minute) const noexcept {
  if (overlay_ && minute >= overlay_->start && minute < overlay_->end) {
    return overlay_->params;
  }
  return baseline_;
}

std::vector<std::int32_t> quantize_durations(std::span<const Step> steps) {
  std::vector<std::int32_t> out;
  out.reserve(steps.size());
  double cumulative = 0.0;
  std::int64_t previous = 0;
  for (const auto& s : steps) {
    cumulative += s.minutes;
    const std::int64_t rounded = std::llround(cumulative);
    out.push_back(static_cast<std::int32_t>(rounded - previous));
    previous = rounded;
  }
  return out;
}

int generate_arrivals(const EDEnvironmentParams& params, int clock_hour,
                      Rng& rng) {
  const double rate = params.hourly_arrival_rate.at(
      static_cast<std::size_t>(clock_hour));
  return poisson(rate * params.tick_minutes / 60.0, rng);
}

std::vector<WaitingPatient> assign_beds(std::vector<WaitingPatient>& queue,
                                        int free_beds) {
  std::vector<WaitingPatient> assigned;
  if (free_beds <= 0 || queue.empty()) return assigned;
  if (static_cast<std::size_t>(free_beds) >= queue.size()) {
    assigned = std::move(queue);
    queue.clear();
    std::sort(assigned.begin(), assigned.end(),
              [](const auto& a, const auto& b) {
                return priority_key(a) < priority_key(b);
              });
    return assigned;
  }
  std::vector<std::size_t> order(queue.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto take = static_cast<std::ptrdiff_t>(free_beds);
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return priority_key(queue[a]) < priority_key(queue[b]);
                    });
  std::vector<char> chosen(queue.size(), 0);
  for (auto it = order.begin(); it != order.begin() + take; ++it) {
    assigned.push_back(queue[*it]);
    chosen[*it] = 1;
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (!chosen[i]) queue[keep++] = queue[i];
  }
  queue.resize(keep);
  return assigned;
}

EmergencyDepartment::EmergencyDepartment(const ParamSchedule& schedule,
                                         const PatientPool& pool,
                                         std::uint64_t seed,
                                         std::uint32_t run_id,
                                         double los_threshold_hours)
    : schedule_(schedule),
      pool_(pool),
      run_id_(run_id),
      los_threshold_(los_threshold_hours),
      arrival_rng_(derive_seed(seed, kArrivalStream)),
      sample_rng_(derive_seed(seed, kSampleStream)),
      surplus_arrival_rng_(derive_seed(seed, kSurplusArrivalStream)),
      surplus_sample_rng_(derive_seed(seed, kSurplusSampleStream)),
      thinning_rng_(derive_seed(seed, kThinningStream)),
      durations_(pool.size()) {}

const std::vector<std::int32_t>& EmergencyDepartment::base_durations(
    std::size_t record) {
  auto& d = durations_[record];
  if (d.empty()) d = quantize_durations(pool_.record(record).trajectory.steps);
  return d;
}

int& EmergencyDepartment::busy(ResourceClass rc) noexcept {
  switch (rc) {
    case ResourceClass::Clinician:
      return clinicians_busy_;
    case ResourceClass::Imaging:
      return imaging_busy_;
    default:
      return unlimited_;
  }
}

void EmergencyDepartment::queue_arrival(std::size_t record_index) {
  const auto& rec = pool_.record(record_index);
  Occupant p;
  p.id = {run_id_, patients_.size()};
  p.record = record_index;
  p.acuity = rec.acuity();
  p.arrival = now_;
  p.step_waits.assign(rec.trajectory.steps.size(), 0);
  waiting_.push_back({p.id, p.acuity, p.arrival});
  patients_.push_back(std::move(p));
  ++arrivals_;
}

SimStayId EmergencyDepartment::admit(std::size_t record_index) {
  if (record_index >= pool_.size()) {
    throw ValidationError("record index outside the patient pool");
  }
  queue_arrival(record_index);
  return patients_.back().id;
}

int EmergencyDepartment::arrivals_phase() {
  const auto& base = schedule_.baseline();
  const auto& effective = schedule_.at(now_);
  const int hour = static_cast<int>((now_ / kMinutesPerHour) % 24);
  const double base_rate = base.hourly_arrival_rate[static_cast<std::size_t>(hour)];
  const double eff_rate =
      effective.hourly_arrival_rate[static_cast<std::size_t>(hour)];

  int admitted = 0;
  const int base_count = generate_arrivals(base, hour, arrival_rng_);
  for (int i = 0; i < base_count; ++i) {
    const std::size_t record = pool_.sample_index(sample_rng_);
    if (eff_rate < base_rate) {
      // Thinning keeps each baseline arrival with probability eff/base.
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(thinning_rng_) * base_rate >= eff_rate) continue;
    }
    queue_arrival(record);
    ++admitted;
  }
  if (eff_rate > base_rate) {
    const int extra = poisson(
        (eff_rate - base_rate) * effective.tick_minutes / 60.0,
        surplus_arrival_rng_);
    for (int i = 0; i < extra; ++i) {
      queue_arrival(pool_.sample_index(surplus_sample_rng_));
      ++admitted;
    }
  }
  return admitted;
}

std::size_t EmergencyDepartment::bed_phase() {
  const auto& params = schedule_.at(now_);
  const int free = params.bed_capacity - static_cast<int>(bedded_.size());
  const auto assigned = assign_beds(waiting_, free);
  for (const auto& w : assigned) {
    Occupant& p = patients_[w.id.seq];
    p.bed_at = now_;
    p.ready_at = now_;
    p.wait_total += now_ - p.arrival;
    const auto key = std::tuple(p.acuity, p.bed_at, p.id);
    const auto pos = std::upper_bound(
        bedded_.begin(), bedded_.end(), key,
        [this](const auto& k, std::uint64_t seq) {
          const Occupant& o = patients_[seq];
          return k < std::tuple(o.acuity, o.bed_at, o.id);
        });
    bedded_.insert(pos, w.id.seq);
  }
  return assigned.size();
}

void EmergencyDepartment::start_pending(Occupant& p,
                                        const EDEnvironmentParams& params) {
  const auto& steps = pool_.record(p.record).trajectory.steps;
  const auto& base = base_durations(p.record);
  while (p.activity_end < 0 && p.cursor < steps.size()) {
    const Activity a = steps[p.cursor].activity;
    const ResourceClass rc = resource_for(a);
    if (rc != ResourceClass::None && busy(rc) >= params.capacity(rc)) return;
    const std::int64_t wait = now_ - p.ready_at;
    if (wait < 0) {
      throw SimulationError("activity would start before its predecessor ended");
    }
    p.step_waits[p.cursor] = static_cast<std::int32_t>(wait);
    p.wait_total += wait;
    const std::int64_t exec = base[p.cursor] + params.delay_for(a);
    p.exec_total += exec;
    if (exec == 0) {
      p.ready_at = now_;
      ++p.cursor;
      continue;
    }
    if (rc != ResourceClass::None) ++busy(rc);
    p.holding = rc;
    p.activity_end = now_ + exec;
  }
}

void EmergencyDepartment::discharge(Occupant& p) {
  const auto& rec = pool_.record(p.record);
  SyntheticStay s;
  s.id = p.id;
  s.source_patient_id = rec.patient_id;
  s.source_index = p.record;
  s.arrival_minute = p.arrival;
  s.discharge_minute = p.ready_at;
  s.simulated_los_hours =
      static_cast<double>(s.discharge_minute - s.arrival_minute) / 60.0;
  s.simulated_label = los_label(s.simulated_los_hours, los_threshold_);
  s.acuity = rec.acuity();
  s.disposition = rec.disposition;
  s.execution_minutes = p.exec_total;
  s.bed_wait_minutes = p.bed_at - p.arrival;
  s.total_wait_minutes = p.wait_total;
  s.step_wait_minutes = std::move(p.step_waits);
  discharged_.push_back(std::move(s));
  ++discharges_;
}

void EmergencyDepartment::treatment_phase() {
  const auto& params = schedule_.at(now_);
  bool any_discharged = false;

  // Completions first, so slots freed this tick are available to every
  // waiting patient regardless of priority order.
  for (const std::uint64_t seq : bedded_) {
    Occupant& p = patients_[seq];
    if (p.activity_end >= 0 && p.activity_end <= now_) {
      if (p.holding != ResourceClass::None) {
        int& b = busy(p.holding);
        if (--b < 0) throw SimulationError("resource released twice");
      }
      p.holding = ResourceClass::None;
      p.ready_at = p.activity_end;
      p.activity_end = -1;
      ++p.cursor;
    }
  }

  for (const std::uint64_t seq : bedded_) {
    Occupant& p = patients_[seq];
    const auto n = pool_.record(p.record).trajectory.steps.size();
    if (p.activity_end < 0 && p.cursor < n) start_pending(p, params);
    if (p.activity_end < 0 && p.cursor == n) {
      discharge(p);
      any_discharged = true;
    }
  }

  if (any_discharged) {
    std::erase_if(bedded_, [this](std::uint64_t seq) {
      const Occupant& p = patients_[seq];
      return p.activity_end < 0 &&
             p.cursor == pool_.record(p.record).trajectory.steps.size();
    });
  }
}

void EmergencyDepartment::advance_clock() noexcept {
  now_ += schedule_.baseline().tick_minutes;
}

void EmergencyDepartment::step(bool accept_arrivals) {
  if (accept_arrivals) arrivals_phase();
  bed_phase();
  treatment_phase();
  advance_clock();
}

TickSnapshot EmergencyDepartment::snapshot() const {
  TickSnapshot s;
  s.minute = now_;
  s.arrivals = arrivals_;
  s.discharges = discharges_;
  s.waiting = waiting_.size();
  s.bedded = bedded_.size();
  s.clinicians_busy = clinicians_busy_;
  s.imaging_busy = imaging_busy_;
  s.params = &schedule_.at(now_);
  return s;
}

std::vector<SyntheticStay> EmergencyDepartment::take_discharged() {
  std::vector<SyntheticStay> out;
  out.swap(discharged_);
  return out;
}

SyntheticDataset run_simulation(const ParamSchedule& schedule,
                                const PatientPool& pool,
                                const SimulationOptions& options) {
  if (options.warmup_minutes < 0 || options.horizon_minutes < 0) {
    throw ValidationError("horizon and warm-up must be non-negative");
  }
  SyntheticDataset out;
  if (options.horizon_minutes <= options.warmup_minutes) return out;

  EmergencyDepartment ed(schedule, pool, options.seed, options.run_id,
                         options.los_threshold_hours);
  while (ed.now() < options.horizon_minutes || !ed.empty()) {
    if (ed.now() > options.horizon_minutes + kMaxDrainMinutes) {
      throw SimulationError("ED failed to drain after the horizon");
    }
    if (ed.now() < options.horizon_minutes) ed.arrivals_phase();
    ed.bed_phase();
    ed.treatment_phase();
    if (options.observer) options.observer(ed.snapshot());
    ed.advance_clock();
    for (auto& s : ed.take_discharged()) {
      if (s.arrival_minute >= options.warmup_minutes) out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

SyntheticDataset run_simulation(const EDEnvironmentParams& params,
                                const PatientPool& pool,
                                const SimulationOptions& options) {
  const ParamSchedule schedule(params);
  return run_simulation(schedule, pool, options);
}

void write_dataset_header(std::ostream& out) {
  out << "run_id,sim_id,source_patient_id,arrival_time,discharge_time,"
         "simulated_los_hours,simulated_label,acuity,disposition,"
         "total_wait_min\n";
}

void write_dataset_rows(std::ostream& out,
                        std::span<const SyntheticStay> stays) {
  for (const auto& s : stays) {
    out << s.id.run << ',' << s.id.str() << ',' << s.source_patient_id << ','
        << format_timestamp(sim_minute_to_timestamp(s.arrival_minute)) << ','
        << format_timestamp(sim_minute_to_timestamp(s.discharge_minute)) << ','
        << format_number(s.simulated_los_hours) << ',' << s.simulated_label
        << ',' << s.acuity << ',' << to_string(s.disposition) << ','
        << s.total_wait_minutes << '\n';
  }
}

std::vector<SyntheticStay> read_dataset(std::istream& in) {
  CsvReader csv(in);
  csv.expect_header({"run_id", "sim_id", "source_patient_id", "arrival_time",
                     "discharge_time", "simulated_los_hours", "simulated_label",
                     "acuity", "disposition", "total_wait_min"});
  std::vector<SyntheticStay> out;
  while (csv.next()) {
    SyntheticStay s;
    const auto run = csv.integer(0);
    const auto parts = split(csv.field(1), '-');
    if (run < 0 || parts.size() != 2 ||
        parts[0] != csv.field(0)) {
      throw ParseError(csv.line(), "sim_id", "expected '<run_id>-<seq>'");
    }
    s.id.run = static_cast<std::uint32_t>(run);
    const auto res = std::from_chars(parts[1].data(),
                                     parts[1].data() + parts[1].size(), s.id.seq);
    if (parts[1].empty() || res.ec != std::errc{} ||
        res.ptr != parts[1].data() + parts[1].size()) {
      throw ParseError(csv.line(), "sim_id", "sequence is not an integer");
    }
    s.source_patient_id = std::string(csv.field(2));
    const auto arrival = parse_timestamp(csv.field(3));
    const auto discharge = parse_timestamp(csv.field(4));
    if (!arrival) throw ParseError(csv.line(), "arrival_time", "bad timestamp");
    if (!discharge) {
      throw ParseError(csv.line(), "discharge_time", "bad timestamp");
    }
    s.arrival_minute = timestamp_to_sim_minute(*arrival);
    s.discharge_minute = timestamp_to_sim_minute(*discharge);
    s.simulated_los_hours = csv.number(5);
    const auto label = csv.integer(6);
    if (label != 0 && label != 1) {
      throw ParseError(csv.line(), "simulated_label", "label must be 0 or 1");
    }
    s.simulated_label = static_cast<int>(label);
    s.acuity = static_cast<int>(csv.integer(7));
    const auto disp = parse_disposition(csv.field(8));
    if (!disp) throw ParseError(csv.line(), "disposition", "unknown value");
    s.disposition = *disp;
    s.total_wait_minutes = csv.integer(9);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace edabm
