#include "edabm/scenarios.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"
#include "edabm/rng.hpp"

namespace edabm {

namespace {

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 5> kKindNames = {{
    {ScenarioKind::Baseline, "baseline"},
    {ScenarioKind::ArrivalSurge, "arrival_surge"},
    {ScenarioKind::ClinicianCut, "clinician_cut"},
    {ScenarioKind::LabDelay, "lab_delay"},
    {ScenarioKind::Composite, "composite"},
}};

std::int64_t days_to_minutes(double days) {
  return std::llround(days * static_cast<double>(kMinutesPerDay));
}

std::string magnitude_label(double m) {
  // Presets use whole numbers; anything else keeps its shortest form.
  return m == std::floor(m) ? std::to_string(static_cast<long long>(m))
                            : format_number(m);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "baseline";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw ValidationError("scenario name is empty");
  const Perturbation p = perturbation();
  if (!(p.arrival_increase_pct >= 0.0) || !(p.clinician_cut_pct >= 0.0) ||
      !(p.lab_delay_minutes >= 0.0)) {
    throw ValidationError("scenario '" + name + "': magnitudes must be >= 0");
  }
  if (p.clinician_cut_pct > 100.0) {
    throw ValidationError("scenario '" + name +
                          "': clinician cut cannot exceed 100%");
  }
  if (!(window_days > 0.0)) {
    throw ValidationError("scenario '" + name + "': window must be positive");
  }
  if (!(window_start_days >= 0.0) || !(cooldown_days >= 0.0)) {
    throw ValidationError("scenario '" + name +
                          "': window start and cool-down must be >= 0");
  }
  if (runs < 1) throw ValidationError("scenario '" + name + "': runs must be >= 1");
}

Perturbation ScenarioSpec::perturbation() const {
  Perturbation p;
  switch (kind) {
    case ScenarioKind::Baseline:
      break;
    case ScenarioKind::ArrivalSurge:
      p.arrival_increase_pct = magnitude;
      break;
    case ScenarioKind::ClinicianCut:
      p.clinician_cut_pct = magnitude;
      break;
    case ScenarioKind::LabDelay:
      p.lab_delay_minutes = magnitude;
      break;
    case ScenarioKind::Composite:
      p = composite;
      break;
  }
  return p;
}

std::int64_t ScenarioSpec::window_start_minute() const {
  return days_to_minutes(window_start_days);
}

std::int64_t ScenarioSpec::window_end_minute() const {
  return window_start_minute() + days_to_minutes(window_days);
}

std::int64_t ScenarioSpec::horizon_minute() const {
  return window_end_minute() + days_to_minutes(cooldown_days);
}

EDEnvironmentParams apply_scenario(const EDEnvironmentParams& baseline,
                                   const ScenarioSpec& spec) {
  EDEnvironmentParams out = baseline;
  const Perturbation p = spec.perturbation();
  if (p.arrival_increase_pct != 0.0) {
    for (double& r : out.hourly_arrival_rate) {
      r *= 1.0 + p.arrival_increase_pct / 100.0;
    }
  }
  if (p.clinician_cut_pct != 0.0) {
    // Half-up rounding; the epsilon absorbs representation error at .5.
    const double scaled = static_cast<double>(baseline.clinician_capacity) *
                          (100.0 - p.clinician_cut_pct) / 100.0;
    out.clinician_capacity =
        std::max(1, static_cast<int>(std::floor(scaled + 0.5 + 1e-9)));
  }
  if (p.lab_delay_minutes != 0.0) {
    out.workflow_delays[Activity::LabTest] +=
        static_cast<int>(std::llround(p.lab_delay_minutes));
  }
  return out;
}

ParamSchedule schedule_for(const EDEnvironmentParams& baseline,
                           const ScenarioSpec& spec) {
  if (spec.kind == ScenarioKind::Baseline) return ParamSchedule(baseline);
  auto perturbed = apply_scenario(baseline, spec);
  if (spec.steady_state) {
    return ParamSchedule(baseline, std::move(perturbed), 0,
                         std::numeric_limits<std::int64_t>::max());
  }
  return ParamSchedule(baseline, std::move(perturbed), spec.window_start_minute(),
                       spec.window_end_minute());
}

std::vector<ScenarioFamily> preset_families() {
  return {
      {"arrivals", ScenarioKind::ArrivalSurge, {5, 10, 15, 20}},
      {"clinicians", ScenarioKind::ClinicianCut, {5, 10, 15, 20}},
      {"lab", ScenarioKind::LabDelay, {5, 10, 15, 20}},
  };
}

namespace {

std::string preset_name(ScenarioKind kind, double magnitude) {
  const std::string m = magnitude_label(magnitude);
  switch (kind) {
    case ScenarioKind::ArrivalSurge:
      return "arrivals+" + m + "pct";
    case ScenarioKind::ClinicianCut:
      return "clinicians-" + m + "pct";
    case ScenarioKind::LabDelay:
      return "lab+" + m + "min";
    default:
      return "baseline";
  }
}

}  // namespace

std::vector<ScenarioSpec> preset_sweep() {
  std::vector<ScenarioSpec> out;
  for (const auto& family : preset_families()) {
    for (double m : family.magnitudes) {
      ScenarioSpec s;
      s.kind = family.kind;
      s.magnitude = m;
      s.name = preset_name(family.kind, m);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::optional<ScenarioSpec> preset(std::string_view name) {
  if (name == "baseline") return ScenarioSpec{};
  for (auto& s : preset_sweep()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

std::uint64_t run_seed(const ScenarioSpec& spec, std::size_t run_index) {
  const std::uint64_t master =
      spec.paired_seeds ? spec.master_seed : spec.master_seed ^ fnv1a(spec.name);
  return derive_seed(master, run_index);
}

SyntheticDataset window_stays(const SyntheticDataset& stays,
                              std::int64_t start_minute,
                              std::int64_t end_minute) {
  SyntheticDataset out;
  for (const auto& s : stays) {
    if (s.arrival_minute >= start_minute && s.arrival_minute < end_minute) {
      out.push_back(s);
    }
  }
  return out;
}

void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> threads;
  threads.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
  threads.clear();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ScenarioSpec& spec,
                                const EDEnvironmentParams& baseline,
                                const PatientPool& pool,
                                const ExperimentOptions& options) {
  spec.validate();
  const ParamSchedule schedule = schedule_for(baseline, spec);
  const std::int64_t start = spec.window_start_minute();
  const std::int64_t end = spec.window_end_minute();

  ExperimentResult result;
  result.spec = spec;
  const auto n = static_cast<std::size_t>(spec.runs);
  result.runs.resize(n);
  result.seeds.resize(n);
  parallel_for(n, options.jobs, [&](std::size_t r) {
    SimulationOptions sim;
    sim.horizon_minutes = spec.horizon_minute();
    sim.warmup_minutes = start;
    sim.seed = run_seed(spec, r);
    sim.run_id = static_cast<std::uint32_t>(r);
    sim.los_threshold_hours = options.los_threshold_hours;
    try {
      result.runs[r] =
          window_stays(run_simulation(schedule, pool, sim), start, end);
    } catch (const std::exception& e) {
      throw SimulationError("scenario '" + spec.name + "', run " +
                            std::to_string(r) + ": " + e.what());
    }
    result.seeds[r] = sim.seed;
  });
  const bool any = std::any_of(result.runs.begin(), result.runs.end(),
                               [](const auto& run) { return !run.empty(); });
  if (any) result.summary = los_summary(result.runs, options.los_threshold_hours);
  return result;
}

}  // namespace edabm
