#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edabm/ed_sim.hpp"
#include "edabm/metrics.hpp"

namespace edabm {

enum class ScenarioKind { Baseline, ArrivalSurge, ClinicianCut, LabDelay, Composite };

std::string_view to_string(ScenarioKind kind) noexcept;
std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) noexcept;

/// Changes relative to baseline; several may be active at once.
struct Perturbation {
  double arrival_increase_pct = 0.0;
  double clinician_cut_pct = 0.0;
  double lab_delay_minutes = 0.0;

  bool operator==(const Perturbation&) const = default;
};

struct ScenarioSpec {
  std::string name = "baseline";
  ScenarioKind kind = ScenarioKind::Baseline;
  /// Percent for ArrivalSurge and ClinicianCut, minutes for LabDelay.
  double magnitude = 0.0;
  /// Used only by ScenarioKind::Composite.
  Perturbation composite;

  /// The analysis window [start, start + window_days). The simulation runs
  /// from day 0, so the window start doubles as the warm-up.
  double window_start_days = 2.0;
  double window_days = 4.0;
  /// Baseline-condition tail after the window, so window patients keep
  /// competing with later arrivals while they finish.
  double cooldown_days = 1.0;

  int runs = 1000;
  std::uint64_t master_seed = 0;
  /// Paired runs share seeds across scenarios with the same master seed.
  bool paired_seeds = true;
  /// Apply the perturbation for the whole run instead of only the window.
  bool steady_state = false;

  void validate() const;
  Perturbation perturbation() const;

  std::int64_t window_start_minute() const;
  std::int64_t window_end_minute() const;
  std::int64_t horizon_minute() const;
};

/// Perturbed copy of `baseline`: arrival rates scaled by (1 + pct/100),
/// clinicians set to max(1, round-half-up(c * (1 - pct/100))), and lab-test
/// delay increased by the rounded minutes.
EDEnvironmentParams apply_scenario(const EDEnvironmentParams& baseline,
                                   const ScenarioSpec& spec);

/// Baseline everywhere except the window (or everywhere, for steady state).
ParamSchedule schedule_for(const EDEnvironmentParams& baseline,
                           const ScenarioSpec& spec);

/// Named presets: "baseline", "arrivals+{5,10,15,20}pct",
/// "clinicians-{5,10,15,20}pct", "lab+{5,10,15,20}min".
std::optional<ScenarioSpec> preset(std::string_view name);

struct ScenarioFamily {
  std::string name;
  ScenarioKind kind;
  std::vector<double> magnitudes;
};

/// The three perturbation families at 5/10/15/20 each.
std::vector<ScenarioFamily> preset_families();

/// The twelve family presets, family by family in increasing magnitude.
std::vector<ScenarioSpec> preset_sweep();

std::uint64_t run_seed(const ScenarioSpec& spec, std::size_t run_index);

/// Stays whose arrival lies in [start, end).
SyntheticDataset window_stays(const SyntheticDataset& stays,
                              std::int64_t start_minute,
                              std::int64_t end_minute);

struct ExperimentOptions {
  unsigned jobs = 1;
  double los_threshold_hours = kDefaultLosThreshold;
};

struct ExperimentResult {
  ScenarioSpec spec;
  /// Windowed dataset per run, indexed by run.
  std::vector<SyntheticDataset> runs;
  std::vector<std::uint64_t> seeds;
  /// Absent when every run's window is empty.
  std::optional<LosSummary> summary;
};

/// Executes `spec.runs` independent simulations, windowing each to arrivals
/// inside the analysis window. Results are ordered by run index regardless
/// of `jobs`.
ExperimentResult run_experiment(const ScenarioSpec& spec,
                                const EDEnvironmentParams& baseline,
                                const PatientPool& pool,
                                const ExperimentOptions& options = {});

/// Runs fn(0..n-1) across up to `jobs` threads. Rethrows the exception of the
/// lowest failing index after all workers finish.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace edabm
