#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edabm/activity.hpp"
#include "edabm/eventlog.hpp"
#include "edabm/patient_pool.hpp"

namespace edabm {

/// Lognormal distribution in minutes, given by its median exp(mu) and the
/// log-space sigma.
struct LogNormalSpec {
  double median_min = 1.0;
  double sigma = 0.0;

  bool operator==(const LogNormalSpec&) const = default;
};

/// Optional parts of the trajectory for one acuity level.
struct AcuityTemplate {
  double p_lab = 0.0;
  double p_imaging = 0.0;
  double p_medication = 0.0;
  /// Mean of the Poisson number of repeat vital-sign checks.
  double extra_vitals_mean = 0.0;

  bool operator==(const AcuityTemplate&) const = default;
};

struct WaitInjection {
  double probability = 0.0;
  LogNormalSpec magnitude{30.0, 0.5};
  /// Injected waits are at least this long (whole minutes, >= 1).
  int min_minutes = 1;

  bool operator==(const WaitInjection&) const = default;
};

struct CorpusSpec {
  int n_stays = 100;
  /// Acuity 1 (most urgent) through 5.
  std::array<double, 5> acuity_mix{0.05, 0.30, 0.45, 0.15, 0.05};
  /// Home, Ward, ICU.
  std::array<double, 3> disposition_mix{0.6, 0.3, 0.1};
  std::map<Activity, LogNormalSpec> durations;
  std::array<AcuityTemplate, 5> templates{};
  /// Multiplies the discharge step for Home, Ward, ICU.
  std::array<double, 3> discharge_scale{1.0, 1.0, 1.0};
  WaitInjection waits;
  double mean_interarrival_min = 7.0;
  std::string start = "2150-01-01T00:00";
  std::uint64_t seed = 0;

  /// Throws ValidationError unless both mixes sum to 1, every template
  /// activity has a positive duration and probabilities lie in [0, 1].
  void validate() const;
};

/// The desk-scale defaults used by configs/desk_corpus.json.
CorpusSpec default_corpus_spec();

/// True execution and injected wait of one step; the recorded step duration
/// is wait_min + exec_min.
struct GroundTruthStep {
  std::string stay_id;
  std::size_t step_index = 0;
  Activity activity = Activity::Triage;
  int exec_min = 0;
  int wait_min = 0;

  bool operator==(const GroundTruthStep&) const = default;
};

struct Corpus {
  std::vector<StayEvent> events;
  /// Feature rows; trajectories are left empty.
  std::vector<PatientRecord> records;
  std::vector<GroundTruthStep> ground_truth;
};

/// Deterministic for a fixed spec.
Corpus generate_corpus(const CorpusSpec& spec);

/// `stay_id,step_index,activity,exec_min,wait_min`
void write_ground_truth(std::ostream& out, std::span<const GroundTruthStep> steps);
std::vector<GroundTruthStep> read_ground_truth(std::istream& in);

}  // namespace edabm
