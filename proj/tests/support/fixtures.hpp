#pragma once

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "edabm/ed_sim.hpp"
#include "edabm/eventlog.hpp"
#include "edabm/patient_pool.hpp"

namespace edabm::testing {

inline PatientRecord make_record(std::string id, int acuity, Disposition d,
                                 std::initializer_list<std::pair<Activity, double>> steps) {
  PatientRecord r;
  r.patient_id = std::move(id);
  r.features.acuity = acuity;
  r.features.age = 50;
  r.features.vital_signs = {{"heartrate", 80.0}};
  r.disposition = d;
  r.trajectory.stay_id = r.patient_id;
  for (const auto& [a, m] : steps) r.trajectory.steps.push_back({a, m});
  r.true_los_hours = r.trajectory.total_minutes() / 60.0;
  return r;
}

inline EDEnvironmentParams flat_params(double rate_per_hour, int beds, int clinicians,
                                       int imaging) {
  EDEnvironmentParams p;
  p.hourly_arrival_rate.fill(rate_per_hour);
  p.bed_capacity = beds;
  p.clinician_capacity = clinicians;
  p.imaging_capacity = imaging;
  return p;
}

/// Random records with integer step durations drawn from a small template.
inline std::vector<PatientRecord> random_records(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> acuity(1, 5);
  std::uniform_int_distribution<int> disp(0, 2);
  std::uniform_int_distribution<int> minutes(1, 90);
  std::bernoulli_distribution coin(0.5);
  std::vector<PatientRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    PatientRecord r = make_record("p" + std::to_string(i), acuity(rng),
                                  static_cast<Disposition>(disp(rng)), {});
    std::vector<Activity> acts{Activity::Triage, Activity::VitalSign};
    if (coin(rng)) acts.push_back(Activity::LabTest);
    if (coin(rng)) acts.push_back(Activity::ImagingTest);
    if (coin(rng)) {
      acts.push_back(Activity::MedDispense);
      acts.push_back(Activity::MedAdmin);
    }
    acts.push_back(Activity::Discharge);
    for (Activity a : acts) r.trajectory.steps.push_back({a, double(minutes(rng))});
    r.true_los_hours = r.trajectory.total_minutes() / 60.0;
    out.push_back(std::move(r));
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("edabm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace edabm::testing
