#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edabm/eventlog.hpp"
#include "edabm/rng.hpp"

namespace edabm {

enum class Disposition : std::uint8_t { Home, Ward, ICU };

inline constexpr std::size_t kDispositionCount = 3;
inline constexpr int kMinAcuity = 1;
inline constexpr int kMaxAcuity = 5;

/// Default LOS threshold in hours for the prolonged-stay label.
inline constexpr double kDefaultLosThreshold = 4.0;

std::string_view to_string(Disposition d) noexcept;
std::optional<Disposition> parse_disposition(std::string_view name) noexcept;

/// 1 when a stay is prolonged, i.e. strictly longer than `threshold_hours`.
constexpr int los_label(double los_hours, double threshold_hours) noexcept {
  return los_hours > threshold_hours ? 1 : 0;
}

/// Patient-level features available at triage.
struct PatientFeatures {
  double age = 0.0;
  /// Named vital signs in file column order; NaN marks a missing value.
  std::vector<std::pair<std::string, double>> vital_signs;
  std::vector<std::string> chief_complaints;
  std::vector<std::string> comorbidities;
  int past_admission_counts = 0;
  int acuity = 3;

  bool operator==(const PatientFeatures&) const;
};

/// One ED stay of the test set.
struct PatientRecord {
  std::string patient_id;
  PatientFeatures features;
  Disposition disposition = Disposition::Home;
  double true_los_hours = 0.0;
  CleanTrajectory trajectory;

  int acuity() const noexcept { return features.acuity; }
  int true_label(double threshold_hours = kDefaultLosThreshold) const noexcept {
    return los_label(true_los_hours, threshold_hours);
  }
};

/// Stratum used for conditional sampling.
struct Cell {
  int acuity = 0;
  Disposition disposition = Disposition::Home;

  auto operator<=>(const Cell&) const = default;
};

/// Identifier of one simulated stay: the run it belongs to and its arrival
/// sequence number within that run.
struct SimStayId {
  std::uint32_t run = 0;
  std::uint64_t seq = 0;

  auto operator<=>(const SimStayId&) const = default;
  std::string str() const;
};

struct SampledPatient {
  std::size_t record_index = 0;
  SimStayId id;
};

/// Immutable store of test-set records with the empirical joint distribution
/// of (acuity, disposition).
class PatientPool {
 public:
  /// Throws ValidationError on an empty input or an invalid record.
  explicit PatientPool(std::vector<PatientRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  std::span<const PatientRecord> records() const noexcept { return records_; }
  const PatientRecord& record(std::size_t i) const { return records_.at(i); }

  /// Frequency count(cell) / P over every occurring cell.
  const std::map<Cell, double>& joint_frequency() const noexcept {
    return joint_freq_;
  }
  std::span<const std::size_t> members(const Cell& cell) const;

  std::optional<std::size_t> find(std::string_view patient_id) const;

  /// Two-stage draw: a cell with probability count/P, then a member of that
  /// cell uniformly with replacement.
  std::size_t sample_index(Rng& rng) const;

 private:
  std::vector<PatientRecord> records_;
  std::map<Cell, double> joint_freq_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> cumulative_;  // running member counts per cell
  std::vector<std::vector<std::size_t>> members_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

PatientPool build_pool(std::vector<PatientRecord> records);

SampledPatient sample_patient(const PatientPool& pool, Rng& rng, SimStayId id);

// ---- file formats ---------------------------------------------------------

/// `patient_id,age,acuity,disposition,past_admissions,<vitals...>,
/// complaint_codes,comorbidity_codes,true_los_hours`. Any columns between
/// past_admissions and complaint_codes are vital signs named by the header.
std::vector<PatientRecord> read_patient_features(std::istream& in);
void write_patient_features(std::ostream& out,
                            std::span<const PatientRecord> records);

/// Moves each cleaned trajectory onto the record with the same id. Throws if
/// a record has no trajectory.
void attach_trajectories(std::vector<PatientRecord>& records,
                         std::vector<CleanTrajectory> trajectories);

}  // namespace edabm
