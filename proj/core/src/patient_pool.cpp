#include "edabm/patient_pool.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"

namespace edabm {

namespace {

constexpr std::array<std::string_view, kDispositionCount> kDispositionNames = {
    "Home", "Ward", "ICU"};

std::string join(std::span<const std::string> items, char sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::vector<std::string> split_codes(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  for (auto part : split(text, ';')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

bool same_value(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

std::string_view to_string(Disposition d) noexcept {
  return kDispositionNames[static_cast<std::size_t>(d)];
}

std::optional<Disposition> parse_disposition(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kDispositionNames.size(); ++i) {
    if (kDispositionNames[i] == name) return static_cast<Disposition>(i);
  }
  return std::nullopt;
}

bool PatientFeatures::operator==(const PatientFeatures& o) const {
  if (vital_signs.size() != o.vital_signs.size()) return false;
  for (std::size_t i = 0; i < vital_signs.size(); ++i) {
    if (vital_signs[i].first != o.vital_signs[i].first ||
        !same_value(vital_signs[i].second, o.vital_signs[i].second)) {
      return false;
    }
  }
  return age == o.age && chief_complaints == o.chief_complaints &&
         comorbidities == o.comorbidities &&
         past_admission_counts == o.past_admission_counts &&
         acuity == o.acuity;
}

std::string SimStayId::str() const {
  return std::to_string(run) + "-" + std::to_string(seq);
}

PatientPool::PatientPool(std::vector<PatientRecord> records)
    : records_(std::move(records)) {
  if (records_.empty()) throw ValidationError("patient pool is empty");
  std::map<Cell, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.acuity() < kMinAcuity || r.acuity() > kMaxAcuity) {
      throw ValidationError("patient '" + r.patient_id +
                            "' has acuity outside 1..5");
    }
    if (r.trajectory.steps.empty() ||
        r.trajectory.steps.back().activity != Activity::Discharge) {
      throw ValidationError("patient '" + r.patient_id +
                            "' has a trajectory that does not end in discharge");
    }
    if (!by_id_.emplace(r.patient_id, i).second) {
      throw ValidationError("duplicate patient id '" + r.patient_id + "'");
    }
    cells[{r.acuity(), r.disposition}].push_back(i);
  }
  const double total = static_cast<double>(records_.size());
  std::size_t running = 0;
  for (auto& [cell, idx] : cells) {
    joint_freq_.emplace(cell, static_cast<double>(idx.size()) / total);
    running += idx.size();
    cells_.push_back(cell);
    cumulative_.push_back(running);
    members_.push_back(std::move(idx));
  }
}

std::span<const std::size_t> PatientPool::members(const Cell& cell) const {
  const auto it = std::lower_bound(cells_.begin(), cells_.end(), cell);
  if (it == cells_.end() || *it != cell) return {};
  return members_[static_cast<std::size_t>(it - cells_.begin())];
}

std::optional<std::size_t> PatientPool::find(std::string_view patient_id) const {
  const auto it = by_id_.find(patient_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t PatientPool::sample_index(Rng& rng) const {
  // Stage 1: cell with probability count/P, drawn on the integer lattice so
  // the frequencies are exact.
  std::uniform_int_distribution<std::size_t> pick_slot(0, records_.size() - 1);
  const std::size_t slot = pick_slot(rng);
  const auto cell = static_cast<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), slot) -
      cumulative_.begin());
  // Stage 2: uniform member of the cell, with replacement.
  const auto& m = members_[cell];
  std::uniform_int_distribution<std::size_t> pick_member(0, m.size() - 1);
  return m[pick_member(rng)];
}

PatientPool build_pool(std::vector<PatientRecord> records) {
  return PatientPool(std::move(records));
}

SampledPatient sample_patient(const PatientPool& pool, Rng& rng, SimStayId id) {
  return {pool.sample_index(rng), id};
}

std::vector<PatientRecord> read_patient_features(std::istream& in) {
  CsvReader csv(in);
  const auto& header = csv.header();
  const std::vector<std::string_view> lead = {"patient_id", "age", "acuity",
                                              "disposition", "past_admissions"};
  const std::vector<std::string_view> tail = {
      "complaint_codes", "comorbidity_codes", "true_los_hours"};
  bool ok = header.size() >= lead.size() + tail.size();
  for (std::size_t i = 0; ok && i < lead.size(); ++i) ok = header[i] == lead[i];
  for (std::size_t i = 0; ok && i < tail.size(); ++i) {
    ok = header[header.size() - tail.size() + i] == tail[i];
  }
  if (!ok) {
    throw ParseError(csv.line(), "header",
                     "expected patient_id,age,acuity,disposition,"
                     "past_admissions,<vitals...>,complaint_codes,"
                     "comorbidity_codes,true_los_hours");
  }
  const std::size_t first_vital = lead.size();
  const std::size_t end_vital = header.size() - tail.size();

  std::vector<PatientRecord> out;
  while (csv.next()) {
    PatientRecord r;
    r.patient_id = std::string(csv.field(0));
    if (r.patient_id.empty()) {
      throw ParseError(csv.line(), "patient_id", "empty identifier");
    }
    r.features.age = csv.number(1);
    const auto acuity = csv.integer(2);
    if (acuity < kMinAcuity || acuity > kMaxAcuity) {
      throw ParseError(csv.line(), "acuity", "acuity must be in 1..5");
    }
    r.features.acuity = static_cast<int>(acuity);
    const auto disp = parse_disposition(csv.field(3));
    if (!disp) {
      throw ParseError(csv.line(), "disposition",
                       "expected one of Home, Ward, ICU");
    }
    r.disposition = *disp;
    const auto past = csv.integer(4);
    if (past < 0) {
      throw ParseError(csv.line(), "past_admissions", "must be >= 0");
    }
    r.features.past_admission_counts = static_cast<int>(past);
    for (std::size_t c = first_vital; c < end_vital; ++c) {
      const double v = csv.field(c).empty() ? NAN : csv.number(c);
      r.features.vital_signs.emplace_back(header[c], v);
    }
    r.features.chief_complaints = split_codes(csv.field(end_vital));
    r.features.comorbidities = split_codes(csv.field(end_vital + 1));
    r.true_los_hours = csv.number(end_vital + 2);
    if (!(r.true_los_hours >= 0.0)) {
      throw ParseError(csv.line(), "true_los_hours", "must be >= 0");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_patient_features(std::ostream& out,
                            std::span<const PatientRecord> records) {
  out << "patient_id,age,acuity,disposition,past_admissions";
  if (!records.empty()) {
    for (const auto& [name, value] : records.front().features.vital_signs) {
      out << ',' << name;
    }
  }
  out << ",complaint_codes,comorbidity_codes,true_los_hours\n";
  for (const auto& r : records) {
    out << r.patient_id << ',' << format_number(r.features.age) << ','
        << r.features.acuity << ',' << to_string(r.disposition) << ','
        << r.features.past_admission_counts;
    for (const auto& [name, value] : r.features.vital_signs) {
      out << ',';
      if (!std::isnan(value)) out << format_number(value);
    }
    out << ',' << join(r.features.chief_complaints, ';') << ','
        << join(r.features.comorbidities, ';') << ','
        << format_number(r.true_los_hours) << '\n';
  }
}

void attach_trajectories(std::vector<PatientRecord>& records,
                         std::vector<CleanTrajectory> trajectories) {
  std::unordered_map<std::string, CleanTrajectory*> by_id;
  for (auto& t : trajectories) by_id.emplace(t.stay_id, &t);
  for (auto& r : records) {
    const auto it = by_id.find(r.patient_id);
    if (it == by_id.end()) {
      throw ValidationError("no trajectory for patient '" + r.patient_id + "'");
    }
    r.trajectory = std::move(*it->second);
  }
}

}  // namespace edabm
