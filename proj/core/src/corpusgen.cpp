#include "edabm/corpusgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"
#include "edabm/rng.hpp"
#include "edabm/timestamp.hpp"

namespace edabm {

namespace {

bool sums_to_one(std::span<const double> p) {
  return std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-9;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

int draw_minutes(const LogNormalSpec& d, Rng& rng) {
  std::lognormal_distribution<double> dist(std::log(d.median_min), d.sigma);
  return std::max(1, static_cast<int>(std::llround(dist(rng))));
}

template <std::size_t N>
std::size_t draw_category(const std::array<double, N>& mix, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(mix.begin(), mix.end());
  return dist(rng);
}

// Per-acuity vital sign centres: (name, acuity-1 value, acuity-5 value, sd).
struct VitalModel {
  const char* name;
  double severe;
  double mild;
  double sd;
  int decimals;
};

constexpr std::array<VitalModel, 6> kVitals = {{
    {"temperature", 99.4, 98.2, 0.8, 1},
    {"heartrate", 112.0, 80.0, 12.0, 0},
    {"resprate", 24.0, 16.0, 2.5, 0},
    {"o2sat", 92.0, 99.0, 2.0, 0},
    {"sbp", 112.0, 132.0, 18.0, 0},
    {"dbp", 68.0, 78.0, 11.0, 0},
}};

constexpr double kMissingVitalProbability = 0.03;

// Complaint codes ordered from severe to mild presentations.
constexpr std::array<const char*, 12> kComplaints = {
    "chest_pain", "dyspnea", "altered_mental_status", "syncope",
    "abdominal_pain", "fever", "headache", "back_pain",
    "laceration", "extremity_injury", "rash", "medication_refill"};

constexpr std::array<const char*, 8> kComorbidities = {
    "hypertension", "diabetes", "copd", "ckd",
    "chf", "afib", "cancer", "dementia"};

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

PatientFeatures draw_features(int acuity, Rng& rng) {
  PatientFeatures f;
  f.acuity = acuity;
  const double severity = static_cast<double>(kMaxAcuity - acuity) /
                          static_cast<double>(kMaxAcuity - kMinAcuity);

  std::normal_distribution<double> age(42.0 + 24.0 * severity, 17.0);
  f.age = std::clamp(std::round(age(rng)), 18.0, 95.0);
  const double age_factor = (f.age - 18.0) / 77.0;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& v : kVitals) {
    std::normal_distribution<double> dist(
        v.mild + (v.severe - v.mild) * severity, v.sd);
    double value = round_to(dist(rng), v.decimals);
    if (std::string_view(v.name) == "o2sat") value = std::min(value, 100.0);
    if (unit(rng) < kMissingVitalProbability) value = std::nan("");
    f.vital_signs.emplace_back(v.name, value);
  }

  // Severe presentations draw from the front of the complaint list.
  const double spread = static_cast<double>(kComplaints.size()) / 2.0;
  std::normal_distribution<double> where((1.0 - severity) *
                                             static_cast<double>(kComplaints.size() - 1),
                                         spread / 2.0);
  const int n_complaints = unit(rng) < 0.3 ? 2 : 1;
  for (int i = 0; i < n_complaints; ++i) {
    const auto idx = static_cast<std::size_t>(std::clamp(
        std::lround(where(rng)), 0L, static_cast<long>(kComplaints.size() - 1)));
    const std::string code = kComplaints[idx];
    if (std::find(f.chief_complaints.begin(), f.chief_complaints.end(), code) ==
        f.chief_complaints.end()) {
      f.chief_complaints.push_back(code);
    }
  }

  for (const char* code : kComorbidities) {
    if (unit(rng) < 0.04 + 0.30 * age_factor) f.comorbidities.emplace_back(code);
  }
  std::poisson_distribution<int> admissions(
      0.2 + 1.5 * age_factor + 0.3 * static_cast<double>(f.comorbidities.size()));
  f.past_admission_counts = admissions(rng);
  return f;
}

std::vector<Activity> draw_template(const AcuityTemplate& t, Rng& rng) {
  std::bernoulli_distribution lab(t.p_lab);
  std::bernoulli_distribution imaging(t.p_imaging);
  std::bernoulli_distribution medication(t.p_medication);
  std::poisson_distribution<int> extra_vitals(t.extra_vitals_mean);

  std::vector<Activity> out{Activity::Triage, Activity::VitalSign};
  if (lab(rng)) out.push_back(Activity::LabTest);
  if (imaging(rng)) out.push_back(Activity::ImagingTest);
  if (medication(rng)) {
    out.push_back(Activity::MedDispense);
    out.push_back(Activity::MedAdmin);
  }
  const int repeats = t.extra_vitals_mean > 0.0 ? extra_vitals(rng) : 0;
  for (int i = 0; i < repeats; ++i) out.push_back(Activity::VitalSign);
  out.push_back(Activity::Discharge);
  return out;
}

}  // namespace

void CorpusSpec::validate() const {
  if (n_stays < 1) throw ValidationError("corpus: n_stays must be >= 1");
  if (!sums_to_one(acuity_mix) ||
      !std::all_of(acuity_mix.begin(), acuity_mix.end(), is_probability)) {
    throw ValidationError("corpus: acuity mix must be probabilities summing to 1");
  }
  if (!sums_to_one(disposition_mix) ||
      !std::all_of(disposition_mix.begin(), disposition_mix.end(), is_probability)) {
    throw ValidationError(
        "corpus: disposition mix must be probabilities summing to 1");
  }
  for (Activity a : kAllActivities) {
    if (a == Activity::Arrival) continue;
    const auto it = durations.find(a);
    if (it == durations.end()) {
      throw ValidationError("corpus: no duration for activity '" +
                            std::string(to_string(a)) + "'");
    }
    if (!(it->second.median_min > 0.0) || !(it->second.sigma >= 0.0)) {
      throw ValidationError("corpus: duration of '" + std::string(to_string(a)) +
                            "' needs median > 0 and sigma >= 0");
    }
  }
  for (const auto& t : templates) {
    if (!is_probability(t.p_lab) || !is_probability(t.p_imaging) ||
        !is_probability(t.p_medication) || !(t.extra_vitals_mean >= 0.0)) {
      throw ValidationError("corpus: template probabilities must lie in [0, 1]");
    }
  }
  for (double s : discharge_scale) {
    if (!(s > 0.0)) throw ValidationError("corpus: discharge scale must be > 0");
  }
  if (!is_probability(waits.probability)) {
    throw ValidationError("corpus: wait probability must lie in [0, 1]");
  }
  if (!(waits.magnitude.median_min > 0.0) || !(waits.magnitude.sigma >= 0.0) ||
      waits.min_minutes < 1) {
    throw ValidationError("corpus: invalid wait magnitude");
  }
  if (!(mean_interarrival_min > 0.0)) {
    throw ValidationError("corpus: mean inter-arrival must be > 0");
  }
  if (!parse_timestamp(start)) {
    throw ValidationError("corpus: bad start timestamp '" + start + "'");
  }
}

CorpusSpec default_corpus_spec() {
  CorpusSpec s;
  s.n_stays = 2000;
  s.durations = {
      {Activity::Triage, {10.0, 0.35}},
      {Activity::VitalSign, {8.0, 0.35}},
      {Activity::MedDispense, {15.0, 0.4}},
      {Activity::MedAdmin, {25.0, 0.4}},
      {Activity::LabTest, {75.0, 0.4}},
      {Activity::ImagingTest, {50.0, 0.4}},
      {Activity::Discharge, {110.0, 0.65}},
  };
  s.templates = {{
      {0.95, 0.85, 0.90, 2.0},
      {0.90, 0.70, 0.75, 1.5},
      {0.80, 0.50, 0.55, 1.0},
      {0.50, 0.30, 0.35, 0.5},
      {0.25, 0.15, 0.20, 0.2},
  }};
  s.discharge_scale = {1.0, 1.5, 1.8};
  s.waits = {0.2, {40.0, 0.6}, 1};
  s.seed = 20240601;
  return s;
}

Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::exponential_distribution<double> gap(1.0 / spec.mean_interarrival_min);
  std::bernoulli_distribution inject(spec.waits.probability);

  Corpus corpus;
  corpus.records.reserve(static_cast<std::size_t>(spec.n_stays));
  double clock = 0.0;
  const TimePoint origin = *parse_timestamp(spec.start);
  for (int i = 0; i < spec.n_stays; ++i) {
    clock += gap(rng);
    const TimePoint arrival =
        origin + std::chrono::minutes(static_cast<std::int64_t>(clock));
    const std::string stay_id = std::to_string(30000000 + i + 1);

    const int acuity = static_cast<int>(draw_category(spec.acuity_mix, rng)) + 1;
    const auto disposition =
        static_cast<Disposition>(draw_category(spec.disposition_mix, rng));
    const auto activities =
        draw_template(spec.templates[static_cast<std::size_t>(acuity - 1)], rng);

    corpus.events.push_back({stay_id, Activity::Arrival, arrival});
    TimePoint t = arrival;
    for (std::size_t k = 0; k < activities.size(); ++k) {
      const Activity a = activities[k];
      LogNormalSpec d = spec.durations.at(a);
      if (a == Activity::Discharge) {
        d.median_min *= spec.discharge_scale[static_cast<std::size_t>(disposition)];
      }
      const int exec = draw_minutes(d, rng);
      int wait = 0;
      if (inject(rng)) {
        wait = std::max(spec.waits.min_minutes, draw_minutes(spec.waits.magnitude, rng));
      }
      t += std::chrono::minutes(exec + wait);
      corpus.events.push_back({stay_id, a, t});
      corpus.ground_truth.push_back({stay_id, k, a, exec, wait});
    }

    PatientRecord rec;
    rec.patient_id = stay_id;
    rec.features = draw_features(acuity, rng);
    rec.disposition = disposition;
    rec.true_los_hours = static_cast<double>((t - arrival).count()) / 60.0;
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

void write_ground_truth(std::ostream& out, std::span<const GroundTruthStep> steps) {
  out << "stay_id,step_index,activity,exec_min,wait_min\n";
  for (const auto& s : steps) {
    out << s.stay_id << ',' << s.step_index << ',' << to_string(s.activity) << ','
        << s.exec_min << ',' << s.wait_min << '\n';
  }
}

std::vector<GroundTruthStep> read_ground_truth(std::istream& in) {
  CsvReader reader(in);
  reader.expect_header({"stay_id", "step_index", "activity", "exec_min", "wait_min"});
  std::vector<GroundTruthStep> out;
  while (reader.next()) {
    GroundTruthStep s;
    s.stay_id = std::string(reader.field(0));
    s.step_index = static_cast<std::size_t>(reader.integer(1));
    const auto a = parse_activity(reader.field(2));
    if (!a) throw ParseError(reader.line(), "activity", "unknown activity");
    s.activity = *a;
    s.exec_min = static_cast<int>(reader.integer(3));
    s.wait_min = static_cast<int>(reader.integer(4));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace edabm
