#include "edabm/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "edabm/csv.hpp"
#include "edabm/error.hpp"

namespace edabm {

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("Wasserstein distance needs two non-empty samples");
  }
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());

  // Sweep the merged support; between consecutive support points both CDFs
  // are constant.
  std::size_t i = 0, j = 0;
  double x = std::min(xs.front(), ys.front());
  double total = 0.0;
  while (i < xs.size() || j < ys.size()) {
    while (i < xs.size() && xs[i] <= x) ++i;
    while (j < ys.size() && ys[j] <= x) ++j;
    if (i == xs.size() && j == ys.size()) break;
    double next = INFINITY;
    if (i < xs.size()) next = xs[i];
    if (j < ys.size()) next = std::min(next, ys[j]);
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    total += std::abs(fa - fb) * (next - x);
    x = next;
  }
  return total;
}

std::vector<double> los_hours(const SyntheticDataset& stays) {
  std::vector<double> out;
  out.reserve(stays.size());
  for (const auto& s : stays) out.push_back(s.simulated_los_hours);
  return out;
}

LosSummary los_summary(std::span<const std::vector<double>> runs,
                       double threshold_hours) {
  LosSummary out;
  std::vector<double> medians, fractions;
  for (const auto& run : runs) {
    if (run.empty()) {
      ++out.runs_skipped;
      continue;
    }
    medians.push_back(median(run));
    const auto prolonged = std::count_if(
        run.begin(), run.end(), [&](double h) { return h > threshold_hours; });
    fractions.push_back(static_cast<double>(prolonged) /
                        static_cast<double>(run.size()));
  }
  if (medians.empty()) throw ValidationError("every run is empty");
  out.runs_used = medians.size();
  out.median_los = summarize(std::move(medians));
  out.fraction_prolonged = summarize(std::move(fractions));
  return out;
}

LosSummary los_summary(std::span<const SyntheticDataset> runs,
                       double threshold_hours) {
  std::vector<std::vector<double>> hours;
  hours.reserve(runs.size());
  for (const auto& run : runs) hours.push_back(los_hours(run));
  return los_summary(hours, threshold_hours);
}

CoverageReport coverage_width(
    const std::unordered_map<std::string, double>& true_los_hours,
    std::span<const SyntheticDataset> runs, CoverageOptions options) {
  if (!(options.lower_quantile >= 0.0 &&
        options.lower_quantile <= options.upper_quantile &&
        options.upper_quantile <= 1.0)) {
    throw ValidationError("coverage quantiles must satisfy 0 <= lo <= hi <= 1");
  }
  std::unordered_map<std::string_view, std::vector<double>> simulated;
  for (const auto& run : runs) {
    for (const auto& s : run) {
      if (true_los_hours.count(s.source_patient_id)) {
        simulated[s.source_patient_id].push_back(s.simulated_los_hours);
      }
    }
  }
  CoverageReport out;
  std::size_t covered = 0;
  std::vector<double> widths;
  for (const auto& [id, truth] : true_los_hours) {
    const auto it = simulated.find(id);
    if (it == simulated.end()) {
      ++out.never_sampled;
      continue;
    }
    auto& values = it->second;
    std::sort(values.begin(), values.end());
    const double lo = sorted_quantile(values, options.lower_quantile);
    const double hi = sorted_quantile(values, options.upper_quantile);
    if (truth >= lo && truth <= hi) ++covered;
    widths.push_back(hi - lo);
  }
  out.considered = widths.size();
  if (out.considered == 0) {
    throw ValidationError("no real patient appears in any simulated run");
  }
  out.coverage = static_cast<double>(covered) / static_cast<double>(out.considered);
  out.width = summarize(std::move(widths));
  return out;
}

std::vector<FidelityRow> fidelity_report(std::span<const PatientRecord> real,
                                         std::span<const SyntheticDataset> runs,
                                         CoverageOptions options) {
  struct Group {
    std::string name;
    bool (*member)(int acuity, Disposition d, int key);
    int key;
  };
  std::vector<Group> groups;
  groups.push_back({"overall", [](int, Disposition, int) { return true; }, 0});
  for (int a = kMinAcuity; a <= kMaxAcuity; ++a) {
    groups.push_back({"acuity " + std::to_string(a),
                      [](int acuity, Disposition, int k) { return acuity == k; },
                      a});
  }
  for (std::size_t d = 0; d < kDispositionCount; ++d) {
    groups.push_back(
        {std::string(to_string(static_cast<Disposition>(d))),
         [](int, Disposition disp, int k) { return static_cast<int>(disp) == k; },
         static_cast<int>(d)});
  }

  std::vector<FidelityRow> rows;
  for (const auto& g : groups) {
    std::vector<double> real_los;
    std::unordered_map<std::string, double> truth;
    for (const auto& r : real) {
      if (g.member(r.acuity(), r.disposition, g.key)) {
        real_los.push_back(r.true_los_hours);
        truth.emplace(r.patient_id, r.true_los_hours);
      }
    }
    if (real_los.empty()) continue;

    std::vector<SyntheticDataset> group_runs;
    std::vector<double> medians, distances;
    for (const auto& run : runs) {
      SyntheticDataset subset;
      for (const auto& s : run) {
        if (g.member(s.acuity, s.disposition, g.key)) subset.push_back(s);
      }
      if (subset.empty()) continue;
      const auto sim = los_hours(subset);
      medians.push_back(median(sim));
      distances.push_back(wasserstein_1d(real_los, sim));
      group_runs.push_back(std::move(subset));
    }
    if (medians.empty()) continue;

    FidelityRow row;
    row.group = g.name;
    row.real_count = real_los.size();
    row.real_median_los = median(real_los);
    row.simulated_median_los = summarize(std::move(medians));
    row.wasserstein = summarize(std::move(distances));
    row.coverage = coverage_width(truth, group_runs, options);
    rows.push_back(std::move(row));
  }
  return rows;
}

double ClassificationMetrics::prevalence() const noexcept {
  return total() == 0 ? 0.0
                      : static_cast<double>(tp + fn) / static_cast<double>(total());
}

double ClassificationMetrics::missed_per_100() const noexcept {
  return total() == 0 ? 0.0
                      : 100.0 * static_cast<double>(fn) / static_cast<double>(total());
}

ClassificationMetrics classification_metrics(const PredictionSet& preds,
                                             const LabelMap& truth) {
  ClassificationMetrics m;
  for (const auto& [id, p] : preds) {
    const auto it = truth.find(id);
    if (it == truth.end()) {
      throw ValidationError("prediction for '" + id + "' has no true label");
    }
    const bool actual = it->second == 1;
    const bool predicted = p.label == 1;
    if (actual && predicted) ++m.tp;
    else if (!actual && predicted) ++m.fp;
    else if (actual && !predicted) ++m.fn;
    else ++m.tn;
  }
  if (m.tp + m.fp > 0) {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn > 0) {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  return m;
}

double missed_per_100(const PredictionSet& preds, const LabelMap& truth) {
  return classification_metrics(preds, truth).missed_per_100();
}

RunLabels align_predictions(const SyntheticDataset& run,
                            const PredictionSet& preds) {
  RunLabels out;
  for (const auto& s : run) {
    const std::string sim_id = s.id.str();
    auto it = preds.find(sim_id);
    if (it == preds.end()) it = preds.find(s.source_patient_id);
    if (it == preds.end()) {
      ++out.missing;
      continue;
    }
    out.predictions.emplace(sim_id, it->second);
    out.truth.emplace(sim_id, s.simulated_label);
  }
  return out;
}

RobustnessReport robustness_report(std::string scenario, std::string model,
                                   std::span<const SyntheticDataset> runs,
                                   const PredictionSet& preds) {
  RobustnessReport out;
  out.scenario = std::move(scenario);
  out.model = std::move(model);
  std::vector<double> precision, recall, prevalence, missed;
  for (const auto& run : runs) {
    const auto aligned = align_predictions(run, preds);
    out.missing_predictions += aligned.missing;
    if (aligned.predictions.empty()) continue;
    const auto m = classification_metrics(aligned.predictions, aligned.truth);
    if (m.precision) precision.push_back(*m.precision);
    if (m.recall) recall.push_back(*m.recall);
    prevalence.push_back(m.prevalence());
    missed.push_back(m.missed_per_100());
  }
  out.runs = prevalence.size();
  if (!precision.empty()) out.precision = mean_band(precision);
  if (!recall.empty()) out.recall = mean_band(recall);
  if (!prevalence.empty()) {
    out.prevalence = mean_band(prevalence);
    out.missed_per_100 = mean_band(missed);
  }
  return out;
}

PredictionSet read_predictions(std::istream& in) {
  CsvReader csv(in);
  csv.expect_header({"id", "predicted_label", "score"});
  PredictionSet out;
  while (csv.next()) {
    Prediction p;
    const auto label = csv.integer(1);
    if (label != 0 && label != 1) {
      throw ParseError(csv.line(), "predicted_label", "label must be 0 or 1");
    }
    p.label = static_cast<int>(label);
    if (!csv.field(2).empty()) {
      const double score = csv.number(2);
      if (!(score >= 0.0 && score <= 1.0)) {
        throw ParseError(csv.line(), "score", "score must lie in [0, 1]");
      }
      p.score = score;
    }
    if (!out.emplace(std::string(csv.field(0)), p).second) {
      throw ParseError(csv.line(), "id",
                       "duplicate prediction id '" + std::string(csv.field(0)) +
                           "'");
    }
  }
  return out;
}

void write_predictions(std::ostream& out, const PredictionSet& preds) {
  out << "id,predicted_label,score\n";
  for (const auto& [id, p] : preds) {
    out << id << ',' << p.label << ',';
    if (p.score) out << format_number(*p.score);
    out << '\n';
  }
}

void write_los_summary_header(std::ostream& out) {
  out << "scenario,median_los_h,median_los_q1,median_los_q3,frac_prolonged,"
         "frac_prolonged_q1,frac_prolonged_q3,runs\n";
}

void write_los_summary_row(std::ostream& out, const std::string& scenario,
                           const LosSummary& s) {
  out << scenario << ',' << format_number(s.median_los.median) << ','
      << format_number(s.median_los.q1) << ',' << format_number(s.median_los.q3)
      << ',' << format_number(s.fraction_prolonged.median) << ','
      << format_number(s.fraction_prolonged.q1) << ','
      << format_number(s.fraction_prolonged.q3) << ',' << s.runs_used << '\n';
}

void write_fidelity_csv(std::ostream& out, std::span<const FidelityRow> rows) {
  out << "group,real_n,real_median_los_h,sim_median_los_h,sim_median_q1,"
         "sim_median_q3,wasserstein_h,wasserstein_q1,wasserstein_q3,coverage,"
         "width_h,width_q1,width_q3,never_sampled\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.real_count << ','
        << format_number(r.real_median_los) << ','
        << format_number(r.simulated_median_los.median) << ','
        << format_number(r.simulated_median_los.q1) << ','
        << format_number(r.simulated_median_los.q3) << ','
        << format_number(r.wasserstein.median) << ','
        << format_number(r.wasserstein.q1) << ','
        << format_number(r.wasserstein.q3) << ','
        << format_number(r.coverage.coverage) << ','
        << format_number(r.coverage.width.median) << ','
        << format_number(r.coverage.width.q1) << ','
        << format_number(r.coverage.width.q3) << ','
        << r.coverage.never_sampled << '\n';
  }
}

void write_robustness_header(std::ostream& out) {
  out << "scenario,model,precision_mean,precision_2sd,recall_mean,recall_2sd,"
         "prevalence_mean,prevalence_2sd,missed_per_100_mean,"
         "missed_per_100_2sd,runs,missing_predictions\n";
}

void write_robustness_row(std::ostream& out, const RobustnessReport& r) {
  out << r.scenario << ',' << r.model << ','
      << format_number(r.precision.mean) << ','
      << format_number(r.precision.two_sd) << ','
      << format_number(r.recall.mean) << ',' << format_number(r.recall.two_sd)
      << ',' << format_number(r.prevalence.mean) << ','
      << format_number(r.prevalence.two_sd) << ','
      << format_number(r.missed_per_100.mean) << ','
      << format_number(r.missed_per_100.two_sd) << ',' << r.runs << ','
      << r.missing_predictions << '\n';
}

}  // namespace edabm
