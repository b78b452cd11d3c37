#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "edabm/ed_sim.hpp"
#include "edabm/patient_pool.hpp"
#include "edabm/stats.hpp"

namespace edabm {

// ---- distribution fidelity ------------------------------------------------

/// First Wasserstein distance between two empirical distributions, computed
/// exactly as the integral of |F_a - F_b| over the merged support (equal to
/// the integral of the difference of quantile functions).
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

std::vector<double> los_hours(const SyntheticDataset& stays);

/// Per-run median LOS and per-run fraction with LOS > threshold, each
/// summarised by median and IQR across runs. Empty runs are skipped.
struct LosSummary {
  Summary median_los;
  Summary fraction_prolonged;
  std::size_t runs_used = 0;
  std::size_t runs_skipped = 0;
};

LosSummary los_summary(std::span<const std::vector<double>> runs,
                       double threshold_hours = kDefaultLosThreshold);
LosSummary los_summary(std::span<const SyntheticDataset> runs,
                       double threshold_hours = kDefaultLosThreshold);

/// Interval of simulated LOS per source patient. The default [0, 1] quantile
/// pair is the [min, max] interval; e.g. {0.025, 0.975} gives a percentile
/// interval.
struct CoverageOptions {
  double lower_quantile = 0.0;
  double upper_quantile = 1.0;
};

struct CoverageReport {
  double coverage = 0.0;
  /// Interval size in hours, median and IQR across patients.
  Summary width;
  std::size_t considered = 0;
  /// Real patients that no run ever sampled; excluded from both measures.
  std::size_t never_sampled = 0;
};

CoverageReport coverage_width(
    const std::unordered_map<std::string, double>& true_los_hours,
    std::span<const SyntheticDataset> runs, CoverageOptions options = {});

/// One row of the baseline fidelity table.
struct FidelityRow {
  std::string group;  // "overall", "acuity 1".."acuity 5", "Home", "Ward", "ICU"
  std::size_t real_count = 0;
  double real_median_los = 0.0;
  Summary simulated_median_los;
  Summary wasserstein;
  CoverageReport coverage;
};

std::vector<FidelityRow> fidelity_report(std::span<const PatientRecord> real,
                                         std::span<const SyntheticDataset> runs,
                                         CoverageOptions options = {});

// ---- classification -------------------------------------------------------

struct Prediction {
  int label = 0;
  std::optional<double> score;
};

/// Keyed by sim id (`<run>-<seq>`) for synthetic stays, or by patient id.
using PredictionSet = std::map<std::string, Prediction, std::less<>>;
using LabelMap = std::unordered_map<std::string, int>;

struct ClassificationMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  /// Absent when nothing was predicted positive.
  std::optional<double> precision;
  /// Absent when no stay is positive.
  std::optional<double> recall;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  double prevalence() const noexcept;
  /// 100 * FN / total.
  double missed_per_100() const noexcept;
};

/// Scores every prediction against `truth`. Throws ValidationError when a
/// predicted id has no true label.
ClassificationMetrics classification_metrics(const PredictionSet& preds,
                                             const LabelMap& truth);

double missed_per_100(const PredictionSet& preds, const LabelMap& truth);

/// Predictions and simulated labels for one synthetic run, keyed by sim id.
/// A stay takes the prediction for its sim id, else the one for its source
/// patient. Stays with neither are counted in `missing`.
struct RunLabels {
  PredictionSet predictions;
  LabelMap truth;
  std::size_t missing = 0;
};

RunLabels align_predictions(const SyntheticDataset& run,
                            const PredictionSet& preds);

/// Precision, recall, prevalence and missed-per-100 over runs, as mean with a
/// two-SD band. Runs where precision is undefined are left out of its band.
struct RobustnessReport {
  std::string scenario;
  std::string model;
  MeanBand precision;
  MeanBand recall;
  MeanBand prevalence;
  MeanBand missed_per_100;
  std::size_t runs = 0;
  std::size_t missing_predictions = 0;
};

RobustnessReport robustness_report(std::string scenario, std::string model,
                                   std::span<const SyntheticDataset> runs,
                                   const PredictionSet& preds);

// ---- file formats ---------------------------------------------------------

/// `id,predicted_label,score`; score may be empty.
PredictionSet read_predictions(std::istream& in);
void write_predictions(std::ostream& out, const PredictionSet& preds);

void write_los_summary_header(std::ostream& out);
void write_los_summary_row(std::ostream& out, const std::string& scenario,
                           const LosSummary& s);
void write_fidelity_csv(std::ostream& out, std::span<const FidelityRow> rows);
void write_robustness_header(std::ostream& out);
void write_robustness_row(std::ostream& out, const RobustnessReport& r);

}  // namespace edabm
