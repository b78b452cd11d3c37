#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edabm {

/// Median with the even-count convention of averaging the two middle values.
/// Takes its argument by value; the copy is partially reordered.
double median(std::vector<double> values);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an already sorted
/// sample. q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(std::span<const double> values);

/// Median with interquartile range, the layout used by every LOS table.
struct Summary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

Summary summarize(std::vector<double> values);

/// Mean with a two-standard-deviation band.
struct MeanBand {
  double mean = 0.0;
  double two_sd = 0.0;
};

MeanBand mean_band(std::span<const double> values);

enum class Alternative { TwoSided, Greater, Less };

struct WilcoxonResult {
  /// Sum of the ranks of the positive differences.
  double w_plus = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  /// Pairs with a non-zero difference.
  std::size_t n_used = 0;
};

/// Paired Wilcoxon signed-rank test of x - y using the normal approximation
/// with tie and continuity corrections. Zero differences are dropped before
/// ranking. `Greater` tests whether x tends to exceed y.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y,
                                    Alternative alternative);

}  // namespace edabm
