#include "edabm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edabm/error.hpp"

namespace edabm {

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty sample");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw ValidationError("summary of an empty sample");
  std::sort(values.begin(), values.end());
  return {sorted_quantile(values, 0.5), sorted_quantile(values, 0.25),
          sorted_quantile(values, 0.75)};
}

MeanBand mean_band(std::span<const double> values) {
  return {mean(values), 2.0 * sample_sd(values)};
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y,
                                    Alternative alternative) {
  if (x.size() != y.size()) {
    throw ValidationError("Wilcoxon test needs paired samples of equal size");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) diffs.push_back(x[i] - y[i]);
  }
  WilcoxonResult out;
  out.n_used = diffs.size();
  if (diffs.empty()) return out;

  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  double tie_term = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() &&
           std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (diffs[order[k]] > 0) out.w_plus += rank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double n = static_cast<double>(diffs.size());
  const double expected = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (variance <= 0.0) return out;
  double centred = out.w_plus - expected;
  switch (alternative) {
    case Alternative::Greater:
      centred -= 0.5;
      break;
    case Alternative::Less:
      centred += 0.5;
      break;
    case Alternative::TwoSided:
      centred -= 0.5 * ((centred > 0) - (centred < 0));
      break;
  }
  out.z = centred / std::sqrt(variance);
  const double upper_tail = 0.5 * std::erfc(out.z / std::sqrt(2.0));
  switch (alternative) {
    case Alternative::Greater:
      out.p_value = upper_tail;
      break;
    case Alternative::Less:
      out.p_value = 1.0 - upper_tail;
      break;
    case Alternative::TwoSided:
      out.p_value = std::min(1.0, std::erfc(std::abs(out.z) / std::sqrt(2.0)));
      break;
  }
  return out;
}

}  // namespace edabm
