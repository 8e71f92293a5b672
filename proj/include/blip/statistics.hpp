#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace blip {

struct SampleSummary {
  std::int64_t n = 0;
  std::int64_t replicas = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double se = 0.0;        ///< sqrt(variance / replicas)
  double median = 0.0;
  double exceedance = 0.0;  ///< fraction with |value - ref_value| >= epsilon
  double ref_value = 0.0;
  double wall_seconds = 0.0;
};

/// Needs at least two samples.
SampleSummary summarize(std::span<const double> samples, double ref_value = 0.0,
                        double epsilon = 0.0);

double median_of(std::vector<double> values);

struct ChiSquareResult {
  double statistic = 0.0;
  std::int64_t degrees_of_freedom = 0;
  double p_value = 1.0;
  std::int64_t cells = 0;  ///< after merging
};

/// Pearson goodness of fit. `expected` is a probability vector (any residual
/// mass 1 - sum is added to the last cell as the tail); adjacent cells are
/// merged from the tail inward until every expected count is at least 5.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected);

struct RankTestResult {
  double u = 0.0;
  double z = 0.0;
  double p_value = 1.0;  ///< two-sided, normal approximation with tie correction
};

RankTestResult mann_whitney(std::span<const double> a, std::span<const double> b);

double normal_cdf(double z);

}  // namespace blip
