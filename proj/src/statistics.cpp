#include "blip/statistics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blip {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

SampleSummary summarize(std::span<const double> samples, double ref_value, double epsilon) {
  if (samples.size() < 2) throw std::domain_error("summarize needs at least two samples");
  SampleSummary s;
  s.replicas = static_cast<std::int64_t>(samples.size());
  const double count = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / count;
  double ss = 0.0;
  std::int64_t exceed = 0;
  for (const double v : samples) {
    ss += (v - s.mean) * (v - s.mean);
    if (std::abs(v - ref_value) >= epsilon) ++exceed;
  }
  s.variance = ss / (count - 1.0);
  s.se = std::sqrt(s.variance / count);
  s.median = median_of(std::vector<double>(samples.begin(), samples.end()));
  s.exceedance = static_cast<double>(exceed) / count;
  s.ref_value = ref_value;
  return s;
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected) {
  if (observed.empty() || observed.size() != expected.size()) {
    throw std::domain_error("chi_square_gof needs matching, non-empty observed/expected");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
  if (total <= 0.0) throw std::domain_error("chi_square_gof needs observations");
  std::vector<double> probs(expected.begin(), expected.end());
  const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (mass > 1.0 + 1e-9 || std::any_of(probs.begin(), probs.end(), [](double v) { return v < 0.0; })) {
    throw std::domain_error("expected probabilities must be non-negative and sum to at most 1");
  }
  probs.back() += std::max(0.0, 1.0 - mass);

  // Merge from the tail inward until each cell expects >= 5.
  std::vector<double> exp_cells;
  std::vector<double> obs_cells;
  double exp_acc = 0.0;
  double obs_acc = 0.0;
  for (std::size_t c = probs.size(); c-- > 0;) {
    exp_acc += probs[c] * total;
    obs_acc += static_cast<double>(observed[c]);
    if (exp_acc >= 5.0) {
      exp_cells.push_back(exp_acc);
      obs_cells.push_back(obs_acc);
      exp_acc = obs_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (exp_cells.empty()) {
      exp_cells.push_back(exp_acc);
      obs_cells.push_back(obs_acc);
    } else {
      exp_cells.back() += exp_acc;
      obs_cells.back() += obs_acc;
    }
  }

  ChiSquareResult result;
  result.cells = static_cast<std::int64_t>(exp_cells.size());
  for (std::size_t c = 0; c < exp_cells.size(); ++c) {
    result.statistic += (obs_cells[c] - exp_cells[c]) * (obs_cells[c] - exp_cells[c]) / exp_cells[c];
  }
  result.degrees_of_freedom = result.cells - 1;
  result.p_value = result.degrees_of_freedom > 0
                       ? boost::math::gamma_q(0.5 * static_cast<double>(result.degrees_of_freedom),
                                              0.5 * result.statistic)
                       : 1.0;
  return result;
}

RankTestResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("mann_whitney needs two non-empty samples");
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> pooled;
  pooled.reserve(a.size() + b.size());
  for (const double v : a) pooled.push_back({v, true});
  for (const double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(), [](const Item& l, const Item& r) { return l.value < r.value; });

  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double total = n1 + n2;
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t lo = 0; lo < pooled.size();) {
    std::size_t hi = lo;
    while (hi < pooled.size() && pooled[hi].value == pooled[lo].value) ++hi;
    const double avg_rank = 0.5 * static_cast<double>(lo + 1 + hi);
    const double ties = static_cast<double>(hi - lo);
    tie_term += ties * ties * ties - ties;
    for (std::size_t c = lo; c < hi; ++c) {
      if (pooled[c].from_a) rank_sum_a += avg_rank;
    }
    lo = hi;
  }
  RankTestResult result;
  result.u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double mean_u = n1 * n2 / 2.0;
  const double var_u = n1 * n2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (var_u <= 0.0) {
    result.z = 0.0;
    result.p_value = 1.0;
    return result;
  }
  result.z = (result.u - mean_u) / std::sqrt(var_u);
  result.p_value = 2.0 * (1.0 - normal_cdf(std::abs(result.z)));
  return result;
}

}  // namespace blip
