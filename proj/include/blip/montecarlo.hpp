#pragma once

#include "blip/fields.hpp"
#include "blip/statistics.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blip {

/// A strip, horizon or cell budget would have been exceeded. Experiments
/// fail with this instead of returning a truncated sample.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalizing sequence d_n. Only families with d_n -> infinity and
/// d_n = o(n) can be constructed.
struct DnRule {
  enum class Family { power, log_power, power_log };

  Family family = Family::power;
  double exponent = 0.25;  ///< gamma for power / power_log, kappa for log_power

  /// "power:0.25", "log_power:2", "power_log:0.5".
  static DnRule parse(const std::string& text);
  static DnRule make(Family family, double exponent);

  double operator()(std::int64_t n) const;
  std::string to_string() const;
};

enum class SamplerMode { automatic, direct, fast };
SamplerMode parse_sampler_mode(const std::string& text);
std::string to_string(SamplerMode mode);

struct ExperimentConfig {
  ModelParams params = ModelParams::from_p(0.5);
  double a = 0.75;
  double x = 1.0;
  double y = 1.0;
  std::vector<std::int64_t> n_list{500};
  std::int64_t replicas = 200;
  DnRule dn = DnRule::make(DnRule::Family::power, 0.25);
  double epsilon = 1.0;
  /// Margin multiplier of the thin-strip sampler's initial width.
  double strip_constant = 4.0;
  double c1 = 1.0;
  double beta = 0.5;
  std::uint64_t seed = 0;
  std::int64_t workers = 1;
  /// Per-sample cell budget for direct DP and strip sweeps.
  std::int64_t cell_budget = std::int64_t{1} << 27;
  SamplerMode mode = SamplerMode::automatic;

  /// Ladder, replica count, epsilon, strip constant, worker count; throws
  /// ConfigError naming the offending field.
  void validate() const;
};

struct ReplicaRecord {
  std::string experiment;
  std::int64_t n = 0;
  std::int64_t replica = 0;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct LadderResult {
  std::string experiment;
  std::vector<SampleSummary> summaries;
  std::vector<ReplicaRecord> records;
};

/// Stream id of replica r at size n of `experiment`; a pure function, so any
/// single replica can be replayed alone.
std::uint64_t replica_stream(std::string_view experiment, std::int64_t n, std::int64_t replica);

/// Runs task(0 .. count - 1) on `workers` threads and returns the results in
/// index order. If several tasks throw, the lowest index wins.
std::vector<double> run_replicas(std::int64_t count, std::int64_t workers,
                                 const std::function<double(std::int64_t)>& task);

/// m = floor(n / p - x n^a), the soft-edge column count.
std::int64_t soft_edge_columns(const ModelParams& params, double x, double a, std::int64_t n);

struct StripPolicy {
  double multiplier = 4.0;
  std::int64_t pad = 16;
  std::int64_t cell_budget = std::int64_t{1} << 27;

  /// ceil(multiplier (p x)^2 n^(2a-1) / (4q)) + pad.
  std::int64_t initial_width(const ModelParams& params, double x, double a, std::int64_t n) const;
};

struct FastSample {
  std::int64_t length = 0;       ///< L(m, n)
  std::int64_t first_cross = 0;  ///< i*, so n - L = i* - 1
  std::int64_t strip_width = 0;  ///< final width used
  std::int64_t widenings = 0;
};

/// Samples L(m, n), m > n, as n - (i* - 1) with
/// i* = min{i >= 1 : G(i, m - n + i) >= m + i} on shifted geometric weights.
/// Sweeps rows 1 .. m - n + W of a strip of W columns; W starts at
/// `initial_width`, doubles while i* > W and is capped at n + 1, where the
/// crossing is certain.
FastSample fast_soft_edge_sample(const GeometricField& shifted, std::int64_t m, std::int64_t n,
                                 std::int64_t initial_width, const StripPolicy& policy);
FastSample fast_soft_edge_sample(const ModelParams& params, RngSpec rng, std::int64_t m,
                                 std::int64_t n, std::int64_t initial_width,
                                 const StripPolicy& policy);

/// n^-1 L(floor(nx), floor(ny)) per n; reference psi(x, y).
LadderResult estimate_shape(const ExperimentConfig& config);

/// (n - L(m, n)) / d_n per n, 0 < a <= 1/2; reference 0, exceedance at epsilon.
LadderResult soft_edge_subcritical(const ExperimentConfig& config);

/// (n - L(m, n)) / n^(2a-1) per n, 1/2 < a < 1; reference (p x)^2 / (4q).
LadderResult soft_edge_supercritical(const ExperimentConfig& config);

/// (G(floor(c1 n), floor(y n^beta)) - mu j) / n^((1+beta)/2) on shifted
/// weights; reference 2 sigma sqrt(c1 y), mu = 1/q, sigma = sqrt(p)/q.
LadderResult hard_edge_check(const ExperimentConfig& config);

struct CrosscheckResult {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t j = 0;
  std::int64_t replicas = 0;
  double p_direct = 0.0;     ///< P{L(m, n) <= m - j}
  double p_geometric = 0.0;  ///< P{G(n - m + j, j) <= n + j - 1}
  double joint_se = 0.0;
  bool agrees() const;  ///< within 3 joint standard errors
  std::vector<ReplicaRecord> records;
};

CrosscheckResult exceedance_crosscheck(const ExperimentConfig& config, std::int64_t m,
                                       std::int64_t n, std::int64_t j);

/// j such that P{L(m, n) <= m - j} is closest to 1/2, from `pilot_replicas`
/// thin-strip samples on streams disjoint from the main run.
std::int64_t pilot_threshold(const ExperimentConfig& config, std::int64_t m, std::int64_t n,
                             std::int64_t pilot_replicas);

struct ComparisonResult {
  SampleSummary fast;
  SampleSummary direct;
  double joint_se = 0.0;
  RankTestResult rank;
  bool agrees() const;  ///< means within 3 joint standard errors
  std::vector<ReplicaRecord> records;
};

/// Same (m, n) soft-edge statistic from both samplers at config.n_list[0].
ComparisonResult fast_vs_direct(const ExperimentConfig& config);

struct FragmentationLawResult {
  std::int64_t platoon_size = 0;
  std::int64_t events = 0;
  std::vector<std::int64_t> histogram;  ///< counts of M = 0 .. platoon_size
  ChiSquareResult chi_square;
};

/// One step of the fragmentation process from `platoons` separated blocks of
/// equal size; every block yields one independent break event.
FragmentationLawResult fragmentation_law(const ModelParams& params, RngSpec rng,
                                         std::int64_t platoon_size, std::int64_t platoons);

}  // namespace blip
