#include "blip/montecarlo.hpp"

#include "blip/particles.hpp"
#include "blip/passage.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace blip {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

/// Runs one ladder: sample(n, rng) per replica, folded in index order.
LadderResult run_ladder(const ExperimentConfig& config, const std::string& experiment,
                        const std::function<double(std::int64_t)>& ref_value,
                        const std::function<double(std::int64_t, RngSpec)>& sample) {
  LadderResult result;
  result.experiment = experiment;
  for (const std::int64_t n : config.n_list) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> values =
        run_replicas(config.replicas, config.workers, [&](std::int64_t r) {
          return sample(n, RngSpec{config.seed, replica_stream(experiment, n, r)});
        });
    SampleSummary summary = summarize(values, ref_value(n), config.epsilon);
    summary.n = n;
    summary.wall_seconds = elapsed_since(start);
    result.summaries.push_back(summary);
    for (std::int64_t r = 0; r < config.replicas; ++r) {
      result.records.push_back(ReplicaRecord{experiment, n, r, values[static_cast<std::size_t>(r)],
                                             config.seed, replica_stream(experiment, n, r)});
    }
  }
  return result;
}

std::int32_t direct_blip(const ModelParams& params, RngSpec rng, std::int64_t m, std::int64_t n,
                         std::int64_t budget) {
  if (static_cast<double>(m) * static_cast<double>(n) > static_cast<double>(budget)) {
    throw BudgetError(fmt::format("direct DP on {} x {} exceeds the cell budget {}", m, n, budget));
  }
  return blip_length(BernoulliField(params, rng), m, n);
}

StripPolicy policy_of(const ExperimentConfig& config) {
  StripPolicy policy;
  policy.multiplier = config.strip_constant;
  policy.cell_budget = config.cell_budget;
  return policy;
}

/// n - L(m, n) with the sampler chosen by `mode`.
std::int64_t soft_edge_deficit(const ExperimentConfig& config, RngSpec rng, std::int64_t m,
                               std::int64_t n, SamplerMode mode) {
  const bool fast = mode == SamplerMode::fast || (mode == SamplerMode::automatic && m > n);
  if (!fast) return n - direct_blip(config.params, rng, m, n, config.cell_budget);
  const StripPolicy policy = policy_of(config);
  const FastSample s = fast_soft_edge_sample(config.params, rng, m, n,
                                             policy.initial_width(config.params, config.x, config.a, n),
                                             policy);
  return n - s.length;
}

void require_soft_edge_params(const ExperimentConfig& config) {
  require(config.params.p > 0.0 && config.params.p < 1.0, "p: soft-edge runs need 0 < p < 1");
}

}  // namespace

// ---------------------------------------------------------------------------

DnRule DnRule::make(Family family, double exponent) {
  switch (family) {
    case Family::power:
    case Family::power_log:
      require(exponent > 0.0 && exponent < 1.0, "dn: exponent gamma must lie in (0, 1)");
      break;
    case Family::log_power:
      require(exponent > 0.0, "dn: exponent kappa must be positive");
      break;
  }
  DnRule rule;
  rule.family = family;
  rule.exponent = exponent;
  return rule;
}

DnRule DnRule::parse(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, "dn: expected family:exponent, got '" + text + "'");
  const std::string name = text.substr(0, colon);
  double exponent = 0.0;
  try {
    std::size_t used = 0;
    exponent = std::stod(text.substr(colon + 1), &used);
    require(used == text.size() - colon - 1, "dn: trailing characters in '" + text + "'");
  } catch (const std::logic_error&) {
    throw ConfigError("dn: bad exponent in '" + text + "'");
  }
  if (name == "power") return make(Family::power, exponent);
  if (name == "log_power") return make(Family::log_power, exponent);
  if (name == "power_log") return make(Family::power_log, exponent);
  throw ConfigError("dn: unknown family '" + name + "' (power, log_power, power_log)");
}

double DnRule::operator()(std::int64_t n) const {
  const double v = static_cast<double>(n);
  switch (family) {
    case Family::power: return std::pow(v, exponent);
    case Family::log_power: return std::pow(std::log(v), exponent);
    case Family::power_log: return std::pow(v, exponent) * std::log(v);
  }
  return 0.0;
}

std::string DnRule::to_string() const {
  const char* name = family == Family::power       ? "power"
                     : family == Family::log_power ? "log_power"
                                                   : "power_log";
  return fmt::format("{}:{}", name, exponent);
}

SamplerMode parse_sampler_mode(const std::string& text) {
  if (text == "auto") return SamplerMode::automatic;
  if (text == "direct") return SamplerMode::direct;
  if (text == "fast") return SamplerMode::fast;
  throw ConfigError("sampler: expected auto, direct or fast, got '" + text + "'");
}

std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::automatic: return "auto";
    case SamplerMode::direct: return "direct";
    case SamplerMode::fast: return "fast";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  require(!n_list.empty(), "n: the size ladder is empty");
  require(n_list.front() >= 1, "n: sizes must be positive");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    require(n_list[k] > n_list[k - 1], "n: the size ladder must be strictly increasing");
  }
  require(replicas >= 2, "reps: at least two replicas are needed");
  require(epsilon > 0.0, "epsilon: must be positive");
  require(strip_constant > 0.0, "strip-constant: must be positive");
  require(workers >= 1, "workers: must be at least 1");
  require(cell_budget >= 1, "cell-budget: must be positive");
  require(x >= 0.0, "x: must be non-negative");
  require(a > 0.0 && a <= 1.0, "a: must lie in (0, 1]");
}

std::uint64_t replica_stream(std::string_view experiment, std::int64_t n, std::int64_t replica) {
  std::uint64_t h = mix64(fnv1a(experiment));
  h = mix64(h ^ static_cast<std::uint64_t>(n));
  return mix64(h ^ (static_cast<std::uint64_t>(replica) * 0x9E3779B97F4A7C15ULL));
}

std::vector<double> run_replicas(std::int64_t count, std::int64_t workers,
                                 const std::function<double(std::int64_t)>& task) {
  std::vector<double> results(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (count <= 0) return results;
  const std::int64_t threads = std::clamp<std::int64_t>(workers, 1, count);
  std::atomic<std::int64_t> next{0};
  std::mutex failure_mutex;
  std::int64_t failed_index = count;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::int64_t r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
      try {
        results[static_cast<std::size_t>(r)] = task(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (r < failed_index) {
          failed_index = r;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (std::int64_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::int64_t soft_edge_columns(const ModelParams& params, double x, double a, std::int64_t n) {
  require(params.p > 0.0, "p: soft edge needs p > 0");
  const double v = static_cast<double>(n);
  const double m = std::floor(v / params.p - x * std::pow(v, a));
  require(m >= 1.0, fmt::format("n: soft-edge column count is empty at n = {}", n));
  return static_cast<std::int64_t>(m);
}

std::int64_t StripPolicy::initial_width(const ModelParams& params, double x, double a,
                                        std::int64_t n) const {
  const double predicted = soft_edge_constant(params, x) * std::pow(static_cast<double>(n), 2.0 * a - 1.0);
  return static_cast<std::int64_t>(std::ceil(multiplier * predicted)) + pad;
}

FastSample fast_soft_edge_sample(const GeometricField& shifted, std::int64_t m, std::int64_t n,
                                 std::int64_t initial_width, const StripPolicy& policy) {
  if (shifted.convention() != WeightConvention::shifted) {
    throw ConfigError("thin-strip sampler needs shifted geometric weights");
  }
  if (n < 1 || m <= n) throw std::domain_error("thin-strip sampler needs m > n >= 1");
  const std::int64_t offset = m - n;
  FastSample sample;
  sample.strip_width = std::clamp<std::int64_t>(initial_width, 1, n + 1);
  std::vector<std::int64_t> g;
  std::vector<std::int64_t> w;
  for (;;) {
    const std::int64_t width = sample.strip_width;
    const std::int64_t rows = offset + width;
    if (static_cast<double>(width) * static_cast<double>(rows) > static_cast<double>(policy.cell_budget)) {
      throw BudgetError(fmt::format("thin strip {} x {} exceeds the cell budget {}", width, rows,
                                    policy.cell_budget));
    }
    g.assign(static_cast<std::size_t>(width), 0);
    w.resize(static_cast<std::size_t>(width));
    for (std::int64_t j = 1; j <= rows; ++j) {
      shifted.fill_row(j, 1, w);
      std::int64_t left = 0;
      for (std::size_t c = 0; c < g.size(); ++c) {
        g[c] = std::max(g[c], left) + w[c];
        left = g[c];
      }
      const std::int64_t i = j - offset;
      if (i >= 1 && g[static_cast<std::size_t>(i - 1)] >= m + i) {
        sample.first_cross = i;
        sample.length = n - (i - 1);
        return sample;
      }
    }
    if (width == n + 1) {
      throw std::logic_error("thin strip failed to cross at i = n + 1; weights below 1?");
    }
    sample.strip_width = std::min(2 * width, n + 1);
    ++sample.widenings;
  }
}

FastSample fast_soft_edge_sample(const ModelParams& params, RngSpec rng, std::int64_t m,
                                 std::int64_t n, std::int64_t initial_width,
                                 const StripPolicy& policy) {
  return fast_soft_edge_sample(GeometricField(params, rng, WeightConvention::shifted), m, n,
                               initial_width, policy);
}

// ---------------------------------------------------------------------------

LadderResult estimate_shape(const ExperimentConfig& config) {
  config.validate();
  require(config.x > 0.0 && config.y > 0.0, "x, y: shape queries need x, y > 0");
  const double ref = psi(ShapeQuery{config.x, config.y, config.params});
  return run_ladder(
      config, "shape", [&](std::int64_t) { return ref; },
      [&](std::int64_t n, RngSpec rng) {
        const auto m = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * config.x));
        const auto rows = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * config.y));
        if (m < 1 || rows < 1) return 0.0;
        return static_cast<double>(direct_blip(config.params, rng, m, rows, config.cell_budget)) /
               static_cast<double>(n);
      });
}

LadderResult soft_edge_subcritical(const ExperimentConfig& config) {
  config.validate();
  require_soft_edge_params(config);
  require(config.a > 0.0 && config.a <= 0.5, "a: subcritical soft edge needs 0 < a <= 1/2");
  return run_ladder(
      config, "soft-edge-sub", [](std::int64_t) { return 0.0; },
      [&](std::int64_t n, RngSpec rng) {
        const std::int64_t m = soft_edge_columns(config.params, config.x, config.a, n);
        return static_cast<double>(soft_edge_deficit(config, rng, m, n, config.mode)) / config.dn(n);
      });
}

LadderResult soft_edge_supercritical(const ExperimentConfig& config) {
  config.validate();
  require_soft_edge_params(config);
  require(config.a > 0.5 && config.a < 1.0, "a: supercritical soft edge needs 1/2 < a < 1");
  const double ref = soft_edge_constant(config.params, config.x);
  return run_ladder(
      config, "soft-edge-super", [&](std::int64_t) { return ref; },
      [&](std::int64_t n, RngSpec rng) {
        const std::int64_t m = soft_edge_columns(config.params, config.x, config.a, n);
        const double scale = std::pow(static_cast<double>(n), 2.0 * config.a - 1.0);
        return static_cast<double>(soft_edge_deficit(config, rng, m, n, config.mode)) / scale;
      });
}

LadderResult hard_edge_check(const ExperimentConfig& config) {
  config.validate();
  require(config.params.p > 0.0 && config.params.p < 1.0, "p: hard edge needs 0 < p < 1");
  require(config.beta > 0.0 && config.beta < 1.0, "beta: must lie in (0, 1)");
  require(config.y > 0.0, "y: must be positive");
  require(config.c1 > 0.0, "c1: must be positive");
  const double mu = 1.0 / config.params.q;
  const double sigma = std::sqrt(config.params.p) / config.params.q;
  const double ref = 2.0 * sigma * std::sqrt(config.c1 * config.y);
  return run_ladder(
      config, "hard-edge", [&](std::int64_t) { return ref; },
      [&](std::int64_t n, RngSpec rng) {
        const double v = static_cast<double>(n);
        const auto j = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(config.c1 * v)));
        // A strip thinner than one row is read as the single-row case.
        const auto rows = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(config.y * std::pow(v, config.beta))));
        if (static_cast<double>(j) * static_cast<double>(rows) > static_cast<double>(config.cell_budget)) {
          throw BudgetError(fmt::format("hard-edge grid {} x {} exceeds the cell budget", j, rows));
        }
        const GeometricField field(config.params, rng, WeightConvention::shifted);
        const double g = static_cast<double>(corner_growth(field, j, rows));
        return (g - mu * static_cast<double>(j)) / std::pow(v, (1.0 + config.beta) / 2.0);
      });
}

// ---------------------------------------------------------------------------

bool CrosscheckResult::agrees() const {
  return std::abs(p_direct - p_geometric) <= 3.0 * joint_se;
}

bool ComparisonResult::agrees() const {
  return std::abs(fast.mean - direct.mean) <= 3.0 * joint_se;
}

CrosscheckResult exceedance_crosscheck(const ExperimentConfig& config, std::int64_t m,
                                       std::int64_t n, std::int64_t j) {
  config.validate();
  require_soft_edge_params(config);
  if (n < 1 || m < 1) throw std::domain_error("crosscheck needs m, n >= 1");
  if (j < std::max<std::int64_t>(m - n, 1) || j > m) {
    throw std::domain_error(fmt::format("crosscheck threshold j = {} outside [{}, {}]", j,
                                        std::max<std::int64_t>(m - n, 1), m));
  }
  const std::int64_t i = n - m + j;
  CrosscheckResult result;
  result.m = m;
  result.n = n;
  result.j = j;
  result.replicas = config.replicas;

  const std::vector<double> direct = run_replicas(config.replicas, config.workers, [&](std::int64_t r) {
    const RngSpec rng{config.seed, replica_stream("crosscheck-direct", n, r)};
    return direct_blip(config.params, rng, m, n, config.cell_budget) <= m - j ? 1.0 : 0.0;
  });
  const std::vector<double> geometric = run_replicas(config.replicas, config.workers, [&](std::int64_t r) {
    if (i <= 0) return 1.0;  // G over an empty rectangle is 0
    const RngSpec rng{config.seed, replica_stream("crosscheck-geometric", n, r)};
    const GeometricField field(config.params, rng, WeightConvention::shifted);
    return corner_growth(field, i, j) <= n + j - 1 ? 1.0 : 0.0;
  });

  const double reps = static_cast<double>(config.replicas);
  for (std::int64_t r = 0; r < config.replicas; ++r) {
    result.p_direct += direct[static_cast<std::size_t>(r)];
    result.p_geometric += geometric[static_cast<std::size_t>(r)];
  }
  result.p_direct /= reps;
  result.p_geometric /= reps;
  result.joint_se = std::sqrt(result.p_direct * (1.0 - result.p_direct) / reps +
                              result.p_geometric * (1.0 - result.p_geometric) / reps);
  for (std::int64_t r = 0; r < config.replicas; ++r) {
    result.records.push_back({"crosscheck-direct", n, r, direct[static_cast<std::size_t>(r)], config.seed,
                              replica_stream("crosscheck-direct", n, r)});
  }
  for (std::int64_t r = 0; r < config.replicas; ++r) {
    result.records.push_back({"crosscheck-geometric", n, r, geometric[static_cast<std::size_t>(r)],
                              config.seed, replica_stream("crosscheck-geometric", n, r)});
  }
  return result;
}

std::int64_t pilot_threshold(const ExperimentConfig& config, std::int64_t m, std::int64_t n,
                             std::int64_t pilot_replicas) {
  require(pilot_replicas >= 1, "pilot: at least one replica");
  const std::vector<double> deficits = run_replicas(pilot_replicas, config.workers, [&](std::int64_t r) {
    const RngSpec rng{config.seed, replica_stream("crosscheck-pilot", n, r)};
    return static_cast<double>(soft_edge_deficit(config, rng, m, n, SamplerMode::automatic));
  });
  const std::int64_t lo = std::max<std::int64_t>(m - n, 1);
  std::int64_t best_j = lo;
  double best_gap = 2.0;
  for (std::int64_t j = lo; j <= m; ++j) {
    // L <= m - j  iff  n - L >= n - m + j
    const double i = static_cast<double>(n - m + j);
    const auto hits = std::count_if(deficits.begin(), deficits.end(), [&](double d) { return d >= i; });
    const double prob = static_cast<double>(hits) / static_cast<double>(pilot_replicas);
    if (std::abs(prob - 0.5) < best_gap) {
      best_gap = std::abs(prob - 0.5);
      best_j = j;
    }
    if (hits == 0) break;
  }
  return best_j;
}

ComparisonResult fast_vs_direct(const ExperimentConfig& config) {
  config.validate();
  require_soft_edge_params(config);
  const std::int64_t n = config.n_list.front();
  const std::int64_t m = soft_edge_columns(config.params, config.x, config.a, n);
  require(m > n, "n: fast sampler comparison needs m > n");

  ComparisonResult result;
  std::vector<double> samples[2];
  const char* tags[2] = {"compare-fast", "compare-direct"};
  for (int side = 0; side < 2; ++side) {
    const auto start = std::chrono::steady_clock::now();
    const SamplerMode mode = side == 0 ? SamplerMode::fast : SamplerMode::direct;
    samples[side] = run_replicas(config.replicas, config.workers, [&](std::int64_t r) {
      const RngSpec rng{config.seed, replica_stream(tags[side], n, r)};
      return static_cast<double>(soft_edge_deficit(config, rng, m, n, mode));
    });
    SampleSummary& summary = side == 0 ? result.fast : result.direct;
    summary = summarize(samples[side], 0.0, config.epsilon);
    summary.n = n;
    summary.wall_seconds = elapsed_since(start);
    for (std::int64_t r = 0; r < config.replicas; ++r) {
      result.records.push_back({tags[side], n, r, samples[side][static_cast<std::size_t>(r)], config.seed,
                                replica_stream(tags[side], n, r)});
    }
  }
  result.joint_se = std::sqrt(result.fast.se * result.fast.se + result.direct.se * result.direct.se);
  result.rank = mann_whitney(samples[0], samples[1]);
  return result;
}

FragmentationLawResult fragmentation_law(const ModelParams& params, RngSpec rng,
                                         std::int64_t platoon_size, std::int64_t platoons) {
  if (platoon_size < 1 || platoons < 1) {
    throw std::domain_error("fragmentation law needs platoon_size, platoons >= 1");
  }
  std::vector<std::int64_t> positions;
  positions.reserve(static_cast<std::size_t>(platoon_size * platoons));
  for (std::int64_t b = 0; b < platoons; ++b) {
    for (std::int64_t c = 0; c < platoon_size; ++c) positions.push_back(b * (platoon_size + 1) + 1 + c);
  }
  const FragmentationRun run =
      evolve_fragmentation(SiteKeyedDraws(params, rng), PlatoonState::from_positions(positions), 1);

  FragmentationLawResult result;
  result.platoon_size = platoon_size;
  result.histogram.assign(static_cast<std::size_t>(platoon_size) + 1, 0);
  for (const BreakEvent& e : run.events) {
    ++result.histogram[static_cast<std::size_t>(e.broken)];
    ++result.events;
  }
  std::vector<double> expected;
  for (std::int64_t k = 0; k <= platoon_size; ++k) {
    expected.push_back(break_size_probability(params, platoon_size, k));
  }
  result.chi_square = chi_square_gof(result.histogram, expected);
  return result;
}

}  // namespace blip
