// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
// Exit status is the number of failed criteria (0 when all pass).

#include "blip/identities.hpp"
#include "blip/montecarlo.hpp"
#include "blip/passage.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace blip;

namespace {

constexpr std::uint64_t kSeed = 20261014;

std::int64_t worker_count() {
  if (const char* env = std::getenv("BLIP_WORKERS")) return std::max(1, std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = outcome.pass;
  std::string timing = fmt::format("{:.1f}s", seconds);
  if (time_limit_s > 0) {
    timing += fmt::format(" (limit {:.0f}s)", time_limit_s);
    pass = pass && seconds <= time_limit_s;
  }
  if (!pass) ++failures;
  fmt::print("{} [{}] {}: {} [{}]\n", pass ? "PASS" : "FAIL", id, name, outcome.detail, timing);
  std::fflush(stdout);
}

ExperimentConfig base(double p) {
  ExperimentConfig config;
  config.params = ModelParams::from_p(p);
  config.seed = kSeed;
  config.workers = worker_count();
  return config;
}

/// Counts failing reports over `fields` independent fields of one identity.
template <typename Check>
std::int64_t failing_fields(const std::string& tag, std::int64_t fields, Check check) {
  const auto passed = run_replicas(fields, worker_count(), [&](std::int64_t f) {
    return check(RngSpec{kSeed, replica_stream(tag, 0, f)}, f) ? 1.0 : 0.0;
  });
  std::int64_t bad = 0;
  for (const double v : passed) bad += v == 0.0;
  return bad;
}

}  // namespace

int main() {
  criterion(1, "relation, jump lemma and L(m,n) formula exact", 60, [] {
    std::int64_t bad = 0;
    std::int64_t points = 0;
    for (const double p : {0.2, 0.5, 0.8}) {
      bad += failing_fields(fmt::format("acc1-{}", p), 200, [&](RngSpec rng, std::int64_t f) {
        const BernoulliField field(ModelParams::from_p(p), rng);
        const std::int64_t size = 40 - f % 40;  // sides 1..40, each five times
        const bool ok = check_relation(field, size, size - 1).passed() &&
                        check_jump_lemma(field, size, size - 1).passed() &&
                        check_lm_formula(field, size, size).passed();
        return ok;
      });
      for (std::int64_t f = 0; f < 200; ++f) points += 3 * (40 - f % 40) * (40 - f % 40);
    }
    return Outcome{bad == 0, fmt::format("{} failing fields of 600, {} points", bad, points)};
  });

  criterion(2, "tau(i,j) = G(i,j) - j + 1 on shared weights", 10, [] {
    const std::int64_t bad = failing_fields("acc2", 100, [](RngSpec rng, std::int64_t f) {
      const double p = f % 3 == 0 ? 0.2 : f % 3 == 1 ? 0.5 : 0.8;
      const GeometricField w(ModelParams::from_p(p), rng, WeightConvention::unshifted);
      const std::int64_t rows = 100 - (f % 10) * 9;
      const std::int64_t cols = 100 - ((f * 7) % 10) * 9;
      return check_tau_equals_g(w, rows, cols).passed();
    });
    return Outcome{bad == 0, fmt::format("{} failing fields of 100 (up to 100x100)", bad)};
  });

  criterion(3, "shape LLN p=0.5 (x,y)=(1,1) n=2000 R=100, |mean - 0.82843| <= 0.02", 120, [] {
    ExperimentConfig config = base(0.5);
    config.x = 1.0;
    config.y = 1.0;
    config.n_list = {2000};
    config.replicas = 100;
    config.epsilon = 0.02;
    const SampleSummary s = estimate_shape(config).summaries.back();
    const double gap = std::abs(s.mean - 0.82843);
    return Outcome{gap <= 0.02, fmt::format("mean {:.5f}, ref {:.5f}, gap {:.5f}", s.mean, s.ref_value, gap)};
  });

  criterion(4, "soft edge a=1/2: exceedance non-increasing, <= 0.2 at n=8000", 0, [] {
    ExperimentConfig config = base(0.5);
    config.a = 0.5;
    config.x = 1.0;
    config.dn = DnRule::parse("power:0.25");
    config.epsilon = 1.0;
    config.n_list = {500, 2000, 8000};
    config.replicas = 200;
    const LadderResult r = soft_edge_subcritical(config);
    bool monotone = true;
    std::string ladder;
    for (std::size_t k = 0; k < r.summaries.size(); ++k) {
      const double f = r.summaries[k].exceedance;
      const double se = std::sqrt(f * (1 - f) / static_cast<double>(config.replicas));
      ladder += fmt::format("{}{}:{:.3f}", k ? " " : "", r.summaries[k].n, f);
      if (k > 0) {
        const double prev = r.summaries[k - 1].exceedance;
        const double prev_se = std::sqrt(prev * (1 - prev) / static_cast<double>(config.replicas));
        monotone = monotone && f <= prev + std::max(se, prev_se);
      }
    }
    const double last = r.summaries.back().exceedance;
    return Outcome{monotone && last <= 0.2, fmt::format("exceedance {}", ladder)};
  });

  criterion(5, "soft edge a=3/4: median within 0.03 of 0.125 at n=64000, distance non-increasing", 300, [] {
    ExperimentConfig config = base(0.5);
    config.a = 0.75;
    config.x = 1.0;
    config.n_list = {4000, 16000, 64000};
    config.replicas = 200;
    config.mode = SamplerMode::fast;
    const LadderResult r = soft_edge_supercritical(config);
    const double ref = 0.125;
    bool monotone = true;
    std::string ladder;
    for (std::size_t k = 0; k < r.summaries.size(); ++k) {
      const SampleSummary& s = r.summaries[k];
      ladder += fmt::format("{}{}:{:.4f}", k ? " " : "", s.n, s.median);
      if (k > 0) {
        // Standard error of a median, normal approximation: sqrt(pi/2) * se.
        const double se = std::sqrt(std::acos(-1.0) / 2) * std::max(s.se, r.summaries[k - 1].se);
        monotone = monotone && std::abs(s.median - ref) <= std::abs(r.summaries[k - 1].median - ref) + se;
      }
    }
    const double gap = std::abs(r.summaries.back().median - ref);
    return Outcome{monotone && gap <= 0.03, fmt::format("medians {}, final gap {:.4f}", ladder, gap)};
  });

  criterion(6, "hard edge beta=1/2: |median - 2 sqrt 2| / 2 sqrt 2 <= 0.15 at n=16000", 120, [] {
    ExperimentConfig config = base(0.5);
    config.c1 = 1.0;
    config.y = 1.0;
    config.beta = 0.5;
    config.n_list = {1000, 4000, 16000};
    config.replicas = 200;
    const LadderResult r = hard_edge_check(config);
    const SampleSummary& s = r.summaries.back();
    const double ref = 2 * std::sqrt(2.0);
    const double rel = std::abs(s.median - ref) / ref;
    std::string ladder;
    for (const auto& row : r.summaries) ladder += fmt::format(" {}:{:.4f}", row.n, row.median);
    return Outcome{rel <= 0.15, fmt::format("medians{}, relative gap {:.4f}", ladder, rel)};
  });

  criterion(7, "fragmentation law chi-square p > 0.01, 10^4 events, sizes {1,3,10}, p in {0.3,0.7}", 0, [] {
    bool ok = true;
    std::string detail;
    for (const double p : {0.3, 0.7}) {
      for (const int size : {1, 3, 10}) {
        const RngSpec rng{kSeed, replica_stream(fmt::format("acc7-{}", p), size, 0)};
        const FragmentationLawResult r = fragmentation_law(ModelParams::from_p(p), rng, size, 10000);
        ok = ok && r.events >= 10000 && r.chi_square.p_value > 0.01;
        detail += fmt::format("{}p={} n={}: {:.3f}", detail.empty() ? "" : ", ", p, size, r.chi_square.p_value);
      }
    }
    return Outcome{ok, detail};
  });

  criterion(8, "shear legality + jump duality (K=T=60) and z/w coupling (K=50, T=100) exact", 0, [] {
    const std::int64_t dual_bad = failing_fields("acc8-duality", 100, [](RngSpec rng, std::int64_t f) {
      const double p = 0.1 + 0.8 * static_cast<double>(f % 9) / 8.0;
      return check_shear_duality(BernoulliField(ModelParams::from_p(p), rng), 60, 60).passed();
    });
    const std::int64_t coupling_bad = failing_fields("acc8-coupling", 100, [](RngSpec rng, std::int64_t f) {
      const double p = 0.1 + 0.8 * static_cast<double>(f % 9) / 8.0;
      return check_coupling(BernoulliField(ModelParams::from_p(p), rng), 50, 100).passed();
    });
    return Outcome{dual_bad == 0 && coupling_bad == 0,
                   fmt::format("duality failures {}/100, coupling failures {}/100", dual_bad, coupling_bad)};
  });

  criterion(9, "cross-estimator agreement within 3 joint standard errors at n=500, R=2000", 0, [] {
    ExperimentConfig config = base(0.5);
    config.replicas = 2000;
    config.x = 1.0;
    config.a = 0.5;
    config.n_list = {500};
    const std::int64_t n = 500;
    const std::int64_t m = soft_edge_columns(config.params, 1.0, 0.5, n);  // floor(2n - sqrt n)
    const std::int64_t j = pilot_threshold(config, m, n, 400);
    const CrosscheckResult cross = exceedance_crosscheck(config, m, n, j);
    const bool in_band = cross.p_direct >= 0.2 && cross.p_direct <= 0.8;

    ExperimentConfig compare = config;
    compare.a = 0.75;
    const ComparisonResult cmp = fast_vs_direct(compare);
    return Outcome{cross.agrees() && in_band && cmp.agrees(),
                   fmt::format("exceedance j={} direct {:.4f} geometric {:.4f} (3se {:.4f}); "
                               "fast mean {:.4f} direct mean {:.4f} (3se {:.4f}), rank p {:.3f}",
                               j, cross.p_direct, cross.p_geometric, 3 * cross.joint_se, cmp.fast.mean,
                               cmp.direct.mean, 3 * cmp.joint_se, cmp.rank.p_value)};
  });

  fmt::print("{} of 9 criteria failed\n", failures);
  return failures;
}
