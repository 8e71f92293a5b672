#include "blip/identities.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace blip {

nlohmann::json to_json(const IdentityReport& report) {
  nlohmann::json j;
  j["identity"] = report.identity;
  j["seed"] = report.seed;
  j["stream"] = report.stream;
  j["p"] = report.p;
  j["dims"] = report.dims;
  j["points_checked"] = report.points_checked;
  j["counterexample"] = report.counterexample ? nlohmann::json(*report.counterexample) : nlohmann::json();
  if (!report.detail.empty()) j["detail"] = report.detail;
  return j;
}

namespace {

IdentityReport make_report(std::string name, const BernoulliField& field,
                           std::vector<std::int64_t> dims) {
  IdentityReport report;
  report.identity = std::move(name);
  report.seed = field.rng().master_seed;
  report.stream = field.rng().stream_id;
  report.p = field.params().p;
  report.dims = std::move(dims);
  return report;
}

// Explicit fields are padded with unmarked sites so the R-process has room;
// L' on the checked rectangle only reads the original sites.
BernoulliField with_room(const BernoulliField& field, std::int64_t width, std::int64_t rows) {
  if (!field.is_explicit() || (field.width() >= width && field.height() >= rows + 1)) return field;
  const std::int64_t row0 = field.first_row();
  MarkGrid grid = MarkGrid::Zero(std::max(width, field.width()), std::max(rows + 1, field.height()));
  for (std::int64_t r = 0; r < field.height(); ++r) {
    for (std::int64_t i = 1; i <= field.width(); ++i) grid(i - 1, r) = field.mark_at(i, row0 + r);
  }
  return BernoulliField::from_marks(std::move(grid), row0);
}

void require_positive(std::int64_t a, std::int64_t b, const char* what) {
  if (a < 1 || b < 0) throw std::domain_error(std::string(what) + ": invalid check bounds");
}

// k* = max{k in [lo, hi] : tau(offset + k, k) <= limit}, or 0 when empty.
std::int64_t max_admissible(const TauTable& tau, std::int64_t lo, std::int64_t hi,
                            std::int64_t offset, std::int64_t limit) {
  for (std::int64_t k = hi; k >= lo; --k) {
    if (tau.at_most(offset + k, k, limit)) return k;
  }
  return 0;
}

}  // namespace

RProcessEvidence RProcessEvidence::build(const BernoulliField& field, std::int64_t max_s,
                                         std::int64_t max_t) {
  const std::int64_t particles = max_s + max_t + 2;
  const std::int64_t horizon = max_t + 2;
  BernoulliField corner = shift_to_corner_indexing(with_room(field, particles + horizon, horizon + 1));
  ParticleTrajectory traj = evolve_r(corner, particles, horizon);
  TauTable tau = extract_tau(traj, max_t + 1, max_s);
  return RProcessEvidence{std::move(corner), std::move(traj), std::move(tau)};
}

IdentityReport check_relation(const BernoulliField& field, std::int64_t max_s, std::int64_t max_t) {
  require_positive(max_s, max_t, "check_relation");
  IdentityReport report = make_report("relation", field, {max_s, max_t});
  const auto evidence = RProcessEvidence::build(field, max_s, max_t);
  const BlipTable corner_lengths = blip_table(evidence.corner_field, max_s, max_t + 1);
  if (!tau_is_monotone(evidence.tau)) {
    report.counterexample = std::vector<std::int64_t>{};
    report.detail = "tau table is not monotone";
    return report;
  }
  for (std::int64_t s = 1; s <= max_s; ++s) {
    for (std::int64_t t = 0; t <= max_t; ++t) {
      const std::int64_t lo = std::max<std::int64_t>(s - t - 1, 1);
      const std::int64_t k_star = max_admissible(evidence.tau, lo, s, t + 1 - s, t + 1);
      const std::int64_t rhs = s - k_star;  // k_star = 0 encodes the empty set
      const std::int64_t lhs = corner_lengths(s - 1, t);
      ++report.points_checked;
      if (lhs != rhs && !report.counterexample) {
        report.counterexample = std::vector<std::int64_t>{s, t};
        report.detail = "L'=" + std::to_string(lhs) + " formula=" + std::to_string(rhs);
      }
    }
  }
  return report;
}

IdentityReport check_jump_lemma(const BernoulliField& field, std::int64_t max_s,
                                std::int64_t max_t) {
  require_positive(max_s, max_t, "check_jump_lemma");
  IdentityReport report = make_report("jump_lemma", field, {max_s, max_t});
  const auto evidence = RProcessEvidence::build(field, max_s, max_t);
  const BlipTable corner_lengths = blip_table(evidence.corner_field, max_s, max_t + 1);
  const auto& traj = evidence.trajectory;
  for (std::int64_t s = 1; s <= max_s; ++s) {
    for (std::int64_t t = 0; t <= max_t; ++t) {
      for (std::int64_t y = 1; y <= s; ++y) {
        const std::int64_t k = s - y + 1;
        const bool path_side = corner_lengths(s - 1, t) >= y;
        const bool jump_side = traj.pos(k, t + 1) - k >= y;
        ++report.points_checked;
        if (path_side != jump_side && !report.counterexample) {
          report.counterexample = std::vector<std::int64_t>{s, t, y};
          report.detail = path_side ? "path exists but particle lagged" : "particle jumped without path";
        }
      }
    }
  }
  return report;
}

IdentityReport check_lm_formula(const BernoulliField& field, std::int64_t max_m,
                                std::int64_t max_n) {
  if (max_m < 1 || max_n < 1) throw std::domain_error("check_lm_formula: invalid check bounds");
  IdentityReport report = make_report("lm_formula", field, {max_m, max_n});
  const auto evidence = RProcessEvidence::build(field, max_m, max_n - 1);
  const BlipTable lengths = blip_table(field, max_m, max_n);
  for (std::int64_t m = 1; m <= max_m; ++m) {
    for (std::int64_t n = 1; n <= max_n; ++n) {
      const std::int64_t lo = std::max<std::int64_t>(m - n, 1);
      const std::int64_t k_star = max_admissible(evidence.tau, lo, m, n - m, n);
      const std::int64_t rhs = m - k_star;
      const std::int64_t lhs = lengths(m - 1, n - 1);
      ++report.points_checked;
      if (lhs != rhs && !report.counterexample) {
        report.counterexample = std::vector<std::int64_t>{m, n};
        report.detail = "L=" + std::to_string(lhs) + " formula=" + std::to_string(rhs);
      }
    }
  }
  return report;
}

EventPair check_event_b(const BernoulliField& field, std::int64_t m, std::int64_t n, double j) {
  if (m < 1 || n < 1) throw std::domain_error("check_event_b needs m, n >= 1");
  const double lower = static_cast<double>(std::max<std::int64_t>(m - n, 1));
  if (!(j >= lower && j <= static_cast<double>(m))) {
    throw std::domain_error("check_event_b needs (m-n) v 1 <= j <= m");
  }
  const auto whole = static_cast<std::int64_t>(std::floor(j));
  const auto evidence = RProcessEvidence::build(field, m, n - 1);
  EventPair pair;
  pair.lhs = blip_length(field, m, n) <= m - whole;
  pair.rhs = evidence.tau.at_most(n - m + whole, whole, n);
  return pair;
}

IdentityReport check_tau_equals_g(const GeometricField& unshifted, const GeometricField& shifted,
                                  std::int64_t rows, std::int64_t cols) {
  if (unshifted.convention() != WeightConvention::unshifted ||
      shifted.convention() != WeightConvention::shifted) {
    throw ConfigError("check_tau_equals_g needs an (unshifted, shifted) pair");
  }
  if (!unshifted.same_source(shifted)) {
    throw ConfigError("check_tau_equals_g needs both conventions on one seed and stream");
  }
  IdentityReport report;
  report.identity = "tau_equals_g";
  report.seed = unshifted.rng().master_seed;
  report.stream = unshifted.rng().stream_id;
  report.p = unshifted.params().p;
  report.dims = {rows, cols};
  const TauTable tau = tau_recursion(unshifted, rows, cols);
  const PassageTable g = corner_growth_table(shifted, rows, cols);
  for (std::int64_t i = 1; i <= rows; ++i) {
    for (std::int64_t j = 1; j <= cols; ++j) {
      ++report.points_checked;
      if (tau(i, j) != g(i - 1, j - 1) - j + 1 && !report.counterexample) {
        report.counterexample = std::vector<std::int64_t>{i, j};
        report.detail = "tau=" + std::to_string(tau(i, j)) + " G=" + std::to_string(g(i - 1, j - 1));
      }
    }
  }
  return report;
}

IdentityReport check_tau_equals_g(const GeometricField& field, std::int64_t rows,
                                  std::int64_t cols) {
  return check_tau_equals_g(field.with_convention(WeightConvention::unshifted),
                            field.with_convention(WeightConvention::shifted), rows, cols);
}

std::vector<std::int64_t> spread_initial(const BernoulliField& field, std::int64_t particles) {
  const SiteHasher aux(field.rng(), SiteHasher::Purpose::aux);
  std::vector<std::int64_t> initial;
  initial.reserve(static_cast<std::size_t>(particles));
  std::int64_t x = 0;
  for (std::int64_t k = 1; k <= particles; ++k) {
    // Gap - 1 ~ Geom on {0, 1, ...} with mean 2.
    const double u = aux.uniform_open_left(k, 0);
    x += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log(2.0 / 3.0)));
    initial.push_back(x);
  }
  return initial;
}

IdentityReport check_coupling(const BernoulliField& field, std::span<const std::int64_t> initial,
                              std::int64_t horizon) {
  const auto count = static_cast<std::int64_t>(initial.size());
  IdentityReport report = make_report("coupling", field, {count, horizon});
  const ParticleTrajectory z = evolve_marked_left(field, initial, horizon);
  const ParticleTrajectory w = evolve_blocking_right(field, initial, horizon);
  for (std::int64_t t = 0; t <= horizon && count > 0; ++t) {
    std::set<std::int64_t> z_sites;
    std::set<std::int64_t> w_sites;
    const std::int64_t rightmost = z.pos(count, t);
    for (std::int64_t k = 1; k <= count; ++k) z_sites.insert(z.pos(k, t));
    for (std::int64_t k = w.first_label(); k <= w.last_label(); ++k) {
      const std::int64_t x = w.pos(k, t);
      if (x >= 1 && x <= rightmost) w_sites.insert(x);
    }
    ++report.points_checked;
    if (z_sites != w_sites && !report.counterexample) {
      report.counterexample = std::vector<std::int64_t>{t};
      report.detail = "occupation differs";
    }
    for (std::int64_t k = 1; k <= count; ++k) {
      ++report.points_checked;
      if (w.pos(k - t, t) != z.pos(k, t) && !report.counterexample) {
        report.counterexample = std::vector<std::int64_t>{t, k};
        report.detail = "w_{k-t}(t)=" + std::to_string(w.pos(k - t, t)) +
                        " z_k(t)=" + std::to_string(z.pos(k, t));
      }
    }
  }
  return report;
}

IdentityReport check_coupling(const BernoulliField& field, std::int64_t particles,
                              std::int64_t horizon) {
  const auto initial = spread_initial(field, particles);
  return check_coupling(field, initial, horizon);
}

IdentityReport check_shear_duality(const BernoulliField& field, std::int64_t particles,
                                   std::int64_t horizon) {
  IdentityReport report = make_report("shear_duality", field, {particles, horizon});
  const BernoulliField corner =
      shift_to_corner_indexing(with_room(field, particles + horizon, horizon));
  const ParticleTrajectory r = evolve_r(corner, particles, horizon);
  const ParticleTrajectory d = r_to_dtasep(r);
  if (const auto violation = check_dtasep_legality(d)) {
    report.counterexample = std::vector<std::int64_t>{violation->t, violation->k};
    report.detail = "DTASEP rule violated: " + violation->rule;
  }
  // Count jumps step by step in each picture; every step must be exactly one
  // of a right jump in R or a left jump in DTASEP.
  std::vector<std::int64_t> right_jumps(static_cast<std::size_t>(particles) + 1, 0);
  std::vector<std::int64_t> left_jumps(static_cast<std::size_t>(particles) + 1, 0);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    for (std::int64_t k = 1; k <= particles; ++k) {
      if (t > 0) {
        right_jumps[k] += r.pos(k, t) > r.pos(k, t - 1) ? 1 : 0;
        left_jumps[k] += d.pos(k, t) < d.pos(k, t - 1) ? 1 : 0;
      }
      ++report.points_checked;
      if (right_jumps[k] + left_jumps[k] != t && !report.counterexample) {
        report.counterexample = std::vector<std::int64_t>{t, k};
        report.detail = "jump counts do not add up to t";
      }
    }
  }
  return report;
}

}  // namespace blip
