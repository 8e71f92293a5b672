#include "blip/particles.hpp"

#include <algorithm>
#include <cmath>

namespace blip {

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::R: return "R";
    case ProcessKind::DTASEP: return "DTASEP";
    case ProcessKind::Z: return "Z";
    case ProcessKind::W: return "W";
  }
  return "?";
}

ParticleTrajectory::ParticleTrajectory(ProcessKind kind, std::int64_t first_label,
                                       std::int64_t count, std::int64_t horizon)
    : kind_(kind), first_label_(first_label) {
  if (count < 0 || horizon < 0) {
    throw std::domain_error("trajectory needs non-negative particle count and horizon");
  }
  positions_.setZero(count, horizon + 1);
}

void write_trajectory_csv(std::ostream& out, const ParticleTrajectory& traj) {
  out << "k,t,pos\n";
  for (std::int64_t k = traj.first_label(); k <= traj.last_label(); ++k) {
    for (std::int64_t t = 0; t <= traj.horizon(); ++t) {
      out << k << ',' << t << ',' << traj.pos(k, t) << '\n';
    }
  }
}

void require_strictly_increasing(std::span<const std::int64_t> initial) {
  for (std::size_t k = 1; k < initial.size(); ++k) {
    if (initial[k] <= initial[k - 1]) {
      throw std::domain_error("initial configuration must be strictly increasing (labels " +
                              std::to_string(k) + ", " + std::to_string(k + 1) + ")");
    }
  }
}

// ---------------------------------------------------------------------------

ParticleTrajectory evolve_r(const BernoulliField& corner_field, std::int64_t particles,
                            std::int64_t horizon) {
  if (particles < 1 || horizon < 1) {
    throw std::domain_error("evolve_r needs K >= 1 and T >= 1");
  }
  if (corner_field.first_row() != 0) {
    throw std::domain_error("evolve_r expects a corner-indexed field (rows from 0)");
  }
  if (corner_field.width() < particles + horizon) {
    throw std::domain_error("field width " + std::to_string(corner_field.width()) +
                            " is below K + T = " + std::to_string(particles + horizon));
  }
  if (corner_field.height() < horizon) {
    throw std::domain_error("field height is below the horizon");
  }
  ParticleTrajectory traj(ProcessKind::R, 1, particles, horizon);
  for (std::int64_t k = 1; k <= particles; ++k) traj.pos(k, 0) = k;
  for (std::int64_t t = 0; t < horizon; ++t) {
    bool pushing = false;
    for (std::int64_t k = 1; k <= particles; ++k) {
      const std::int64_t here = traj.pos(k, t);
      const bool same_platoon = k > 1 && here == traj.pos(k - 1, t) + 1;
      if (!same_platoon) pushing = false;
      if (!pushing && corner_field.mark_at(here, t)) pushing = true;
      traj.pos(k, t + 1) = here + (pushing ? 1 : 0);
    }
  }
  return traj;
}

ParticleTrajectory r_to_dtasep(const ParticleTrajectory& r_traj) {
  if (r_traj.kind() != ProcessKind::R) {
    throw std::domain_error("r_to_dtasep expects an R trajectory");
  }
  ParticleTrajectory out(ProcessKind::DTASEP, r_traj.first_label(), r_traj.count(), r_traj.horizon());
  for (std::int64_t k = r_traj.first_label(); k <= r_traj.last_label(); ++k) {
    for (std::int64_t t = 0; t <= r_traj.horizon(); ++t) out.pos(k, t) = r_traj.pos(k, t) - t;
  }
  return out;
}

std::optional<LegalityViolation> check_dtasep_legality(const ParticleTrajectory& traj) {
  const std::int64_t k0 = traj.first_label();
  for (std::int64_t t = 0; t <= traj.horizon(); ++t) {
    for (std::int64_t k = k0 + 1; k <= traj.last_label(); ++k) {
      if (traj.pos(k, t) <= traj.pos(k - 1, t)) return LegalityViolation{k, t, "exclusion"};
    }
  }
  for (std::int64_t t = 1; t <= traj.horizon(); ++t) {
    for (std::int64_t k = k0; k <= traj.last_label(); ++k) {
      const std::int64_t step = traj.pos(k, t) - traj.pos(k, t - 1);
      if (step != 0 && step != -1) return LegalityViolation{k, t, "step size"};
      if (step == 0 || k == k0) continue;
      const std::int64_t before = traj.pos(k, t - 1);
      const std::int64_t left_before = traj.pos(k - 1, t - 1);
      const bool rule_i = before > left_before + 1;
      const bool rule_ii = before == left_before + 1 && traj.pos(k - 1, t) == left_before - 1;
      if (!rule_i && !rule_ii) return LegalityViolation{k, t, "blocked jump"};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

PlatoonState PlatoonState::from_positions(std::span<const std::int64_t> positions) {
  require_strictly_increasing(positions);
  PlatoonState state;
  for (const std::int64_t x : positions) {
    if (!state.platoons.empty() && state.platoons.back().right_hole() == x) {
      ++state.platoons.back().size;
    } else {
      state.platoons.push_back(Platoon{x, 1});
    }
  }
  return state;
}

std::vector<std::int64_t> PlatoonState::positions() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(particle_count()));
  for (const auto& platoon : platoons) {
    for (std::int64_t c = 0; c < platoon.size; ++c) out.push_back(platoon.left + c);
  }
  return out;
}

std::int64_t PlatoonState::particle_count() const {
  std::int64_t total = 0;
  for (const auto& platoon : platoons) total += platoon.size;
  return total;
}

double break_size_probability(const ModelParams& params, std::int64_t platoon_size,
                              std::int64_t broken) {
  if (platoon_size < 1 || broken < 0 || broken > platoon_size) {
    throw std::domain_error("break size must lie in 0..n_j");
  }
  const double tail = std::pow(params.q, static_cast<double>(broken));
  return broken < platoon_size ? params.p * tail : tail;
}

void write_fragmentation_csv(std::ostream& out, const std::vector<BreakEvent>& events) {
  out << "t,platoon_index,n_j,M_j\n";
  for (const auto& e : events) {
    out << e.t << ',' << e.platoon_index << ',' << e.platoon_size << ',' << e.broken << '\n';
  }
}

// ---------------------------------------------------------------------------

TauTable::TauTable(std::int64_t i_max, std::int64_t k_max, std::int64_t horizon)
    : horizon_(horizon) {
  if (i_max < 0 || k_max < 0) throw std::domain_error("tau table bounds must be non-negative");
  values_.setZero(i_max + 1, k_max + 1);
}

bool TauTable::at_most(std::int64_t i, std::int64_t k, std::int64_t n) const {
  const std::int64_t value = values_(i, k);
  if (value != kAfterHorizon) return value <= n;
  if (n <= horizon_) return false;
  throw ConfigError("tau(" + std::to_string(i) + ", " + std::to_string(k) + ") <= " +
                    std::to_string(n) + " is undecidable with horizon " + std::to_string(horizon_));
}

TauTable extract_tau(const ParticleTrajectory& r_traj, std::int64_t i_max, std::int64_t k_max) {
  if (r_traj.kind() != ProcessKind::R || r_traj.first_label() != 1) {
    throw std::domain_error("extract_tau expects an R trajectory labeled from 1");
  }
  if (k_max > r_traj.last_label()) {
    throw std::domain_error("extract_tau: k_max exceeds the number of simulated particles");
  }
  TauTable tau(i_max, k_max, r_traj.horizon());
  for (std::int64_t k = 1; k <= k_max; ++k) {
    for (std::int64_t i = 1; i <= i_max; ++i) tau(i, k) = TauTable::kAfterHorizon;
    // Left jumps in the sheared picture so far: k + t - r_k(t), in unit steps.
    std::int64_t reached = 0;
    for (std::int64_t t = 0; t <= r_traj.horizon() && reached < i_max; ++t) {
      const std::int64_t jumps = k + t - r_traj.pos(k, t);
      while (reached < jumps && reached < i_max) tau(++reached, k) = t;
    }
  }
  return tau;
}

TauTable tau_recursion(const GeometricField& unshifted, std::int64_t rows, std::int64_t cols) {
  if (unshifted.convention() != WeightConvention::unshifted) {
    throw ConfigError("tau_recursion needs unshifted weights");
  }
  if (rows < 1 || cols < 1) throw std::domain_error("tau_recursion needs I, J >= 1");
  TauTable tau(rows, cols, TauTable::kAfterHorizon);
  std::vector<std::int64_t> weights(static_cast<std::size_t>(rows));
  for (std::int64_t j = 1; j <= cols; ++j) {
    unshifted.fill_row(j, 1, weights);
    for (std::int64_t i = 1; i <= rows; ++i) {
      tau(i, j) = std::max(tau(i - 1, j) + 1, tau(i, j - 1)) + weights[i - 1];
    }
  }
  return tau;
}

bool tau_is_monotone(const TauTable& tau) {
  for (std::int64_t k = 1; k <= tau.k_max(); ++k) {
    for (std::int64_t i = 1; i <= tau.i_max(); ++i) {
      const std::int64_t here = tau(i, k);
      const std::int64_t below = tau(i - 1, k);
      const bool both_after = here == TauTable::kAfterHorizon && below == TauTable::kAfterHorizon;
      if (!both_after && here <= below) return false;
      if (tau(i, k - 1) > here && k - 1 >= 1) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

bool marked_column(const BernoulliField& field, std::int64_t x, std::int64_t t) {
  return x >= 1 && field.mark_at(x, t);
}

void require_positive_start(std::span<const std::int64_t> initial) {
  require_strictly_increasing(initial);
  if (!initial.empty() && initial.front() < 1) {
    throw std::domain_error("initial positions must be >= 1 (columns <= 0 are the reservoir)");
  }
}

}  // namespace

ParticleTrajectory evolve_marked_left(const BernoulliField& field,
                                      std::span<const std::int64_t> initial, std::int64_t horizon) {
  require_positive_start(initial);
  const auto count = static_cast<std::int64_t>(initial.size());
  ParticleTrajectory traj(ProcessKind::Z, 1, count, horizon);
  for (std::int64_t k = 1; k <= count; ++k) traj.pos(k, 0) = initial[k - 1];
  for (std::int64_t t = 1; t <= horizon; ++t) {
    for (std::int64_t k = 1; k <= count; ++k) {
      const std::int64_t left = k == 1 ? 0 : traj.pos(k - 1, t - 1);
      const std::int64_t here = traj.pos(k, t - 1);
      std::int64_t x = left + 1;
      while (x < here && !marked_column(field, x, t)) ++x;
      traj.pos(k, t) = x;
    }
  }
  return traj;
}

ParticleTrajectory evolve_blocking_right(const BernoulliField& field,
                                         std::span<const std::int64_t> initial,
                                         std::int64_t horizon, std::int64_t scan_limit) {
  require_positive_start(initial);
  const auto count = static_cast<std::int64_t>(initial.size());
  const std::int64_t first = 1 - horizon;
  ParticleTrajectory traj(ProcessKind::W, first, count + horizon, horizon);
  for (std::int64_t k = first; k <= 0; ++k) traj.pos(k, 0) = k;
  for (std::int64_t k = 1; k <= count; ++k) traj.pos(k, 0) = initial[k - 1];

  for (std::int64_t t = 1; t <= horizon; ++t) {
    for (std::int64_t k = first; k <= count; ++k) {
      const std::int64_t here = traj.pos(k, t - 1);
      if (here == kEscaped) {
        traj.pos(k, t) = kEscaped;
        continue;
      }
      const std::int64_t block = k < count ? traj.pos(k + 1, t - 1) : kEscaped;
      // Scan for the first mark right of `here`; stop at the block.
      std::int64_t x = here + 1;
      const std::int64_t window =
          std::min({block, field.width() == kUnbounded ? kEscaped : field.width() + 1,
                    here + 1 + scan_limit});
      if (field.is_mark_free()) {
        x = block;
      } else {
        while (x < window && !marked_column(field, x, t)) ++x;
      }
      if (x >= block) {
        traj.pos(k, t) = block;
      } else if (x >= window) {
        if (block != kEscaped) {
          throw std::domain_error("blocking scan left the field window before reaching the block");
        }
        traj.pos(k, t) = kEscaped;
      } else {
        traj.pos(k, t) = x;
      }
    }
  }
  return traj;
}

}  // namespace blip
