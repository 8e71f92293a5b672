#pragma once

#include "blip/fields.hpp"

#include <Eigen/Core>

#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace blip {

enum class ProcessKind { R, DTASEP, Z, W };

std::string to_string(ProcessKind kind);

/// Positions of labeled particles `first_label .. first_label + count - 1`
/// at times 0..horizon.
class ParticleTrajectory {
 public:
  using Positions = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  ParticleTrajectory(ProcessKind kind, std::int64_t first_label, std::int64_t count,
                     std::int64_t horizon);

  ProcessKind kind() const { return kind_; }
  std::int64_t first_label() const { return first_label_; }
  std::int64_t last_label() const { return first_label_ + positions_.rows() - 1; }
  std::int64_t count() const { return positions_.rows(); }
  std::int64_t horizon() const { return positions_.cols() - 1; }

  std::int64_t pos(std::int64_t k, std::int64_t t) const {
    return positions_(k - first_label_, t);
  }
  std::int64_t& pos(std::int64_t k, std::int64_t t) { return positions_(k - first_label_, t); }
  const Positions& positions() const { return positions_; }

 private:
  ProcessKind kind_;
  std::int64_t first_label_;
  Positions positions_;
};

/// Position assigned to a W particle whose jump has no mark to land on
/// within the scan limit (it has left every finite window).
inline constexpr std::int64_t kEscaped = std::numeric_limits<std::int64_t>::max() / 4;
inline constexpr std::int64_t kDefaultScanLimit = std::int64_t{1} << 24;

/// CSV "k,t,pos".
void write_trajectory_csv(std::ostream& out, const ParticleTrajectory& traj);

// ---------------------------------------------------------------------------
// R-process on a corner-indexed field (rows 0, 1, ...). r_k(0) = k. In each
// platoon the leftmost particle sitting on a marked square (r_k(t), t) jumps
// right together with every platoon member to its right; everyone else stays.

ParticleTrajectory evolve_r(const BernoulliField& corner_field, std::int64_t particles,
                            std::int64_t horizon);

/// Shear (i, j) -> (i - j, j): r~_k(t) = r_k(t) - t.
ParticleTrajectory r_to_dtasep(const ParticleTrajectory& r_traj);

/// Site-keyed jump decisions for DTASEP: true with probability q at each
/// (particle, time).
class SiteKeyedDraws {
 public:
  SiteKeyedDraws(ModelParams params, RngSpec rng)
      : q_(params.q), hasher_(rng, SiteHasher::Purpose::draw) {}
  bool operator()(std::int64_t k, std::int64_t t) const { return hasher_.uniform(k, t) < q_; }

 private:
  double q_;
  SiteHasher hasher_;
};

template <typename D>
concept JumpDraws = requires(const D& draws, std::int64_t k, std::int64_t t) {
  { draws(k, t) } -> std::convertible_to<bool>;
};

void require_strictly_increasing(std::span<const std::int64_t> initial);

/// DTASEP with backward (left-to-right) update. Particle k may step left at
/// time t when its left neighbour left a gap at t - 1 or vacated the adjacent
/// site during this same step; it then does so iff draws(k, t). Labels 1..K.
template <JumpDraws Draws>
ParticleTrajectory evolve_dtasep(const Draws& draws, std::span<const std::int64_t> initial,
                                 std::int64_t horizon) {
  require_strictly_increasing(initial);
  const auto count = static_cast<std::int64_t>(initial.size());
  ParticleTrajectory traj(ProcessKind::DTASEP, 1, count, horizon);
  for (std::int64_t k = 1; k <= count; ++k) traj.pos(k, 0) = initial[k - 1];
  for (std::int64_t t = 1; t <= horizon; ++t) {
    for (std::int64_t k = 1; k <= count; ++k) {
      const std::int64_t before = traj.pos(k, t - 1);
      bool room = k == 1;
      if (!room) {
        const std::int64_t left_before = traj.pos(k - 1, t - 1);
        const std::int64_t left_now = traj.pos(k - 1, t);
        room = before > left_before + 1 || (before == left_before + 1 && left_now == left_before - 1);
      }
      traj.pos(k, t) = (room && draws(k, t)) ? before - 1 : before;
    }
  }
  return traj;
}

struct LegalityViolation {
  std::int64_t k = 0;
  std::int64_t t = 0;
  std::string rule;
};

/// Checks every step against the DTASEP motion rules: displacement in
/// {0, -1}, left moves only under rule (i) or (ii), strict order kept.
std::optional<LegalityViolation> check_dtasep_legality(const ParticleTrajectory& traj);

// ---------------------------------------------------------------------------
// Fragmentation view of DTASEP: a left piece of size M_j breaks off platoon j
// and moves one site left, P(M_j = k) = p q^k for k < n_j, q^n_j for k = n_j.

struct Platoon {
  std::int64_t left = 0;  ///< position of the leftmost particle
  std::int64_t size = 0;
  std::int64_t left_hole() const { return left - 1; }
  std::int64_t right_hole() const { return left + size; }
  bool operator==(const Platoon&) const = default;
};

struct PlatoonState {
  std::vector<Platoon> platoons;

  static PlatoonState from_positions(std::span<const std::int64_t> positions);
  std::vector<std::int64_t> positions() const;
  std::int64_t particle_count() const;
  bool operator==(const PlatoonState&) const = default;
};

struct BreakEvent {
  std::int64_t t = 0;
  std::int64_t platoon_index = 0;  ///< 1-based, left to right at time t - 1
  std::int64_t platoon_size = 0;
  std::int64_t broken = 0;  ///< M_j
};

struct FragmentationRun {
  std::vector<PlatoonState> states;  ///< times 0..horizon
  std::vector<BreakEvent> events;
};

/// Exact law of the detached piece size.
double break_size_probability(const ModelParams& params, std::int64_t platoon_size,
                              std::int64_t broken);

/// Particles are labeled 1.. left to right (labels are conserved), and the
/// decision for the particle labeled k at time t is draws(k, t), so the same
/// draws drive evolve_dtasep to the identical configuration.
template <JumpDraws Draws>
FragmentationRun evolve_fragmentation(const Draws& draws, const PlatoonState& initial,
                                      std::int64_t horizon) {
  for (const auto& platoon : initial.platoons) {
    if (platoon.size < 1) throw std::domain_error("platoon sizes must be at least 1");
  }
  FragmentationRun run;
  run.states.push_back(PlatoonState::from_positions(initial.positions()));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const PlatoonState& before = run.states.back();
    std::vector<std::int64_t> next;
    next.reserve(static_cast<std::size_t>(before.particle_count()));
    std::int64_t label = 1;
    std::int64_t index = 1;
    for (const auto& platoon : before.platoons) {
      std::int64_t broken = 0;
      while (broken < platoon.size && draws(label + broken, t)) ++broken;
      run.events.push_back(BreakEvent{t, index, platoon.size, broken});
      for (std::int64_t c = 0; c < platoon.size; ++c) {
        next.push_back(platoon.left + c - (c < broken ? 1 : 0));
      }
      label += platoon.size;
      ++index;
    }
    run.states.push_back(PlatoonState::from_positions(next));
  }
  return run;
}

/// CSV "t,platoon_index,n_j,M_j".
void write_fragmentation_csv(std::ostream& out, const std::vector<BreakEvent>& events);

// ---------------------------------------------------------------------------
// Jump times.

/// tau(i, k), 0 <= i <= i_max, 0 <= k <= k_max. Values not reached within
/// the trajectory horizon hold kAfterHorizon.
class TauTable {
 public:
  static constexpr std::int64_t kAfterHorizon = std::numeric_limits<std::int64_t>::max();
  using Values = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  TauTable(std::int64_t i_max, std::int64_t k_max, std::int64_t horizon);

  std::int64_t i_max() const { return values_.rows() - 1; }
  std::int64_t k_max() const { return values_.cols() - 1; }
  /// Largest time at which the table is complete (kAfterHorizon for tables
  /// built by recursion).
  std::int64_t horizon() const { return horizon_; }

  std::int64_t operator()(std::int64_t i, std::int64_t k) const { return values_(i, k); }
  std::int64_t& operator()(std::int64_t i, std::int64_t k) { return values_(i, k); }
  bool after_horizon(std::int64_t i, std::int64_t k) const { return values_(i, k) == kAfterHorizon; }

  /// Decides "tau(i, k) <= n". Throws ConfigError when the answer depends on
  /// times past the horizon.
  bool at_most(std::int64_t i, std::int64_t k, std::int64_t n) const;

  const Values& values() const { return values_; }

 private:
  Values values_;
  std::int64_t horizon_;
};

/// tau(i, k) = inf{t >= 0 : r_k(t) = k - i + t}, with tau(0, k) = tau(i, 0) = 0.
TauTable extract_tau(const ParticleTrajectory& r_traj, std::int64_t i_max, std::int64_t k_max);

/// tau(i, j) = max(tau(i-1, j) + 1, tau(i, j-1)) + Y~(i, j) on unshifted
/// weights, zero on both axes.
TauTable tau_recursion(const GeometricField& unshifted, std::int64_t rows, std::int64_t cols);

/// Strictly increasing in i and non-decreasing in k (k >= 1, after-horizon
/// entries treated as +infinity).
bool tau_is_monotone(const TauTable& tau);

// ---------------------------------------------------------------------------
// Coupled pair on an original-index field; time t reads row t (t >= 1).
// Columns <= 0 are a packed reservoir: particles labeled k <= 0 sit at k.

/// z_k(t) = first marked site of (z_{k-1}(t-1), z_k(t-1)], else z_k(t-1).
/// Labels 1..K; z_0 is the reservoir front at 0.
ParticleTrajectory evolve_marked_left(const BernoulliField& field,
                                      std::span<const std::int64_t> initial, std::int64_t horizon);

/// w_{k-1}(t) = min(w_{k-1}(t-1) + xi~(k, t), w_k(t-1)) where w_{k-1}(t-1) +
/// xi~ is the first marked site right of w_{k-1}(t-1) in row t. Labels
/// 1 - horizon .. K: the reservoir particles that enter by time `horizon` are
/// tracked so that w_{k-t}(t) is defined for every k in 1..K.
ParticleTrajectory evolve_blocking_right(const BernoulliField& field,
                                         std::span<const std::int64_t> initial,
                                         std::int64_t horizon,
                                         std::int64_t scan_limit = kDefaultScanLimit);

}  // namespace blip
