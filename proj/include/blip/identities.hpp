#pragma once

#include "blip/fields.hpp"
#include "blip/particles.hpp"
#include "blip/passage.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blip {

/// Outcome of an exact, pathwise identity check on one field.
///
/// A counterexample holds the lexicographically smallest violating
/// coordinates; together with (seed, stream, p) it replays the failure.
struct IdentityReport {
  std::string identity;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double p = 0.0;
  std::vector<std::int64_t> dims;
  std::int64_t points_checked = 0;
  std::optional<std::vector<std::int64_t>> counterexample;
  std::string detail;

  bool passed() const { return !counterexample.has_value(); }
};

/// {identity, seed, p, dims, points_checked, counterexample}; the stream id
/// and a human-readable `detail` ride along when relevant.
nlohmann::json to_json(const IdentityReport& report);

/// R-process evidence shared by the L/tau identities for 1 <= s <= S,
/// 0 <= t <= T: K = S + T + 2 particles evolved to time T + 2, so every
/// comparison "tau <= t + 1" is decidable.
struct RProcessEvidence {
  BernoulliField corner_field;
  ParticleTrajectory trajectory;
  TauTable tau;

  static RProcessEvidence build(const BernoulliField& field, std::int64_t max_s, std::int64_t max_t);
};

/// L'(s, t) = s - max{k : (s-t-1) v 1 <= k <= s, tau(t+1-s+k, k) <= t+1},
/// or s when the set is empty; 1 <= s <= S, 0 <= t <= T.
IdentityReport check_relation(const BernoulliField& field, std::int64_t max_s, std::int64_t max_t);

/// L'(s, t) >= y iff particle s-y+1 has made at least y right jumps by time
/// t + 1; 1 <= y <= s <= S, 0 <= t <= T.
IdentityReport check_jump_lemma(const BernoulliField& field, std::int64_t max_s, std::int64_t max_t);

/// L(m, n) = m - (max{k : (m-n) v 1 <= k <= m, tau(n-m+k, k) <= n} v 0).
IdentityReport check_lm_formula(const BernoulliField& field, std::int64_t max_m, std::int64_t max_n);

struct EventPair {
  bool lhs = false;  ///< L(m, n) <= m - floor(j)
  bool rhs = false;  ///< tau(n - m + floor(j), floor(j)) <= n
};

/// Both sides of {L(m,n) <= m - j} = {tau(n-m+j, j) <= n}; non-integral j
/// is floored on both sides.
EventPair check_event_b(const BernoulliField& field, std::int64_t m, std::int64_t n, double j);

/// tau from the recursion on unshifted weights equals G(i, j) - j + 1 on the
/// shifted twin, at every (i, j) <= (I, J).
IdentityReport check_tau_equals_g(const GeometricField& unshifted, const GeometricField& shifted,
                                  std::int64_t rows, std::int64_t cols);
/// Convenience: pairs `field` with its other-convention twin.
IdentityReport check_tau_equals_g(const GeometricField& field, std::int64_t rows, std::int64_t cols);

/// Initial positions with i.i.d. Geom gaps drawn from the field's auxiliary
/// stream, so coupling checks on random fields are non-trivial.
std::vector<std::int64_t> spread_initial(const BernoulliField& field, std::int64_t particles);

/// Same-site occupation and w_{k-t}(t) = z_k(t) for every k in 1..K.
IdentityReport check_coupling(const BernoulliField& field, std::span<const std::int64_t> initial,
                              std::int64_t horizon);
IdentityReport check_coupling(const BernoulliField& field, std::int64_t particles,
                              std::int64_t horizon);

/// DTASEP legality of the sheared R trajectory plus the jump-count duality
/// (right jumps in R) + (left jumps in DTASEP) = t at every (k, t).
IdentityReport check_shear_duality(const BernoulliField& field, std::int64_t particles,
                                   std::int64_t horizon);

}  // namespace blip
