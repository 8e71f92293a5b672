#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace blip {

/// Raised when a run is configured inconsistently (mismatched fields,
/// undecidable horizons, unknown rule families). Distinct from
/// std::domain_error, which flags out-of-domain arguments.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mark probability p and its complement q = 1 - p.
///
/// The closed interval [0, 1] is accepted so that the degenerate fields
/// (no marks / every site marked) are expressible; front-ends that need the
/// open interval check `is_degenerate()`.
struct ModelParams {
  double p = 0.5;
  double q = 0.5;

  static ModelParams from_p(double p);
  bool is_degenerate() const { return p <= 0.0 || p >= 1.0; }
  bool operator==(const ModelParams&) const = default;
};

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  bool operator==(const RngSpec&) const = default;
};

/// Parses "123" or "0x7b" (CLI and config files accept both).
std::uint64_t parse_seed(const std::string& text);

namespace detail {
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);
}

// Counter-based generator: Philox4x32-10 keyed by (seed, purpose tag),
// counter = (i, j, stream). Every lattice value is a pure function of its
// coordinates, so fields never need to be materialized.
class SiteHasher {
 public:
  enum class Purpose : std::uint32_t { mark = 1, weight = 2, draw = 3, aux = 4 };

  SiteHasher(RngSpec rng, Purpose purpose);

  std::array<std::uint32_t, 4> block(std::int64_t i, std::int64_t j) const;
  std::uint64_t bits(std::int64_t i, std::int64_t j) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::int64_t i, std::int64_t j) const {
    return static_cast<double>(bits(i, j) >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1]; never returns zero.
  double uniform_open_left(std::int64_t i, std::int64_t j) const {
    return static_cast<double>((bits(i, j) >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::array<std::uint32_t, 2> key_{};
  std::uint32_t stream_lo_ = 0;
  std::uint32_t stream_hi_ = 0;
};

/// Column-major grid: entry (i - 1, r) holds the value of column i on the
/// r-th row of the field's domain.
using MarkGrid = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using WeightGrid = Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

/// I.i.d. Bernoulli(p) marks on N x N (or N x Z+ once corner-indexed).
///
/// Either backed by the counter generator (logically unbounded) or by an
/// explicit finite grid for hand-built configurations. Immutable; copies are
/// cheap and share the grid.
class BernoulliField {
 public:
  BernoulliField(ModelParams params, RngSpec rng);

  /// Explicit configuration; `marks(i - 1, r)` is the mark at column i of row
  /// `first_row + r`. Sites outside the grid are outside the domain.
  static BernoulliField from_marks(MarkGrid marks, std::int64_t first_row = 1);

  bool mark_at(std::int64_t i, std::int64_t j) const;
  /// Marks at columns first_col .. first_col + out.size() - 1 of row j.
  void fill_row(std::int64_t j, std::int64_t first_col, std::span<std::uint8_t> out) const;

  const ModelParams& params() const { return params_; }
  const RngSpec& rng() const { return rng_; }
  bool is_explicit() const { return grid_ != nullptr; }
  bool is_mark_free() const { return !grid_ && params_.p <= 0.0; }

  /// Smallest row index of the domain: 1 for the original lattice, 0 after
  /// shift_to_corner_indexing.
  std::int64_t first_row() const { return 1 - row_shift_; }
  /// Columns 1..width(); kUnbounded for generated fields.
  std::int64_t width() const;
  /// Number of rows starting at first_row(); kUnbounded for generated fields.
  std::int64_t height() const;

 private:
  friend BernoulliField shift_to_corner_indexing(const BernoulliField& field);

  void check_site(std::int64_t i, std::int64_t j) const;
  bool raw_mark(std::int64_t i, std::int64_t source_row) const;

  ModelParams params_;
  RngSpec rng_;
  SiteHasher hasher_;
  std::shared_ptr<const MarkGrid> grid_;
  std::int64_t row_shift_ = 0;
};

/// Re-indexes every square by its lower-right corner: the returned field's
/// mark at (i, j) is the original mark at (i, j + 1), j >= 0.
BernoulliField shift_to_corner_indexing(const BernoulliField& field);

enum class WeightConvention {
  unshifted,  ///< support {0, 1, ...}, P(s) = q p^s
  shifted     ///< support {1, 2, ...}, P(s) = q p^(s-1)
};

/// I.i.d. geometric weights on N x N drawn by inverse CDF from one uniform
/// per site, floor(log U / log p). Both conventions read the same uniforms,
/// so a shifted field is its unshifted twin plus one, site by site.
class GeometricField {
 public:
  GeometricField(ModelParams params, RngSpec rng, WeightConvention convention);

  /// Explicit configuration of unshifted weights; `weights(i - 1, j - 1)`.
  static GeometricField from_weights(WeightGrid unshifted, WeightConvention convention);

  std::int64_t weight_at(std::int64_t i, std::int64_t j) const;
  void fill_row(std::int64_t j, std::int64_t first_col, std::span<std::int64_t> out) const;

  /// Same source, other convention.
  GeometricField with_convention(WeightConvention convention) const;
  /// True when both fields read identical uniforms (or the same grid).
  bool same_source(const GeometricField& other) const;

  const ModelParams& params() const { return params_; }
  const RngSpec& rng() const { return rng_; }
  WeightConvention convention() const { return convention_; }
  std::int64_t width() const;
  std::int64_t height() const;

 private:
  std::int64_t unshifted_at(std::int64_t i, std::int64_t j) const;
  void check_site(std::int64_t i, std::int64_t j) const;

  ModelParams params_;
  RngSpec rng_;
  WeightConvention convention_;
  SiteHasher hasher_;
  double inv_log_p_ = 0.0;
  std::shared_ptr<const WeightGrid> grid_;
};

}  // namespace blip
