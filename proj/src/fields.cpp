#include "blip/fields.hpp"

#include <cmath>
#include <string>

namespace blip {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

namespace detail {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

}  // namespace detail

ModelParams ModelParams::from_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("mark probability p must lie in [0, 1], got " + std::to_string(p));
  }
  return ModelParams{p, 1.0 - p};
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
      value = std::stoull(text.substr(2), &used, 16);
      used += 2;
    } else {
      value = std::stoull(text, &used, 10);
    }
  } catch (const std::exception&) {
    throw ConfigError("invalid seed '" + text + "'");
  }
  if (used != text.size() || text.empty() || text[0] == '-') {
    throw ConfigError("invalid seed '" + text + "'");
  }
  return value;
}

SiteHasher::SiteHasher(RngSpec rng, Purpose purpose) {
  const std::uint64_t k =
      splitmix64(rng.master_seed ^ (static_cast<std::uint64_t>(purpose) * 0xD6E8FEB86659FD93ULL));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  stream_lo_ = static_cast<std::uint32_t>(rng.stream_id);
  stream_hi_ = static_cast<std::uint32_t>(rng.stream_id >> 32);
}

std::array<std::uint32_t, 4> SiteHasher::block(std::int64_t i, std::int64_t j) const {
  return detail::philox4x32_10(
      {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), stream_lo_, stream_hi_}, key_);
}

std::uint64_t SiteHasher::bits(std::int64_t i, std::int64_t j) const {
  const auto b = block(i, j);
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

// ---------------------------------------------------------------------------
// BernoulliField

BernoulliField::BernoulliField(ModelParams params, RngSpec rng)
    : params_(params), rng_(rng), hasher_(rng, SiteHasher::Purpose::mark) {}

BernoulliField BernoulliField::from_marks(MarkGrid marks, std::int64_t first_row) {
  BernoulliField field(ModelParams{}, RngSpec{});
  field.grid_ = std::make_shared<const MarkGrid>(std::move(marks));
  field.row_shift_ = 1 - first_row;
  return field;
}

std::int64_t BernoulliField::width() const { return grid_ ? grid_->rows() : kUnbounded; }

std::int64_t BernoulliField::height() const { return grid_ ? grid_->cols() : kUnbounded; }

void BernoulliField::check_site(std::int64_t i, std::int64_t j) const {
  if (i < 1 || j < first_row() || (grid_ && (i > width() || j - first_row() >= height()))) {
    throw std::domain_error("site (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is outside the field's domain");
  }
}

bool BernoulliField::raw_mark(std::int64_t i, std::int64_t source_row) const {
  if (grid_) return (*grid_)(i - 1, source_row - 1) != 0;
  return hasher_.uniform(i, source_row) < params_.p;
}

bool BernoulliField::mark_at(std::int64_t i, std::int64_t j) const {
  check_site(i, j);
  return raw_mark(i, j + row_shift_);
}

void BernoulliField::fill_row(std::int64_t j, std::int64_t first_col,
                              std::span<std::uint8_t> out) const {
  if (out.empty()) return;
  check_site(first_col, j);
  check_site(first_col + static_cast<std::int64_t>(out.size()) - 1, j);
  const std::int64_t source_row = j + row_shift_;
  if (grid_) {
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = (*grid_)(first_col - 1 + static_cast<std::int64_t>(c), source_row - 1);
    }
    return;
  }
  const double p = params_.p;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = hasher_.uniform(first_col + static_cast<std::int64_t>(c), source_row) < p ? 1 : 0;
  }
}

BernoulliField shift_to_corner_indexing(const BernoulliField& field) {
  BernoulliField shifted = field;
  shifted.row_shift_ += 1;
  return shifted;
}

// ---------------------------------------------------------------------------
// GeometricField

GeometricField::GeometricField(ModelParams params, RngSpec rng, WeightConvention convention)
    : params_(params),
      rng_(rng),
      convention_(convention),
      hasher_(rng, SiteHasher::Purpose::weight) {
  if (params.p >= 1.0) {
    throw std::domain_error("geometric weights need p < 1");
  }
  inv_log_p_ = params.p > 0.0 ? 1.0 / std::log(params.p) : 0.0;
}

GeometricField GeometricField::from_weights(WeightGrid unshifted, WeightConvention convention) {
  if ((unshifted < 0).any()) {
    throw std::domain_error("unshifted weights must be non-negative");
  }
  GeometricField field(ModelParams{}, RngSpec{}, convention);
  field.grid_ = std::make_shared<const WeightGrid>(std::move(unshifted));
  return field;
}

std::int64_t GeometricField::width() const { return grid_ ? grid_->rows() : kUnbounded; }

std::int64_t GeometricField::height() const { return grid_ ? grid_->cols() : kUnbounded; }

void GeometricField::check_site(std::int64_t i, std::int64_t j) const {
  if (i < 1 || j < 1 || (grid_ && (i > width() || j > height()))) {
    throw std::domain_error("site (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is outside the weight field's domain");
  }
}

std::int64_t GeometricField::unshifted_at(std::int64_t i, std::int64_t j) const {
  if (grid_) return (*grid_)(i - 1, j - 1);
  if (params_.p <= 0.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log(hasher_.uniform_open_left(i, j)) * inv_log_p_));
}

std::int64_t GeometricField::weight_at(std::int64_t i, std::int64_t j) const {
  check_site(i, j);
  return unshifted_at(i, j) + (convention_ == WeightConvention::shifted ? 1 : 0);
}

void GeometricField::fill_row(std::int64_t j, std::int64_t first_col,
                              std::span<std::int64_t> out) const {
  if (out.empty()) return;
  check_site(first_col, j);
  check_site(first_col + static_cast<std::int64_t>(out.size()) - 1, j);
  const std::int64_t offset = convention_ == WeightConvention::shifted ? 1 : 0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = unshifted_at(first_col + static_cast<std::int64_t>(c), j) + offset;
  }
}

GeometricField GeometricField::with_convention(WeightConvention convention) const {
  GeometricField other = *this;
  other.convention_ = convention;
  return other;
}

bool GeometricField::same_source(const GeometricField& other) const {
  if (grid_ || other.grid_) return grid_ == other.grid_;
  return params_ == other.params_ && rng_ == other.rng_;
}

}  // namespace blip
