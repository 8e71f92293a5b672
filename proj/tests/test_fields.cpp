#include "blip/fields.hpp"
#include "blip/statistics.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace blip;

TEST_CASE("philox4x32-10 matches the published known-answer vectors") {
  using detail::philox4x32_10;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("seeds parse as decimal or hex") {
  CHECK(parse_seed("0") == 0);
  CHECK(parse_seed("31") == 31);
  CHECK(parse_seed("0x1f") == 31);
  CHECK(parse_seed("0X1F") == 31);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse_seed(""), ConfigError);
  CHECK_THROWS_AS(parse_seed("12a"), ConfigError);
  CHECK_THROWS_AS(parse_seed("0x"), ConfigError);
  CHECK_THROWS_AS(parse_seed("-3"), ConfigError);
}

TEST_CASE("model parameters") {
  CHECK(ModelParams::from_p(0.3).q == doctest::Approx(0.7));
  CHECK(ModelParams::from_p(0.0).is_degenerate());
  CHECK(ModelParams::from_p(1.0).is_degenerate());
  CHECK_FALSE(ModelParams::from_p(0.5).is_degenerate());
  CHECK_THROWS_AS(ModelParams::from_p(1.5), std::domain_error);
  CHECK_THROWS_AS(ModelParams::from_p(-0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams::from_p(std::nan("")), std::domain_error);
}

TEST_CASE("marks are a pure function of the site") {
  const BernoulliField field(ModelParams::from_p(0.5), RngSpec{42, 7});
  std::vector<bool> forward;
  for (int j = 1; j <= 20; ++j)
    for (int i = 1; i <= 20; ++i) forward.push_back(field.mark_at(i, j));
  std::vector<bool> backward(forward.size());
  for (int j = 20; j >= 1; --j)
    for (int i = 20; i >= 1; --i) backward[static_cast<std::size_t>((j - 1) * 20 + (i - 1))] = field.mark_at(i, j);
  CHECK(forward == backward);

  std::vector<std::uint8_t> row(15);
  field.fill_row(4, 6, row);
  for (int c = 0; c < 15; ++c) CHECK(static_cast<bool>(row[c]) == field.mark_at(6 + c, 4));

  const BernoulliField copy(ModelParams::from_p(0.5), RngSpec{42, 7});
  const BernoulliField other_stream(ModelParams::from_p(0.5), RngSpec{42, 8});
  int same = 0;
  int differ = 0;
  for (int i = 1; i <= 200; ++i) {
    same += copy.mark_at(i, 3) == field.mark_at(i, 3);
    differ += other_stream.mark_at(i, 3) != field.mark_at(i, 3);
  }
  CHECK(same == 200);
  CHECK(differ > 50);
}

TEST_CASE("mark frequencies follow Bernoulli(p)") {
  for (const double p : {0.2, 0.5, 0.8}) {
    const BernoulliField field(ModelParams::from_p(p), RngSpec{2024, 1});
    std::vector<std::int64_t> counts(2, 0);
    for (int j = 1; j <= 300; ++j)
      for (int i = 1; i <= 300; ++i) ++counts[field.mark_at(i, j) ? 1 : 0];
    const std::vector<double> law{1.0 - p, p};
    CHECK(chi_square_gof(counts, law).p_value > 0.01);
  }
}

TEST_CASE("geometric weights follow the inverse-CDF law in both conventions") {
  for (const double p : {0.2, 0.5, 0.8}) {
    const ModelParams params = ModelParams::from_p(p);
    const GeometricField unshifted(params, RngSpec{99, 3}, WeightConvention::unshifted);
    const GeometricField shifted = unshifted.with_convention(WeightConvention::shifted);
    CHECK(shifted.same_source(unshifted));
    std::vector<std::int64_t> counts(40, 0);
    for (int j = 1; j <= 300; ++j) {
      for (int i = 1; i <= 300; ++i) {
        const std::int64_t w = unshifted.weight_at(i, j);
        REQUIRE(w >= 0);
        REQUIRE(shifted.weight_at(i, j) == w + 1);
        ++counts[static_cast<std::size_t>(std::min<std::int64_t>(w, 39))];
      }
    }
    std::vector<double> law(40);
    for (int s = 0; s < 39; ++s) law[s] = params.q * std::pow(p, s);
    law[39] = std::pow(p, 39);
    CHECK(chi_square_gof(counts, law).p_value > 0.01);

    std::vector<std::int64_t> row(10);
    shifted.fill_row(5, 3, row);
    for (int c = 0; c < 10; ++c) CHECK(row[c] == shifted.weight_at(3 + c, 5));
  }
}

TEST_CASE("degenerate parameters") {
  const BernoulliField none(ModelParams::from_p(0.0), RngSpec{1, 0});
  const BernoulliField all(ModelParams::from_p(1.0), RngSpec{1, 0});
  CHECK(none.is_mark_free());
  for (int i = 1; i <= 30; ++i) {
    CHECK_FALSE(none.mark_at(i, i));
    CHECK(all.mark_at(i, 31 - i));
  }
  const GeometricField zero(ModelParams::from_p(0.0), RngSpec{1, 0}, WeightConvention::shifted);
  CHECK(zero.weight_at(4, 4) == 1);
  CHECK_THROWS_AS(GeometricField(ModelParams::from_p(1.0), RngSpec{}, WeightConvention::shifted),
                  std::domain_error);
}

TEST_CASE("explicit grids and corner indexing") {
  MarkGrid grid = MarkGrid::Zero(3, 2);
  grid(0, 0) = 1;  // (1, 1)
  grid(2, 1) = 1;  // (3, 2)
  const BernoulliField field = BernoulliField::from_marks(grid);
  CHECK(field.is_explicit());
  CHECK(field.first_row() == 1);
  CHECK(field.width() == 3);
  CHECK(field.height() == 2);
  CHECK(field.mark_at(1, 1));
  CHECK(field.mark_at(3, 2));
  CHECK_FALSE(field.mark_at(2, 2));
  CHECK_THROWS_AS(field.mark_at(4, 1), std::domain_error);
  CHECK_THROWS_AS(field.mark_at(1, 3), std::domain_error);
  CHECK_THROWS_AS(field.mark_at(0, 1), std::domain_error);

  const BernoulliField corner = shift_to_corner_indexing(field);
  CHECK(corner.first_row() == 0);
  CHECK(corner.mark_at(1, 0));
  CHECK(corner.mark_at(3, 1));
  CHECK_THROWS_AS(corner.mark_at(1, 2), std::domain_error);

  const BernoulliField random(ModelParams::from_p(0.4), RngSpec{5, 5});
  const BernoulliField random_corner = shift_to_corner_indexing(random);
  for (int j = 0; j < 10; ++j)
    for (int i = 1; i <= 10; ++i) CHECK(random_corner.mark_at(i, j) == random.mark_at(i, j + 1));

  const BernoulliField from_zero = BernoulliField::from_marks(grid, 0);
  CHECK(from_zero.mark_at(1, 0));
  CHECK(from_zero.mark_at(3, 1));

  WeightGrid weights = WeightGrid::Zero(2, 2);
  weights(1, 0) = 3;
  const GeometricField w = GeometricField::from_weights(weights, WeightConvention::shifted);
  CHECK(w.weight_at(2, 1) == 4);
  CHECK(w.weight_at(1, 1) == 1);
  CHECK(w.with_convention(WeightConvention::unshifted).weight_at(2, 1) == 3);
  CHECK_THROWS_AS(w.weight_at(3, 1), std::domain_error);
  weights(0, 0) = -1;
  CHECK_THROWS_AS(GeometricField::from_weights(weights, WeightConvention::unshifted), std::domain_error);
}
