#include "blip/fields.hpp"
#include "blip/statistics.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace blip;

TEST_CASE("summary of constant and simple samples") {
  const std::vector<double> constant(10, 3.5);
  const SampleSummary c = summarize(constant);
  CHECK(c.mean == 3.5);
  CHECK(c.variance == 0.0);
  CHECK(c.se == 0.0);
  CHECK(c.median == 3.5);
  CHECK(c.replicas == 10);

  const std::vector<double> v{1, 2, 3, 4};
  const SampleSummary s = summarize(v, 2.0, 1.5);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.exceedance == doctest::Approx(0.25));  // only |4 - 2| >= 1.5
  CHECK(s.ref_value == 2.0);

  CHECK_THROWS_AS(summarize(std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(summarize(std::vector<double>{1.0}), std::domain_error);
  CHECK(median_of({5, 1, 3}) == 3);
  CHECK_THROWS_AS(median_of({}), std::domain_error);
}

TEST_CASE("chi-square goodness of fit") {
  const std::vector<std::int64_t> fair{5000, 5000};
  const std::vector<double> half{0.5, 0.5};
  const ChiSquareResult r = chi_square_gof(fair, half);
  CHECK(r.statistic == 0.0);
  CHECK(r.degrees_of_freedom == 1);
  CHECK(r.p_value == doctest::Approx(1.0));

  // Known value: statistic 4 on 1 dof has p = 0.0455.
  const std::vector<std::int64_t> skew{60, 40};
  const ChiSquareResult k = chi_square_gof(skew, half);
  CHECK(k.statistic == doctest::Approx(4.0));
  CHECK(k.p_value == doctest::Approx(0.0455).epsilon(0.01));

  // Tail cells with tiny expectation are merged, residual mass goes last.
  const std::vector<std::int64_t> tail{50, 30, 15, 4, 1};
  const std::vector<double> law{0.5, 0.3, 0.14, 0.05, 0.008};
  const ChiSquareResult merged = chi_square_gof(tail, law);
  CHECK(merged.cells == 4);

  CHECK_THROWS_AS(chi_square_gof(std::vector<std::int64_t>{}, std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(chi_square_gof(std::vector<std::int64_t>{1, 2}, std::vector<double>{0.9, 0.9}), std::domain_error);
  CHECK_THROWS_AS(chi_square_gof(std::vector<std::int64_t>{0, 0}, half), std::domain_error);
}

TEST_CASE("geometric histograms pass the self-test in at least 99 of 100 repetitions") {
  const ModelParams params = ModelParams::from_p(0.5);
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const GeometricField field(params, RngSpec{777, rep}, WeightConvention::unshifted);
    std::vector<std::int64_t> counts(30, 0);
    for (int j = 1; j <= 400; ++j) {
      for (int i = 1; i <= 250; ++i) {
        ++counts[static_cast<std::size_t>(std::min<std::int64_t>(field.weight_at(i, j), 29))];
      }
    }
    std::vector<double> law(30);
    for (int s = 0; s < 29; ++s) law[s] = 0.5 * std::pow(0.5, s);
    law[29] = std::pow(0.5, 29);
    passes += chi_square_gof(counts, law).p_value > 0.01;
  }
  CHECK(passes >= 99);
}

TEST_CASE("Mann-Whitney rank test") {
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < 50; ++i) {
    a.push_back(i);
    b.push_back(i);
  }
  const RankTestResult same = mann_whitney(a, b);
  CHECK(same.z == doctest::Approx(0.0));
  CHECK(same.p_value == doctest::Approx(1.0));

  std::vector<double> shifted;
  for (int i = 0; i < 50; ++i) shifted.push_back(i + 30);
  CHECK(mann_whitney(a, shifted).p_value < 1e-6);

  // All values tied: variance vanishes and the test is uninformative.
  const std::vector<double> ties(10, 1.0);
  CHECK(mann_whitney(ties, ties).p_value == 1.0);
  CHECK_THROWS_AS(mann_whitney(std::vector<double>{}, a), std::domain_error);

  // Small exact case: a = {1, 2}, b = {3, 4}: U = 0.
  CHECK(mann_whitney(std::vector<double>{1, 2}, std::vector<double>{3, 4}).u == 0.0);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-5));
}
