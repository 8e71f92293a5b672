#include "blip/passage.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace blip {

namespace {

void require_positive_size(std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) {
    throw std::domain_error("rectangle sizes must be positive, got " + std::to_string(m) + " x " +
                            std::to_string(n));
  }
}

// Runs the BLIP recurrence row by row and hands each finished row to `sink`.
template <typename RowSink>
void blip_sweep(const BernoulliField& field, std::int64_t m, std::int64_t n, RowSink&& sink) {
  require_positive_size(m, n);
  std::vector<std::int32_t> prev(static_cast<std::size_t>(m) + 1, 0);
  std::vector<std::int32_t> cur(static_cast<std::size_t>(m) + 1, 0);
  std::vector<std::uint8_t> marks(static_cast<std::size_t>(m));
  const std::int64_t row0 = field.first_row();
  for (std::int64_t r = 0; r < n; ++r) {
    field.fill_row(row0 + r, 1, marks);
    for (std::size_t i = 1; i <= static_cast<std::size_t>(m); ++i) {
      cur[i] = std::max({cur[i - 1], prev[i], prev[i - 1] + marks[i - 1]});
    }
    sink(r, std::span<const std::int32_t>(cur).subspan(1));
    std::swap(prev, cur);
  }
}

template <typename RowSink>
void passage_sweep(const GeometricField& field, Site start, Site end, RowSink&& sink) {
  const std::int64_t m = end.i - start.i + 1;
  const std::int64_t n = end.j - start.j + 1;
  std::vector<std::int64_t> col(static_cast<std::size_t>(m) + 1, 0);
  std::vector<std::int64_t> weights(static_cast<std::size_t>(m));
  for (std::int64_t r = 0; r < n; ++r) {
    field.fill_row(start.j + r, start.i, weights);
    for (std::size_t i = 1; i <= static_cast<std::size_t>(m); ++i) {
      col[i] = std::max(col[i], col[i - 1]) + weights[i - 1];
      assert(col[i] >= 0 && "last-passage value overflowed");
    }
    sink(r, std::span<const std::int64_t>(col).subspan(1));
  }
}

}  // namespace

std::int32_t blip_length(const BernoulliField& field, std::int64_t m, std::int64_t n) {
  std::int32_t result = 0;
  blip_sweep(field, m, n, [&](std::int64_t r, std::span<const std::int32_t> row) {
    if (r == n - 1) result = row.back();
  });
  return result;
}

DpRow<std::int32_t> blip_row(const BernoulliField& field, std::int64_t m, std::int64_t n) {
  DpRow<std::int32_t> out(m);
  blip_sweep(field, m, n, [&](std::int64_t r, std::span<const std::int32_t> row) {
    if (r == n - 1) std::copy(row.begin(), row.end(), out.data());
  });
  return out;
}

BlipTable blip_table(const BernoulliField& field, std::int64_t m, std::int64_t n) {
  BlipTable table(m, n);
  blip_sweep(field, m, n, [&](std::int64_t r, std::span<const std::int32_t> row) {
    std::copy(row.begin(), row.end(), table.col(r).data());
  });
  return table;
}

std::int64_t corner_growth(const GeometricField& field, std::int64_t m, std::int64_t n) {
  require_positive_size(m, n);
  return corner_growth_from(field, Site{1, 1}, Site{m, n});
}

PassageTable corner_growth_table(const GeometricField& field, std::int64_t m, std::int64_t n) {
  require_positive_size(m, n);
  PassageTable table(m, n);
  passage_sweep(field, Site{1, 1}, Site{m, n}, [&](std::int64_t r, std::span<const std::int64_t> row) {
    std::copy(row.begin(), row.end(), table.col(r).data());
  });
  return table;
}

std::int64_t corner_growth_from(const GeometricField& field, Site start, Site end) {
  if (start.i < 1 || start.j < 1 || start.i > end.i || start.j > end.j) {
    throw std::domain_error("corner_growth_from needs 1 <= start <= end componentwise");
  }
  std::int64_t result = 0;
  const std::int64_t rows = end.j - start.j + 1;
  passage_sweep(field, start, end, [&](std::int64_t r, std::span<const std::int64_t> row) {
    if (r == rows - 1) result = row.back();
  });
  return result;
}

PatientPath patient_strategy(const BernoulliField& field, std::int64_t n, std::int64_t width_cap) {
  if (n < 1 || width_cap < 1) {
    throw std::domain_error("patient_strategy needs n >= 1 and width_cap >= 1");
  }
  PatientPath path;
  std::int64_t column = 0;
  const std::int64_t row0 = field.first_row();
  for (std::int64_t r = 0; r < n; ++r) {
    std::int64_t c = column + 1;
    while (c <= width_cap && !field.mark_at(c, row0 + r)) ++c;
    if (c > width_cap) break;
    path.sites.push_back(Site{c, row0 + r});
    column = c;
  }
  path.weight = static_cast<std::int64_t>(path.sites.size());
  return path;
}

double psi(const ShapeQuery& query) {
  const double x = query.x;
  const double y = query.y;
  const double p = query.params.p;
  const double q = query.params.q;
  if (x < 0.0 || y < 0.0) {
    throw std::domain_error("shape function needs x, y >= 0");
  }
  if (x < p * y) return x;
  if (y < p * x) return y;
  if (q <= 0.0) return std::min(x, y);
  return (2.0 * std::sqrt(p * x * y) - p * (x + y)) / q;
}

double phi(double x, double y, double mean, double variance) {
  if (variance < 0.0) throw std::domain_error("variance must be non-negative");
  if (x < 0.0 || y < 0.0) throw std::domain_error("phi needs x, y >= 0");
  return (x + y) * mean + 2.0 * std::sqrt(variance * x * y);
}

double soft_edge_constant(const ModelParams& params, double x) {
  const double px = params.p * x;
  return px * px / (4.0 * params.q);
}

}  // namespace blip
