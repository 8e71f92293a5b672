#pragma once

#include "blip/fields.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <ostream>
#include <vector>

namespace blip {

template <typename Scalar>
using DpTable = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DpRow = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Entry (i - 1, r) = L(i, r + 1): longest strictly increasing chain of
/// marks in columns 1..i of the first r + 1 rows.
using BlipTable = DpTable<std::int32_t>;
/// Entry (i - 1, j - 1) = G(i, j).
using PassageTable = DpTable<std::int64_t>;

struct Site {
  std::int64_t i = 0;
  std::int64_t j = 0;
  bool operator==(const Site&) const = default;
};

// Longest increasing paths. Rows are counted from the field's first row, so
// on a corner-indexed field blip_length(f, s, t + 1) is L'(s, t).
//
// Recurrence: L(i, j) = max(L(i-1, j), L(i, j-1), L(i-1, j-1) + X(i, j)).
std::int32_t blip_length(const BernoulliField& field, std::int64_t m, std::int64_t n);
/// L(i, n) for i = 1..m, using O(m) memory.
DpRow<std::int32_t> blip_row(const BernoulliField& field, std::int64_t m, std::int64_t n);
BlipTable blip_table(const BernoulliField& field, std::int64_t m, std::int64_t n);

/// L'(s, t) on a corner-indexed field (rows 0..t).
inline std::int32_t corner_blip_length(const BernoulliField& shifted, std::int64_t s,
                                       std::int64_t t) {
  return blip_length(shifted, s, t + 1);
}

// Last passage over up-right paths: G(i, j) = max(G(i-1, j), G(i, j-1)) + Y(i, j).
std::int64_t corner_growth(const GeometricField& field, std::int64_t m, std::int64_t n);
PassageTable corner_growth_table(const GeometricField& field, std::int64_t m, std::int64_t n);
/// G((k, l), (m, n)): paths confined to [k, m] x [l, n].
std::int64_t corner_growth_from(const GeometricField& field, Site start, Site end);

struct PatientPath {
  std::vector<Site> sites;
  std::int64_t weight = 0;
};

/// Greedy path: in each row scan rightward from one past the last collected
/// column to the first mark; stop at the first row whose scan passes
/// `width_cap`.
PatientPath patient_strategy(const BernoulliField& field, std::int64_t n, std::int64_t width_cap);

struct ShapeQuery {
  double x = 0.0;
  double y = 0.0;
  ModelParams params;
};

/// Limit shape of n^-1 L(nx, ny):
///   x                            if x < p y
///   (2 sqrt(p x y) - p (x + y))/q  if p y <= x <= y / p
///   y                            if y < p x
double psi(const ShapeQuery& query);

/// (x + y) mean + 2 sqrt(variance x y).
double phi(double x, double y, double mean, double variance);

/// Soft-edge constant (p x)^2 / (4 q).
double soft_edge_constant(const ModelParams& params, double x);

/// CSV with header "i,j,value"; i and j are 1-based, rows start at
/// `first_row`.
template <typename Scalar>
void write_table_csv(std::ostream& out, const DpTable<Scalar>& table, std::int64_t first_row = 1) {
  out << "i,j,value\n";
  for (Eigen::Index r = 0; r < table.cols(); ++r) {
    for (Eigen::Index c = 0; c < table.rows(); ++c) {
      out << (c + 1) << ',' << (r + first_row) << ',' << table(c, r) << '\n';
    }
  }
}

}  // namespace blip
