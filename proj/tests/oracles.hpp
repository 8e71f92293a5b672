#pragma once

// Brute-force references for the lattice kernels. Deliberately naive: they
// enumerate paths instead of running a recurrence.

#include "blip/fields.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Coords = std::vector<std::pair<int, int>>;  // 1-based (column, row)

inline blip::MarkGrid grid_with_marks(int width, int height, const Coords& marks, int first_row = 1) {
  blip::MarkGrid grid = blip::MarkGrid::Zero(width, height);
  for (const auto& [i, j] : marks) grid(i - 1, j - first_row) = 1;
  return grid;
}

/// Random grid from a small LCG so oracle inputs do not depend on the code
/// under test.
inline blip::MarkGrid random_grid(int width, int height, double p, std::uint64_t seed) {
  blip::MarkGrid grid(width, height);
  std::uint64_t s = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
      grid(i, j) = static_cast<double>(s >> 11) * 0x1.0p-53 < p ? 1 : 0;
    }
  }
  return grid;
}

inline int longest_chain_from(const blip::MarkGrid& g, int m, int n, int i, int j) {
  // Best chain of marks strictly up-right of (i, j), exclusive.
  int best = 0;
  for (int a = i + 1; a <= m; ++a) {
    for (int b = j + 1; b <= n; ++b) {
      if (g(a - 1, b - 1)) best = std::max(best, 1 + longest_chain_from(g, m, n, a, b));
    }
  }
  return best;
}

/// Largest number of marks on a strictly increasing chain in [1, m] x [1, n].
inline int blip_by_enumeration(const blip::MarkGrid& g, int m, int n) {
  return longest_chain_from(g, m, n, 0, 0);
}

inline std::int64_t best_path_from(const blip::WeightGrid& w, int m, int n, int i, int j) {
  const std::int64_t here = w(i - 1, j - 1);
  if (i == m && j == n) return here;
  std::int64_t best = 0;
  if (i < m) best = std::max(best, best_path_from(w, m, n, i + 1, j));
  if (j < n) best = std::max(best, best_path_from(w, m, n, i, j + 1));
  return here + best;
}

/// Heaviest up-right path from (1, 1) to (m, n), by visiting every path.
inline std::int64_t lpp_by_enumeration(const blip::WeightGrid& w, int m, int n) {
  return best_path_from(w, m, n, 1, 1);
}

inline blip::WeightGrid random_weights(int width, int height, int max_weight, std::uint64_t seed) {
  blip::WeightGrid grid(width, height);
  std::uint64_t s = seed ^ 0x5DEECE66DULL;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
      grid(i, j) = static_cast<std::int64_t>((s >> 33) % static_cast<std::uint64_t>(max_weight + 1));
    }
  }
  return grid;
}

// Hand-worked example: marks on [1, 8] x [1, 8], L(7, 8) = 5.
inline const Coords& worked_blip_marks() {
  static const Coords marks{{1, 2}, {1, 4}, {1, 5}, {1, 7}, {2, 1}, {5, 1}, {6, 1},
                            {2, 3}, {2, 5}, {4, 2}, {8, 2}, {3, 4}, {3, 6}, {5, 3},
                            {7, 2}, {5, 5}, {5, 7}, {7, 5}, {8, 5}, {7, 8}};
  return marks;
}

// Hand-worked particle example: marked columns of corner rows t = 0..9, and the set of occupied
// sites <= 10 at each t for the R-process started from r_k(0) = k.
inline const std::vector<std::vector<int>>& worked_r_marks() {
  static const std::vector<std::vector<int>> rows{{5, 6, 8, 9}, {2, 8, 9},   {1, 4, 9},
                                                  {2, 4, 6, 8}, {1, 5, 7, 9, 10}, {3, 8, 10},
                                                  {1, 2, 3, 5}, {3, 9},      {2, 4, 9},
                                                  {7, 9}};
  return rows;
}

inline const std::vector<std::vector<int>>& worked_r_occupied() {
  static const std::vector<std::vector<int>> occupied{
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {1, 2, 3, 4, 6, 7, 8, 9, 10}, {1, 3, 4, 5, 6, 7, 9, 10},
      {2, 3, 5, 6, 7, 8, 10},          {3, 4, 5, 7, 8, 9, 10},       {3, 4, 6, 8, 9, 10},
      {4, 5, 6, 9, 10},                {4, 6, 7, 9, 10},             {4, 6, 7, 10},
      {5, 6, 7, 10}};
  return occupied;
}

}  // namespace oracle
