#pragma once

// Rectangular maximum-weight assignment (Kuhn-Munkres with potentials,
// O(n^2 m) for n <= m).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace mrta {

struct AssignmentResult {
  std::vector<std::optional<std::size_t>> row_to_col;
  double total = 0.0;
};

namespace detail {

// Minimum-cost assignment of every row to a distinct column; requires
// rows <= cols. Returns the column for each row.
inline std::vector<std::size_t> min_cost_rows(const std::vector<std::vector<double>>& cost,
                                              std::size_t rows, std::size_t cols) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, kInf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(rows);
  for (std::size_t j = 1; j <= cols; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Maximum total weight matching between rows and columns. Weights must be
/// non-negative; NaN marks a forbidden pair. Each row on the smaller side is
/// matched; rows whose match is forbidden are reported as unmatched, while
/// zero-weight matches are kept.
inline AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  AssignmentResult out;
  const std::size_t rows = weight.size();
  out.row_to_col.assign(rows, std::nullopt);
  if (rows == 0) return out;
  const std::size_t cols = weight.front().size();
  if (cols == 0) return out;

  auto w = [&](std::size_t r, std::size_t c) {
    const double x = weight[r][c];
    return std::isnan(x) ? 0.0 : x;
  };

  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  std::vector<std::vector<double>> cost(n, std::vector<double>(m));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < m; ++b) cost[a][b] = -(transpose ? w(b, a) : w(a, b));

  const auto match = detail::min_cost_rows(cost, n, m);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t r = transpose ? match[a] : a;
    const std::size_t c = transpose ? a : match[a];
    const double x = weight[r][c];
    if (!std::isnan(x)) out.row_to_col[r] = c;
  }
  for (std::size_t r = 0; r < rows; ++r)
    if (out.row_to_col[r]) out.total += weight[r][*out.row_to_col[r]];
  return out;
}

}  // namespace mrta
