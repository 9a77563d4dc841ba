#include "hybridsort/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "hybridsort/errors.hpp"

namespace hybridsort {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), costs_(rows * cols, fill), gated_(rows * cols, 0) {}

double AssignmentResult::total_cost(const CostMatrix& costs) const {
  double total = 0.0;
  for (const Match& m : matches) {
    total += costs(m.row, m.col);
  }
  return total;
}

namespace {

using Matrix = std::vector<std::vector<double>>;

struct Potentials {
  std::vector<double> u;          // row duals
  std::vector<double> v;          // column duals
  std::vector<std::size_t> row_of_col;
};

// Shortest augmenting path Hungarian method on a square matrix (e-maxx formulation).
// Produces an optimal perfect matching and duals with u[i] + v[j] <= a[i][j].
Potentials hungarian(const Matrix& a) {
  const std::size_t n = a.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = 0;
  // 1-based internally; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, kNone);
  std::vector<std::size_t> way(n + 1, kNone);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != kNone);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials out;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  out.row_of_col.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    out.row_of_col[j - 1] = p[j] - 1;
  }
  return out;
}

// Every optimal perfect matching uses only edges that are tight under optimal duals.
// The reported pairs are the real ones (ungated, inside the original matrix), so rows are
// visited in order and each takes its smallest real tight column that still admits a
// perfect tight matching; a row with none is left on some non-real column, which
// later moves may exchange for another non-real one.
template <typename RealFn>
void lexicographic_tie_break(const Matrix& a, const Potentials& pot, double eps,
                             std::size_t n_rows, RealFn&& real,
                             std::vector<std::size_t>& col_of_row,
                             std::vector<std::size_t>& row_of_col) {
  const std::size_t n = a.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const auto tight = [&](std::size_t i, std::size_t j) {
    return std::abs(a[i][j] - pot.u[i] - pot.v[j]) <= eps;
  };
  std::vector<bool> fixed_col(n, false);
  std::vector<bool> unmatched_row(n, false);  // pinned to non-real columns
  const auto may_take = [&](std::size_t r, std::size_t c) {
    return !fixed_col[c] && tight(r, c) && (!unmatched_row[r] || !real(r, c));
  };

  // Moves row i onto column j along an alternating cycle of tight edges that ends at
  // i's current column. Returns false when no such cycle exists.
  const auto repin = [&](std::size_t i, std::size_t j) {
    const std::size_t target = col_of_row[i];
    const std::size_t start = row_of_col[j];
    std::vector<std::size_t> parent_col(n, kNone);  // column -> column that led to its row
    std::vector<std::size_t> row_entry(n, kNone);   // row -> column it currently holds
    std::vector<bool> seen_col(n, false);
    std::deque<std::size_t> frontier{start};
    row_entry[start] = j;
    seen_col[j] = true;
    while (!frontier.empty()) {
      const std::size_t r = frontier.front();
      frontier.pop_front();
      for (std::size_t c = 0; c < n; ++c) {
        if (seen_col[c] || c == col_of_row[r] || !may_take(r, c)) {
          continue;
        }
        seen_col[c] = true;
        parent_col[c] = row_entry[r];
        if (c == target) {
          for (std::size_t cur = c; cur != j;) {
            const std::size_t prev = parent_col[cur];
            const std::size_t mover = row_of_col[prev];
            col_of_row[mover] = cur;
            row_of_col[cur] = mover;
            cur = prev;
          }
          col_of_row[i] = j;
          row_of_col[j] = i;
          return true;
        }
        const std::size_t next = row_of_col[c];
        row_entry[next] = c;
        frontier.push_back(next);
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < n_rows; ++i) {
    bool pinned = false;
    for (std::size_t j = 0; j < n && !pinned; ++j) {
      if (!real(i, j) || fixed_col[j] || !tight(i, j)) {
        continue;
      }
      pinned = col_of_row[i] == j || repin(i, j);
      if (pinned) {
        fixed_col[j] = true;
      }
    }
    if (!pinned) {
      unmatched_row[i] = true;
    }
  }
}

}  // namespace

AssignmentResult solve(const CostMatrix& costs) {
  const std::size_t n_rows = costs.rows();
  const std::size_t n_cols = costs.cols();
  AssignmentResult result;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (costs.is_gated(r, c)) {
        continue;
      }
      const double x = costs(r, c);
      if (!std::isfinite(x)) {
        throw InputError("cost matrix has a non-finite ungated entry at (" + std::to_string(r) +
                         ", " + std::to_string(c) + ")");
      }
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }

  if (costs.empty() || lo > hi) {
    for (std::size_t r = 0; r < n_rows; ++r) result.unmatched_rows.push_back(r);
    for (std::size_t c = 0; c < n_cols; ++c) result.unmatched_cols.push_back(c);
    return result;
  }

  // Any assignment using one gated pair fewer is strictly cheaper.
  const double k = static_cast<double>(std::min(n_rows, n_cols));
  const double big = k * (hi - lo) + 2.0 * std::max(std::abs(hi), std::abs(lo)) + 1.0;

  const std::size_t n = std::max(n_rows, n_cols);
  Matrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      a[r][c] = costs.is_gated(r, c) ? big : costs(r, c);
    }
  }

  const Potentials pot = hungarian(a);
  std::vector<std::size_t> row_of_col = pot.row_of_col;
  std::vector<std::size_t> col_of_row(n);
  for (std::size_t c = 0; c < n; ++c) {
    col_of_row[row_of_col[c]] = c;
  }
  const double eps = 1e-9 * std::max(1.0, big);
  const auto real = [&](std::size_t r, std::size_t c) {
    return r < n_rows && c < n_cols && !costs.is_gated(r, c);
  };
  lexicographic_tie_break(a, pot, eps, n_rows, real, col_of_row, row_of_col);

  std::vector<bool> col_used(n_cols, false);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::size_t c = col_of_row[r];
    if (c < n_cols && !costs.is_gated(r, c)) {
      result.matches.push_back({r, c});
      col_used[c] = true;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

}  // namespace hybridsort
