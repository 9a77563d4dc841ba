#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hybridsort {

/// Dense row-major cost matrix (rows = tracklets, cols = detections) with a gate mask.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return costs_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return costs_[r * cols_ + c]; }

  void gate(std::size_t r, std::size_t c) { gated_[r * cols_ + c] = 1; }
  [[nodiscard]] bool is_gated(std::size_t r, std::size_t c) const {
    return gated_[r * cols_ + c] != 0;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> costs_;
  std::vector<std::uint8_t> gated_;
};

struct Match {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Match&, const Match&) = default;
  friend auto operator<=>(const Match&, const Match&) = default;
};

struct AssignmentResult {
  std::vector<Match> matches;  // sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;

  [[nodiscard]] double total_cost(const CostMatrix& costs) const;
};

/// Minimum-cost bipartite assignment over ungated entries.
///
/// Gated entries are replaced by a cost large enough that the solver only uses them
/// when a row or column has no ungated option left, and any such pair is struck from
/// the result. Among ungated pairs the assignment therefore has maximum cardinality
/// and, subject to that, minimum total cost. Ties between optimal assignments go to
/// the lexicographically smallest (row, col) sequence.
///
/// Throws InputError if an ungated entry is not finite.
[[nodiscard]] AssignmentResult solve(const CostMatrix& costs);

}  // namespace hybridsort
