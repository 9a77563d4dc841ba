#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hybridsort/types.hpp"

namespace hybridsort {

inline constexpr double kDefaultMatchIou = 0.5;

/// CLEAR MOT and identity counts for one sequence or an aggregate.
struct EvalCounts {
  std::int64_t gt = 0;           // ground-truth rows
  std::int64_t predictions = 0;  // result rows
  std::int64_t matches = 0;      // CLEAR true positives
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;

  EvalCounts& operator+=(const EvalCounts& o);
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalReport {
  std::string name;
  EvalCounts counts;

  /// 1 - (FN + FP + IDSW) / GT. With no ground truth: 1 when there are no errors,
  /// otherwise -infinity.
  [[nodiscard]] double mota() const;
  /// 2 IDTP / (GT + predictions); 1 when both are empty.
  [[nodiscard]] double idf1() const;
};

/// Evaluates `results` against `gt`.
///
/// Per frame, a ground-truth object keeps its previous predicted partner when that id is
/// still present with IoU >= threshold; the remaining objects are matched by minimum total
/// (1 - IoU) over pairs with IoU >= threshold. An identity switch is counted when a
/// ground-truth object is matched to a different id than at its previous match.
/// IDF1 uses the identity bijection maximising the number of co-matched frames.
///
/// Throws InputError when a result frame lies outside the ground-truth frame range or an
/// id occurs twice in one frame.
[[nodiscard]] EvalReport evaluate(const GroundTruth& gt, std::span<const ResultRow> results,
                                  double iou_threshold = kDefaultMatchIou);

/// Sums counts over sequences.
[[nodiscard]] EvalReport aggregate(std::span<const EvalReport> reports,
                                   std::string name = "TOTAL");

/// Fixed-width table, one row per report.
[[nodiscard]] std::string format_report_table(std::span<const EvalReport> reports);
/// `name.key = value` lines for every report.
[[nodiscard]] std::string format_report_kv(std::span<const EvalReport> reports);

}  // namespace hybridsort
