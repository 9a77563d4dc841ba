#include "hybridsort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "hybridsort/assignment.hpp"
#include "hybridsort/errors.hpp"
#include "hybridsort/geometry.hpp"

namespace hybridsort {

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
  gt += o.gt;
  predictions += o.predictions;
  matches += o.matches;
  fp += o.fp;
  fn += o.fn;
  idsw += o.idsw;
  idtp += o.idtp;
  idfp += o.idfp;
  idfn += o.idfn;
  return *this;
}

double EvalReport::mota() const {
  const std::int64_t errors = counts.fn + counts.fp + counts.idsw;
  if (counts.gt == 0) return errors == 0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - static_cast<double>(errors) / static_cast<double>(counts.gt);
}

double EvalReport::idf1() const {
  const std::int64_t denom = counts.gt + counts.predictions;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(counts.idtp) / static_cast<double>(denom);
}

EvalReport evaluate(const GroundTruth& gt, std::span<const ResultRow> results,
                    double iou_threshold) {
  const int first = gt.first_frame;
  const int last = gt.last_frame();
  std::vector<std::vector<const ResultRow*>> by_frame(gt.frames.size());
  for (const ResultRow& r : results) {
    if (r.frame < first || r.frame > last) {
      throw InputError(fmt::format("result frame {} outside ground-truth range [{}, {}]",
                                   r.frame, first, last));
    }
    by_frame[static_cast<std::size_t>(r.frame - first)].push_back(&r);
  }

  EvalReport report;
  EvalCounts& c = report.counts;
  std::unordered_map<int, int> last_match;           // gt id -> pred id at its last match
  std::map<std::pair<int, int>, std::int64_t> co_matched;  // (gt id, pred id) -> frames
  std::map<int, std::int64_t> gt_rows;
  std::map<int, std::int64_t> pred_rows;

  for (std::size_t f = 0; f < gt.frames.size(); ++f) {
    const auto& objects = gt.frames[f];
    auto& preds = by_frame[f];
    std::sort(preds.begin(), preds.end(),
              [](const ResultRow* a, const ResultRow* b) { return a->id < b->id; });
    for (std::size_t k = 1; k < preds.size(); ++k) {
      if (preds[k]->id == preds[k - 1]->id) {
        throw InputError(
            fmt::format("id {} appears twice in frame {}", preds[k]->id, preds[k]->frame));
      }
    }
    c.gt += static_cast<std::int64_t>(objects.size());
    c.predictions += static_cast<std::int64_t>(preds.size());
    for (const GtObject& g : objects) ++gt_rows[g.id];
    for (const ResultRow* p : preds) ++pred_rows[p->id];

    const std::size_t n = objects.size();
    const std::size_t m = preds.size();
    std::vector<double> overlap(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) overlap[i * m + j] = iou(objects[i].box, preds[j]->box);
    }
    const auto ov = [&](std::size_t i, std::size_t j) { return overlap[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (ov(i, j) >= iou_threshold) ++co_matched[{objects[i].id, preds[j]->id}];
      }
    }

    std::vector<int> gt_partner(n, -1);
    std::vector<bool> pred_taken(m, false);

    // Continuity: keep last pairings still valid, strongest overlap first.
    std::vector<std::pair<std::size_t, std::size_t>> keep;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = last_match.find(objects[i].id);
      if (it == last_match.end()) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (preds[j]->id == it->second && ov(i, j) >= iou_threshold) keep.emplace_back(i, j);
      }
    }
    std::sort(keep.begin(), keep.end(), [&](const auto& a, const auto& b) {
      if (ov(a.first, a.second) != ov(b.first, b.second)) {
        return ov(a.first, a.second) > ov(b.first, b.second);
      }
      return objects[a.first].id < objects[b.first].id;
    });
    for (const auto& [i, j] : keep) {
      if (gt_partner[i] >= 0 || pred_taken[j]) continue;
      gt_partner[i] = static_cast<int>(j);
      pred_taken[j] = true;
    }

    std::vector<std::size_t> free_gt;
    std::vector<std::size_t> free_pred;
    for (std::size_t i = 0; i < n; ++i) {
      if (gt_partner[i] < 0) free_gt.push_back(i);
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!pred_taken[j]) free_pred.push_back(j);
    }
    CostMatrix costs(free_gt.size(), free_pred.size());
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      for (std::size_t b = 0; b < free_pred.size(); ++b) {
        const double o = ov(free_gt[a], free_pred[b]);
        costs(a, b) = 1.0 - o;
        if (o < iou_threshold) costs.gate(a, b);
      }
    }
    for (const Match& mt : solve(costs).matches) {
      const std::size_t i = free_gt[mt.row];
      const std::size_t j = free_pred[mt.col];
      gt_partner[i] = static_cast<int>(j);
      pred_taken[j] = true;
      const auto it = last_match.find(objects[i].id);
      if (it != last_match.end() && it->second != preds[j]->id) ++c.idsw;
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (gt_partner[i] < 0) {
        ++c.fn;
        continue;
      }
      ++c.matches;
      last_match[objects[i].id] = preds[static_cast<std::size_t>(gt_partner[i])]->id;
    }
    c.fp += static_cast<std::int64_t>(std::count(pred_taken.begin(), pred_taken.end(), false));
  }

  // Identity matching: maximise co-matched frames over a one-to-one id mapping.
  std::vector<int> gt_ids;
  std::vector<int> pred_ids;
  for (const auto& [id, _] : gt_rows) gt_ids.push_back(id);
  for (const auto& [id, _] : pred_rows) pred_ids.push_back(id);
  std::unordered_map<int, std::size_t> pred_col;
  for (std::size_t j = 0; j < pred_ids.size(); ++j) pred_col[pred_ids[j]] = j;
  std::unordered_map<int, std::size_t> gt_row;
  for (std::size_t i = 0; i < gt_ids.size(); ++i) gt_row[gt_ids[i]] = i;

  CostMatrix id_costs(gt_ids.size(), pred_ids.size(), 0.0);
  for (const auto& [key, count] : co_matched) {
    id_costs(gt_row[key.first], pred_col[key.second]) = -static_cast<double>(count);
  }
  for (const Match& mt : solve(id_costs).matches) c.idtp -= static_cast<std::int64_t>(id_costs(mt.row, mt.col));
  c.idfn = c.gt - c.idtp;
  c.idfp = c.predictions - c.idtp;
  return report;
}

EvalReport aggregate(std::span<const EvalReport> reports, std::string name) {
  EvalReport out;
  out.name = std::move(name);
  for (const EvalReport& r : reports) out.counts += r.counts;
  return out;
}

std::string format_report_table(std::span<const EvalReport> reports) {
  std::size_t width = 8;
  for (const EvalReport& r : reports) width = std::max(width, r.name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}  {:>6}  {:>7}  {:>7}  {:>7}\n", "name",
                                width, "MOTA", "IDF1", "IDSW", "FP", "FN", "GT");
  for (const EvalReport& r : reports) {
    out += fmt::format("{:<{}}  {:>8.4f}  {:>8.4f}  {:>6}  {:>7}  {:>7}  {:>7}\n", r.name, width,
                       r.mota(), r.idf1(), r.counts.idsw, r.counts.fp, r.counts.fn,
                       r.counts.gt);
  }
  return out;
}

std::string format_report_kv(std::span<const EvalReport> reports) {
  std::string out;
  for (const EvalReport& r : reports) {
    const EvalCounts& c = r.counts;
    out += fmt::format("{0}.mota = {1}\n{0}.idf1 = {2}\n", r.name, r.mota(), r.idf1());
    out += fmt::format(
        "{0}.idsw = {1}\n{0}.fp = {2}\n{0}.fn = {3}\n{0}.gt = {4}\n{0}.predictions = {5}\n"
        "{0}.matches = {6}\n{0}.idtp = {7}\n{0}.idfp = {8}\n{0}.idfn = {9}\n",
        r.name, c.idsw, c.fp, c.fn, c.gt, c.predictions, c.matches, c.idtp, c.idfp, c.idfn);
  }
  return out;
}

}  // namespace hybridsort
