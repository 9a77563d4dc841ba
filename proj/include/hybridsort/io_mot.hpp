#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridsort/types.hpp"

namespace hybridsort {

// MOTChallenge text formats.
//
//   detections: frame,-1,left,top,width,height,conf,-1,-1,-1
//   results:    frame,id,left,top,width,height,conf,-1,-1,-1
//   gt:         frame,id,left,top,width,height,mark,class,visibility
//
// Results are written with two decimals for geometry and four for confidence.

/// Detections grouped by frame. Frames without rows are absent from `frames`.
struct DetectionFile {
  std::vector<FrameDetections> frames;  // ascending frame order
  // File row k lives at frames[first].detections[second].
  std::vector<std::pair<std::size_t, std::size_t>> row_locations;
  std::size_t clamped_confidences = 0;

  [[nodiscard]] std::size_t row_count() const { return row_locations.size(); }
  [[nodiscard]] int last_frame() const { return frames.empty() ? 0 : frames.back().frame; }
};

[[nodiscard]] DetectionFile parse_detections(std::istream& in, std::string_view source = "<stream>");
[[nodiscard]] DetectionFile read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, std::span<const FrameDetections> frames);

[[nodiscard]] std::string format_result_row(const ResultRow& row);
[[nodiscard]] std::vector<ResultRow> parse_results(std::istream& in,
                                                   std::string_view source = "<stream>");
[[nodiscard]] std::vector<ResultRow> read_results(const std::filesystem::path& path);
/// Writes rows sorted by (frame, id). Throws InputError if the file cannot be written.
void write_results(const std::filesystem::path& path, std::span<const ResultRow> rows);
void write_results(std::ostream& out, std::span<const ResultRow> rows);

/// Accepts 9-column gt rows (rows with mark 0 are skipped) and 10-column result rows.
/// The frame range starts at 1 and ends at `sequence_length` when given, otherwise at
/// the largest frame present.
[[nodiscard]] GroundTruth parse_ground_truth(std::istream& in, std::string_view source = "<stream>",
                                             std::optional<int> sequence_length = std::nullopt);
[[nodiscard]] GroundTruth read_ground_truth(const std::filesystem::path& path,
                                            std::optional<int> sequence_length = std::nullopt);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

// Embedding sidecar: a header line "EMB1 <dim> <count> <f32|f64>" followed by `count`
// comma-separated rows of `dim` values, aligned with the detection file rows.
[[nodiscard]] std::vector<Embedding> parse_embeddings(std::istream& in,
                                                      std::optional<std::size_t> expected_rows,
                                                      std::string_view source = "<stream>");
[[nodiscard]] std::vector<Embedding> read_embeddings(const std::filesystem::path& path,
                                                     std::optional<std::size_t> expected_rows);
void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> rows);

/// Attaches sidecar rows to detections by file row. Throws InputError on count mismatch.
void attach_embeddings(DetectionFile& dets, std::vector<Embedding> embeddings);

/// Sequence length from a MOTChallenge seqinfo.ini, if the file exists and has one.
[[nodiscard]] std::optional<int> read_sequence_length(const std::filesystem::path& seqinfo);
void write_seqinfo(const std::filesystem::path& path, std::string_view name, int length,
                   double image_width, double image_height);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace hybridsort
