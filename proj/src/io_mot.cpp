#include "hybridsort/io_mot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class LineError {
 public:
  LineError(std::string_view source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(fmt::format("{}:{}: {}", source_, line_, msg));
  }

  int integer(std::string_view field, std::string_view what) const {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
      fail(fmt::format("{} '{}' is not an integer", what, field));
    }
    return value;
  }

  double real(std::string_view field, std::string_view what) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() ||
        !std::isfinite(value)) {
      fail(fmt::format("{} '{}' is not a finite number", what, field));
    }
    return value;
  }

 private:
  std::string_view source_;
  std::size_t line_;
};

// Calls fn(fields, error) for every non-blank line.
template <typename Fn>
void for_each_row(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    fn(split_fields(line), LineError(source, line_no));
  }
}

std::string fixed(double x, int precision) {
  std::string s = fmt::format("{:.{}f}", x, precision);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

Box parse_tlwh(const std::vector<std::string_view>& f, const LineError& err) {
  const double left = err.real(f[2], "bb_left");
  const double top = err.real(f[3], "bb_top");
  const double w = err.real(f[4], "bb_width");
  const double h = err.real(f[5], "bb_height");
  if (w < 0.0 || h < 0.0) err.fail("negative box size");
  return Box::from_tlwh(left, top, w, h);
}

int parse_frame(std::string_view field, const LineError& err) {
  const int frame = err.integer(field, "frame");
  if (frame < 1) err.fail("frame must be >= 1");
  return frame;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::string tlwh_fields(const Box& b) {
  return fmt::format("{},{},{},{}", fixed(b.x1, 2), fixed(b.y1, 2), fixed(b.width(), 2),
                     fixed(b.height(), 2));
}

}  // namespace

DetectionFile parse_detections(std::istream& in, std::string_view source) {
  struct Row {
    int frame;
    Detection det;
  };
  std::vector<Row> rows;
  std::size_t clamped = 0;
  for_each_row(in, source, [&](const std::vector<std::string_view>& f, const LineError& err) {
    if (f.size() != 10) err.fail(fmt::format("expected 10 fields, got {}", f.size()));
    const int frame = parse_frame(f[0], err);
    if (err.integer(f[1], "id") != -1) err.fail("detection rows must carry id -1");
    Detection d;
    d.box = parse_tlwh(f, err);
    double conf = err.real(f[6], "conf");
    if (conf < 0.0 || conf > 1.0) {
      conf = std::clamp(conf, 0.0, 1.0);
      ++clamped;
    }
    d.confidence = conf;
    for (std::size_t k = 7; k < 10; ++k) err.real(f[k], "trailing field");
    rows.push_back({frame, std::move(d)});
  });

  DetectionFile out;
  out.clamped_confidences = clamped;
  std::map<int, std::size_t> slot_of_frame;
  for (const Row& r : rows) slot_of_frame.emplace(r.frame, 0);
  std::size_t slot = 0;
  for (auto& [frame, s] : slot_of_frame) {
    s = slot++;
    out.frames.push_back({frame, {}});
  }
  out.row_locations.reserve(rows.size());
  for (Row& r : rows) {
    const std::size_t s = slot_of_frame.at(r.frame);
    auto& dets = out.frames[s].detections;
    r.det.source_index = dets.size();
    out.row_locations.emplace_back(s, dets.size());
    dets.push_back(std::move(r.det));
  }
  return out;
}

DetectionFile read_detections(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_detections(in, path.string());
}

void write_detections(const std::filesystem::path& path, std::span<const FrameDetections> frames) {
  std::string content;
  for (const FrameDetections& f : frames) {
    for (const Detection& d : f.detections) {
      content += fmt::format("{},-1,{},{},-1,-1,-1\n", f.frame, tlwh_fields(d.box),
                             fixed(d.confidence, 4));
    }
  }
  write_text(path, content);
}

std::string format_result_row(const ResultRow& row) {
  return fmt::format("{},{},{},{},-1,-1,-1", row.frame, row.id, tlwh_fields(row.box),
                     fixed(row.confidence, 4));
}

std::vector<ResultRow> parse_results(std::istream& in, std::string_view source) {
  std::vector<ResultRow> rows;
  for_each_row(in, source, [&](const std::vector<std::string_view>& f, const LineError& err) {
    if (f.size() != 10) err.fail(fmt::format("expected 10 fields, got {}", f.size()));
    ResultRow r;
    r.frame = parse_frame(f[0], err);
    r.id = err.integer(f[1], "id");
    if (r.id < 1) err.fail("track ids must be positive");
    r.box = parse_tlwh(f, err);
    r.confidence = err.real(f[6], "conf");
    for (std::size_t k = 7; k < 10; ++k) err.real(f[k], "trailing field");
    rows.push_back(r);
  });
  return rows;
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_results(in, path.string());
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  std::vector<ResultRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  for (const ResultRow& r : sorted) out << format_result_row(r) << '\n';
}

void write_results(const std::filesystem::path& path, std::span<const ResultRow> rows) {
  std::ostringstream buf;
  write_results(buf, rows);
  write_text(path, buf.str());
}

GroundTruth parse_ground_truth(std::istream& in, std::string_view source,
                               std::optional<int> sequence_length) {
  std::vector<std::pair<int, GtObject>> rows;
  int max_frame = 0;
  for_each_row(in, source, [&](const std::vector<std::string_view>& f, const LineError& err) {
    if (f.size() != 9 && f.size() != 10) {
      err.fail(fmt::format("expected 9 (gt) or 10 (result) fields, got {}", f.size()));
    }
    const int frame = parse_frame(f[0], err);
    GtObject g;
    g.id = err.integer(f[1], "id");
    if (g.id < 1) err.fail("ground-truth ids must be positive");
    g.box = parse_tlwh(f, err);
    if (f.size() == 9) {
      const int mark = err.integer(f[6], "mark");
      err.real(f[7], "class");
      g.visibility = err.real(f[8], "visibility");
      if (mark == 0) return;
    } else {
      for (std::size_t k = 6; k < 10; ++k) err.real(f[k], "trailing field");
    }
    max_frame = std::max(max_frame, frame);
    rows.emplace_back(frame, g);
  });
  const int length = sequence_length.value_or(max_frame);
  if (max_frame > length) {
    throw InputError(fmt::format("{}: frame {} exceeds sequence length {}", source, max_frame,
                                 length));
  }
  GroundTruth gt;
  gt.first_frame = 1;
  gt.frames.resize(static_cast<std::size_t>(length));
  for (auto& [frame, g] : rows) gt.frames[static_cast<std::size_t>(frame - 1)].push_back(g);
  for (auto& objs : gt.frames) {
    std::stable_sort(objs.begin(), objs.end(),
                     [](const GtObject& a, const GtObject& b) { return a.id < b.id; });
  }
  return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path,
                              std::optional<int> sequence_length) {
  auto in = open_for_read(path);
  return parse_ground_truth(in, path.string(), sequence_length);
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  std::string content;
  for (std::size_t k = 0; k < gt.frames.size(); ++k) {
    const int frame = gt.first_frame + static_cast<int>(k);
    for (const GtObject& g : gt.frames[k]) {
      content += fmt::format("{},{},{},1,1,{}\n", frame, g.id, tlwh_fields(g.box),
                             fixed(g.visibility, 4));
    }
  }
  write_text(path, content);
}

std::vector<Embedding> parse_embeddings(std::istream& in, std::optional<std::size_t> expected_rows,
                                        std::string_view source) {
  std::string header;
  if (!std::getline(in, header)) {
    throw InputError(fmt::format("{}: missing embedding header", source));
  }
  std::istringstream hs(header);
  std::string magic;
  std::string dtype;
  long long dim = -1;
  long long count = -1;
  hs >> magic >> dim >> count >> dtype;
  if (!hs || magic != "EMB1" || dim < 1 || count < 0 || (dtype != "f32" && dtype != "f64")) {
    throw InputError(fmt::format("{}:1: malformed embedding header '{}'", source, header));
  }
  if (expected_rows && static_cast<std::size_t>(count) != *expected_rows) {
    throw InputError(fmt::format("{}: embedding count {} does not match detection row count {}",
                                 source, count, *expected_rows));
  }
  std::vector<Embedding> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const LineError err(source, line_no);
    const auto fields = split_fields(line);
    if (fields.size() != static_cast<std::size_t>(dim)) {
      err.fail(fmt::format("embedding row {} has {} values, expected {}", rows.size(),
                           fields.size(), dim));
    }
    Embedding e;
    e.reserve(fields.size());
    for (std::string_view f : fields) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
      if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty() || !std::isfinite(x)) {
        err.fail(fmt::format("embedding row {} has a non-finite value '{}'", rows.size(), f));
      }
      e.push_back(dtype == "f32" ? static_cast<double>(static_cast<float>(x)) : x);
    }
    rows.push_back(std::move(e));
  }
  if (rows.size() != static_cast<std::size_t>(count)) {
    throw InputError(fmt::format("{}: header declares {} rows, file has {}", source, count,
                                 rows.size()));
  }
  return rows;
}

std::vector<Embedding> read_embeddings(const std::filesystem::path& path,
                                       std::optional<std::size_t> expected_rows) {
  auto in = open_for_read(path);
  return parse_embeddings(in, expected_rows, path.string());
}

void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> rows) {
  const std::size_t dim = rows.empty() ? 1 : rows.front().size();
  std::string content = fmt::format("EMB1 {} {} f64\n", dim, rows.size());
  for (const Embedding& e : rows) {
    if (e.size() != dim) throw InputError("embedding rows have differing dimensions");
    content += fmt::format("{}\n", fmt::join(e, ","));
  }
  write_text(path, content);
}

void attach_embeddings(DetectionFile& dets, std::vector<Embedding> embeddings) {
  if (embeddings.size() != dets.row_count()) {
    throw InputError(fmt::format("embedding count {} does not match detection row count {}",
                                 embeddings.size(), dets.row_count()));
  }
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    const auto [slot, index] = dets.row_locations[k];
    dets.frames[slot].detections[index].embedding = std::move(embeddings[k]);
  }
}

std::optional<int> read_sequence_length(const std::filesystem::path& seqinfo) {
  std::ifstream in(seqinfo);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    if (trim(std::string_view(line).substr(0, eq)) == "seqLength") {
      const std::string_view value = trim(std::string_view(line).substr(eq + 1));
      int n = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc{} || ptr != value.data() + value.size() || n < 0) {
        throw InputError(seqinfo.string() + ": malformed seqLength");
      }
      return n;
    }
  }
  return std::nullopt;
}

void write_seqinfo(const std::filesystem::path& path, std::string_view name, int length,
                   double image_width, double image_height) {
  write_text(path, fmt::format("[Sequence]\nname={}\nframeRate=30\nseqLength={}\nimWidth={}\n"
                               "imHeight={}\nimExt=.jpg\n",
                               name, length, static_cast<long>(image_width),
                               static_cast<long>(image_height)));
}

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_text(tmp, std::string(content));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace hybridsort
