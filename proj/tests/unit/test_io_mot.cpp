#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "hybridsort/errors.hpp"
#include "hybridsort/io_mot.hpp"

using namespace hybridsort;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(HYBRIDSORT_TEST_DATA) / "io";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("hybridsort-io-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

DetectionFile parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_detections(in, "mem");
}

}  // namespace

TEST(Detections, Examples) {
  const DetectionFile f = parse_text("1,-1,10,20,30,40,0.9,-1,-1,-1\n");
  ASSERT_EQ(f.frames.size(), 1u);
  EXPECT_EQ(f.frames[0].frame, 1);
  const Detection& d = f.frames[0].detections.at(0);
  EXPECT_EQ(d.box.x1, 10);
  EXPECT_EQ(d.box.y1, 20);
  EXPECT_EQ(d.box.x2, 40);
  EXPECT_EQ(d.box.y2, 60);
  EXPECT_DOUBLE_EQ(d.confidence, 0.9);
  EXPECT_TRUE(parse_text("").frames.empty());
  try {
    (void)parse_text("1,-1,10,20,30,40,0.9,-1,-1\n");
    FAIL() << "9-field row accepted";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:1:"), std::string::npos) << e.what();
  }
}

TEST(Detections, GroupsByFrameAndKeepsOrder) {
  const DetectionFile f = parse_text(
      "3,-1,0,0,1,1,0.1,-1,-1,-1\n1,-1,0,0,2,2,0.2,-1,-1,-1\n3,-1,0,0,3,3,0.3,-1,-1,-1\n");
  ASSERT_EQ(f.frames.size(), 2u);
  EXPECT_EQ(f.frames[0].frame, 1);
  EXPECT_EQ(f.frames[1].frame, 3);
  ASSERT_EQ(f.frames[1].detections.size(), 2u);
  EXPECT_DOUBLE_EQ(f.frames[1].detections[0].confidence, 0.1);
  EXPECT_DOUBLE_EQ(f.frames[1].detections[1].confidence, 0.3);
  EXPECT_EQ(f.frames[1].detections[1].source_index, 1u);
  EXPECT_EQ(f.row_locations[2], (std::pair<std::size_t, std::size_t>{1, 1}));
}

TEST(Detections, ClampsOutOfRangeConfidence) {
  const DetectionFile f =
      parse_text("1,-1,0,0,1,1,1.3,-1,-1,-1\n1,-1,0,0,1,1,-0.2,-1,-1,-1\n1,-1,0,0,1,1,0.5,-1,-1,-1\n");
  EXPECT_EQ(f.clamped_confidences, 2u);
  EXPECT_EQ(f.frames[0].detections[0].confidence, 1.0);
  EXPECT_EQ(f.frames[0].detections[1].confidence, 0.0);
}

TEST(Results, FormatExamples) {
  EXPECT_EQ(format_result_row({1, 1, {0, 0, 10, 20}, 0.9}),
            "1,1,0.00,0.00,10.00,20.00,0.9000,-1,-1,-1");
  std::ostringstream empty;
  write_results(empty, std::span<const ResultRow>{});
  EXPECT_EQ(empty.str(), "");
  std::ostringstream sorted;
  const std::vector<ResultRow> rows{{2, 1, {0, 0, 1, 1}, 0.5}, {1, 3, {0, 0, 1, 1}, 0.5},
                                    {1, 2, {0, 0, 1, 1}, 0.5}};
  write_results(sorted, rows);
  std::istringstream back(sorted.str());
  const auto parsed = parse_results(back);
  EXPECT_EQ(parsed[0].id, 2);
  EXPECT_EQ(parsed[1].id, 3);
  EXPECT_EQ(parsed[2].frame, 2);
}

TEST(Results, NegativeZeroPrintsUnsigned) {
  EXPECT_EQ(format_result_row({1, 1, {-0.001, 0, 10, 20}, 0.0}),
            "1,1,0.00,0.00,10.00,20.00,0.0000,-1,-1,-1");
}

TEST(Results, RoundTripWithinPrecision) {
  testgen::Rng rng(41);
  std::vector<ResultRow> rows;
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform(-50, 1300);
    const double y = rng.uniform(-50, 800);
    rows.push_back({k / 10 + 1, k % 10 + 1,
                    {x, y, x + rng.uniform(0, 300), y + rng.uniform(0, 400)},
                    rng.uniform(0, 1)});
  }
  std::ostringstream out;
  write_results(out, rows);
  std::istringstream in(out.str());
  const auto back = parse_results(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(back[k].frame, rows[k].frame);
    EXPECT_EQ(back[k].id, rows[k].id);
    // Width is rounded separately from left, so the right edge may carry two roundings.
    EXPECT_NEAR(back[k].box.x1, rows[k].box.x1, 0.005 + 1e-9);
    EXPECT_NEAR(back[k].box.y1, rows[k].box.y1, 0.005 + 1e-9);
    EXPECT_NEAR(back[k].box.width(), rows[k].box.width(), 0.005 + 1e-9);
    EXPECT_NEAR(back[k].box.height(), rows[k].box.height(), 0.005 + 1e-9);
    EXPECT_NEAR(back[k].confidence, rows[k].confidence, 0.00005 + 1e-12);
  }
}

TEST(Detections, WriteReadRoundTrip) {
  TempDir dir;
  testgen::Rng rng(42);
  std::vector<FrameDetections> frames;
  for (int f = 1; f <= 50; ++f) {
    FrameDetections fd{f, {}};
    for (int k = 0; k < rng.integer(0, 5); ++k) {
      Detection d;
      d.box = testgen::box(rng, 1000, 200);
      d.confidence = rng.uniform(0, 1);
      fd.detections.push_back(d);
    }
    frames.push_back(fd);
  }
  write_detections(dir.path() / "det.txt", frames);
  const DetectionFile back = read_detections(dir.path() / "det.txt");
  std::size_t i = 0;
  for (const FrameDetections& fd : frames) {
    if (fd.detections.empty()) continue;
    ASSERT_EQ(back.frames[i].frame, fd.frame);
    ASSERT_EQ(back.frames[i].detections.size(), fd.detections.size());
    for (std::size_t k = 0; k < fd.detections.size(); ++k) {
      EXPECT_NEAR(back.frames[i].detections[k].box.x1, fd.detections[k].box.x1, 0.005 + 1e-9);
      EXPECT_NEAR(back.frames[i].detections[k].confidence, fd.detections[k].confidence, 5e-5 + 1e-12);
    }
    ++i;
  }
  EXPECT_EQ(i, back.frames.size());
}

TEST(GoldenCorpus, PositiveFilesRoundTripByteForByte) {
  TempDir dir;
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(kData / "positive")) {
    const fs::path p = entry.path();
    const std::string name = p.filename().string();
    const fs::path out = dir.path() / name;
    if (name.ends_with(".det.txt")) {
      const DetectionFile f = read_detections(p);
      EXPECT_EQ(f.clamped_confidences, 0u) << name;
      write_detections(out, f.frames);
    } else if (name.ends_with(".res.txt")) {
      write_results(out, read_results(p));
    } else {
      continue;
    }
    EXPECT_EQ(slurp(out), slurp(p)) << name;
    ++checked;
  }
  EXPECT_GE(checked, 6);
}

TEST(GoldenCorpus, NegativeFilesFailAtTheirLine) {
  std::ifstream manifest(kData / "negative" / "expected_lines.txt");
  ASSERT_TRUE(manifest);
  std::string line;
  int checked = 0;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name;
    int at = 0;
    fields >> name >> at;
    const fs::path p = kData / "negative" / name;
    try {
      (void)read_detections(p);
      ADD_FAILURE() << name << " was accepted";
    } catch (const InputError& e) {
      const std::string expected = p.string() + ":" + std::to_string(at) + ":";
      EXPECT_NE(std::string(e.what()).find(expected), std::string::npos) << e.what();
    }
    ++checked;
  }
  EXPECT_GE(checked, 10);
  // Every negative fixture is listed.
  int files = 0;
  for (const auto& entry : fs::directory_iterator(kData / "negative")) {
    if (entry.path().filename().string().ends_with(".det.txt")) ++files;
  }
  EXPECT_EQ(files, checked);
}

TEST(Embeddings, Examples) {
  std::istringstream ok("EMB1 4 2 f64\n1,2,3,4\n0.5,0.5,0.5,0.5\n");
  const auto rows = parse_embeddings(ok, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].size(), 4u);

  std::istringstream count("EMB1 4 2 f64\n1,2,3,4\n1,2,3,4\n");
  try {
    (void)parse_embeddings(count, 3);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }

  std::istringstream nan("EMB1 2 2 f64\n1,2\nnan,1\n");
  try {
    (void)parse_embeddings(nan, std::nullopt);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }

  std::istringstream dim("EMB1 3 1 f64\n1,2\n");
  EXPECT_THROW((void)parse_embeddings(dim, std::nullopt), InputError);
  std::istringstream header("EMB2 3 1 f64\n1,2,3\n");
  EXPECT_THROW((void)parse_embeddings(header, std::nullopt), InputError);
}

TEST(Embeddings, AttachByFileRow) {
  DetectionFile f = parse_text("2,-1,0,0,1,1,0.1,-1,-1,-1\n1,-1,0,0,2,2,0.2,-1,-1,-1\n");
  attach_embeddings(f, {{1.0}, {2.0}});
  EXPECT_EQ(f.frames[1].detections[0].embedding, (Embedding{1.0}));
  EXPECT_EQ(f.frames[0].detections[0].embedding, (Embedding{2.0}));
  EXPECT_THROW(attach_embeddings(f, {{1.0}}), InputError);
}

TEST(Embeddings, WriteReadRoundTripIsExact) {
  TempDir dir;
  testgen::Rng rng(43);
  std::vector<Embedding> rows(20, Embedding(16));
  for (auto& r : rows) {
    for (double& x : r) x = rng.normal(0, 1);
  }
  write_embeddings(dir.path() / "emb.txt", rows);
  EXPECT_EQ(read_embeddings(dir.path() / "emb.txt", 20), rows);
}

TEST(GroundTruth, ParsesGtAndSkipsIgnoredRows) {
  std::istringstream in("1,1,0,0,10,20,1,1,1.0\n1,2,5,5,10,20,0,1,1.0\n3,1,1,0,10,20,1,1,0.5\n");
  const GroundTruth gt = parse_ground_truth(in, "gt", 4);
  ASSERT_EQ(gt.frames.size(), 4u);
  EXPECT_EQ(gt.frames[0].size(), 1u);
  EXPECT_TRUE(gt.frames[1].empty());
  EXPECT_DOUBLE_EQ(gt.frames[2][0].visibility, 0.5);
  EXPECT_EQ(gt.last_frame(), 4);
  std::istringstream too_long("5,1,0,0,10,20,1,1,1.0\n");
  EXPECT_THROW((void)parse_ground_truth(too_long, "gt", 4), InputError);
}

TEST(GroundTruth, WriteReadRoundTrip) {
  TempDir dir;
  GroundTruth gt;
  gt.frames = {{{1, {0, 0, 10, 20}, 1.0}, {2, {5, 5, 15, 25}, 0.25}}, {}, {{1, {1, 0, 11, 20}, 1.0}}};
  write_ground_truth(dir.path() / "gt.txt", gt);
  write_seqinfo(dir.path() / "seqinfo.ini", "demo", 3, 1280, 720);
  const auto len = read_sequence_length(dir.path() / "seqinfo.ini");
  ASSERT_EQ(len, 3);
  const GroundTruth back = read_ground_truth(dir.path() / "gt.txt", len);
  ASSERT_EQ(back.frames.size(), 3u);
  EXPECT_EQ(back.frames[0][1].id, 2);
  EXPECT_DOUBLE_EQ(back.frames[0][1].visibility, 0.25);
  EXPECT_FALSE(read_sequence_length(dir.path() / "missing.ini").has_value());
}

TEST(Files, UnwritablePathThrows) {
  EXPECT_THROW(write_results(fs::path("/nonexistent-dir/x/results.txt"), std::span<const ResultRow>{}),
               InputError);
  EXPECT_THROW((void)read_detections("/nonexistent-dir/det.txt"), InputError);
}

TEST(Files, AtomicWriteReplacesContent) {
  TempDir dir;
  const fs::path p = dir.path() / "out.txt";
  write_file_atomically(p, "first");
  write_file_atomically(p, "second");
  EXPECT_EQ(slurp(p), "second");
  EXPECT_FALSE(fs::exists(dir.path() / "out.txt.tmp"));
}
