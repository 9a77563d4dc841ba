#include "hybridsort/overlay.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <tuple>

#include <fmt/format.h>

#include "hybridsort/io_mot.hpp"

namespace hybridsort {

namespace {

constexpr std::array<std::string_view, 20> kPalette = {
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
    "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8",
    "#800000", "#aaffc3", "#808000", "#ffd8b1", "#000075", "#808080",
};

}  // namespace

std::string color_token(int id) {
  // Knuth multiplicative hash spreads consecutive ids over the palette.
  const std::uint32_t h = static_cast<std::uint32_t>(id) * 2654435761u;
  return std::string(kPalette[(h >> 16) % kPalette.size()]);
}

std::vector<OverlayRecord> build_overlay(std::span<const ResultRow> results,
                                         const GroundTruth* gt) {
  std::vector<OverlayRecord> out;
  if (gt != nullptr) {
    for (std::size_t k = 0; k < gt->frames.size(); ++k) {
      for (const GtObject& g : gt->frames[k]) {
        out.push_back({gt->first_frame + static_cast<int>(k), g.id, g.box, color_token(g.id), true});
      }
    }
  }
  for (const ResultRow& r : results) {
    out.push_back({r.frame, r.id, r.box, color_token(r.id), false});
  }
  std::stable_sort(out.begin(), out.end(), [](const OverlayRecord& a, const OverlayRecord& b) {
    return std::tuple(a.frame, !a.ground_truth, a.id) < std::tuple(b.frame, !b.ground_truth, b.id);
  });
  return out;
}

std::string render_overlay_text(std::span<const OverlayRecord> records) {
  std::string out;
  for (const OverlayRecord& r : records) {
    out += fmt::format("{} {} {} {} {:.2f} {:.2f} {:.2f} {:.2f}\n", r.frame, r.id,
                       r.ground_truth ? "gt" : "track", r.color, r.box.x1, r.box.y1,
                       r.box.width(), r.box.height());
  }
  return out;
}

std::string render_overlay_svg(std::span<const OverlayRecord> records, double width,
                               double height) {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      width, height, width, height);
  std::size_t k = 0;
  while (k < records.size()) {
    const int frame = records[k].frame;
    out += fmt::format("<g class=\"frame\" data-frame=\"{}\">\n", frame);
    for (; k < records.size() && records[k].frame == frame; ++k) {
      const OverlayRecord& r = records[k];
      out += fmt::format(
          "  <rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
          "stroke=\"{}\"{}/>\n",
          r.box.x1, r.box.y1, r.box.width(), r.box.height(), r.color,
          r.ground_truth ? " stroke-dasharray=\"4 2\"" : "");
      out += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"{}\">{}{}</text>\n", r.box.x1,
                         r.box.y1, r.color, r.ground_truth ? "gt " : "", r.id);
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_overlay(const std::filesystem::path& path, std::span<const OverlayRecord> records,
                   double width, double height) {
  const bool svg = path.extension() == ".svg";
  write_file_atomically(path, svg ? render_overlay_svg(records, width, height)
                                  : render_overlay_text(records));
}

}  // namespace hybridsort
