#include "scriptorium/render.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace scriptorium {

namespace {

constexpr Rgb kPaper{255, 255, 255};
constexpr Rgb kInk{40, 40, 40};
constexpr Rgb kNoiseInk{190, 190, 190};
constexpr Rgb kBoxColor{230, 150, 0};
constexpr Rgb kNoiseBoxColor{220, 220, 220};

void draw_box(RgbImage& out, const BBox& b, Rgb color) {
  for (int x = b.x0 - 1; x <= b.x1 + 1; ++x) {
    out.set(x, b.y0 - 1, color);
    out.set(x, b.y1 + 1, color);
  }
  for (int y = b.y0 - 1; y <= b.y1 + 1; ++y) {
    out.set(b.x0 - 1, y, color);
    out.set(b.x1 + 1, y, color);
  }
}

void draw_regression(RgbImage& out, const RegressionLine& line, int x0, int x1, Rgb color) {
  for (int x = x0; x <= x1; ++x) {
    out.set(x, static_cast<int>(std::lround(line.at(x))), color);
  }
}

}  // namespace

RgbImage render_overlay(const BinaryImage& img, const PageSegmentation& page) {
  RgbImage out(img.width(), img.height(), kPaper);
  const std::unordered_set<int> noise(page.noise_ids.begin(), page.noise_ids.end());

  for (const Blob& b : page.blobs) {
    const Rgb ink = noise.contains(b.id) ? kNoiseInk : kInk;
    for (const Point& p : b.pixels) out.set(p.x, p.y, ink);
  }
  for (const Blob& b : page.blobs) {
    draw_box(out, b.bbox, noise.contains(b.id) ? kNoiseBoxColor : kBoxColor);
  }
  for (const TextLine& line : page.lines) {
    draw_regression(out, line.top, line.x_min, line.x_max, kTopLineColor);
    draw_regression(out, line.bottom, line.x_min, line.x_max, kBottomLineColor);
    draw_regression(out, line.middle, line.x_min, line.x_max, kMiddleLineColor);
  }
  return out;
}

}  // namespace scriptorium
