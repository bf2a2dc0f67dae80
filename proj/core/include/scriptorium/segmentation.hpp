#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scriptorium/geometry.hpp"
#include "scriptorium/raster.hpp"

namespace scriptorium {

/// A maximal connected set of ink pixels. Pixels are kept in raster order
/// (row-major: y, then x).
struct Blob {
  int id = 0;
  std::vector<Point> pixels;
  BBox bbox;
  std::size_t area = 0;
  Vec2 centroid;
};

enum class ReadingOrder { LeftToRight, RightToLeft };

struct SegParams {
  int connectivity = 8;
  int small_blob_area = 12;
  int line_gap = 10;
  ReadingOrder reading_order = ReadingOrder::LeftToRight;

  friend bool operator==(const SegParams&, const SegParams&) = default;
};

/// Field name -> message for every violated constraint; empty when valid.
std::map<std::string, std::string> validate(const SegParams& params);

/// y = slope * x + intercept, image coordinates (y grows downward).
struct RegressionLine {
  double slope = 0.0;
  double intercept = 0.0;

  double at(double x) const { return slope * x + intercept; }
};

struct TextLine {
  std::vector<int> blob_ids;
  RegressionLine top;
  RegressionLine middle;
  RegressionLine bottom;
  int x_min = 0;
  int x_max = 0;
};

struct PageSegmentation {
  int width = 0;
  int height = 0;
  std::vector<Blob> blobs;
  std::vector<TextLine> lines;
  std::vector<int> noise_ids;
  SegParams params;

  const Blob& blob(int id) const { return blobs.at(static_cast<std::size_t>(id)); }
};

/// Connected components; ids follow the raster order of each blob's first
/// pixel, so `blobs[i].id == i`.
std::vector<Blob> extract_blobs(const BinaryImage& img, int connectivity);

/// Least-squares fit; falls back to slope 0 through the mean when the x
/// values have no spread.
RegressionLine fit_line(std::span<const double> xs, std::span<const double> ys);

/// Groups blobs with area >= small_blob_area into lines by single-link
/// clustering of centroid y (gap tolerance line_gap). Each line gets three
/// regressions: bbox tops, centroids, bbox bottoms, all against centroid x.
std::vector<TextLine> detect_lines(std::span<const Blob> blobs, const SegParams& params);

/// Assigns every small blob either to the nearest line (within twice the
/// line height of its middle regression; ties go to the lower line) or to
/// noise.
PageSegmentation attach_diacritics(std::vector<TextLine> lines, std::vector<Blob> blobs,
                                   const SegParams& params, int width, int height);

PageSegmentation segment_page(const BinaryImage& img, const SegParams& params);

/// Crop to the union bbox of the line's blobs plus margin (clamped). Only the
/// member blobs' pixels are copied.
BinaryImage crop_line(const BinaryImage& img, const TextLine& line, std::span<const Blob> blobs,
                      int margin);

/// Horizontal band between the fitted top and bottom lines, sampled to
/// exactly `height` rows; used to feed line images to the sequence model.
BinaryImage line_band(const TextLine& line, std::span<const Blob> blobs, int height);

void to_json(nlohmann::json& j, const SegParams& p);
/// Missing fields keep their defaults. Type and range violations are
/// collected per field into `errors`.
SegParams parse_params(const nlohmann::json& j, std::map<std::string, std::string>& errors);
/// Throws Error{InvalidArgument} listing the offending fields.
void from_json(const nlohmann::json& j, SegParams& p);
nlohmann::json to_json(const PageSegmentation& page);

}  // namespace scriptorium
