#include "scriptorium/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scriptorium/error.hpp"

namespace scriptorium {

std::map<std::string, std::string> validate(const SegParams& params) {
  std::map<std::string, std::string> errors;
  if (params.connectivity != 4 && params.connectivity != 8) {
    errors["connectivity"] = "must be 4 or 8";
  }
  if (params.small_blob_area < 1) errors["small_blob_area"] = "must be >= 1";
  if (params.line_gap < 1) errors["line_gap"] = "must be >= 1";
  return errors;
}

std::vector<Blob> extract_blobs(const BinaryImage& img, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw Error(ErrorKind::InvalidArgument, "connectivity must be 4 or 8");
  }
  std::vector<Blob> blobs;
  if (img.empty()) return blobs;

  const int w = img.width();
  const int h = img.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Point> stack;

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.at(x, y) || label[y * w + x] >= 0) continue;
      Blob blob;
      blob.id = static_cast<int>(blobs.size());
      label[y * w + x] = blob.id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        blob.pixels.push_back(p);
        for (int k = 0; k < connectivity; ++k) {
          const int nx = p.x + kDx[k];
          const int ny = p.y + kDy[k];
          if (!img.get(nx, ny) || label[ny * w + nx] >= 0) continue;
          label[ny * w + nx] = blob.id;
          stack.push_back({nx, ny});
        }
      }
      std::sort(blob.pixels.begin(), blob.pixels.end(), [](Point a, Point b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      double sx = 0.0;
      double sy = 0.0;
      for (const Point& p : blob.pixels) {
        blob.bbox.expand(p.x, p.y);
        sx += p.x;
        sy += p.y;
      }
      blob.area = blob.pixels.size();
      blob.centroid = {sx / static_cast<double>(blob.area), sy / static_cast<double>(blob.area)};
      blobs.push_back(std::move(blob));
    }
  }
  return blobs;
}

RegressionLine fit_line(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n == 0 || ys.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "fit_line: need equal, non-empty x and y");
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 1e-12) return {0.0, my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {

constexpr double kOrderTolerance = 1e-9;

bool ordered_on_span(const TextLine& line) {
  for (double x : {static_cast<double>(line.x_min), static_cast<double>(line.x_max)}) {
    if (line.top.at(x) > line.middle.at(x) + kOrderTolerance) return false;
    if (line.middle.at(x) > line.bottom.at(x) + kOrderTolerance) return false;
  }
  return true;
}

void fit_regressions(TextLine& line, std::span<const Blob> blobs) {
  std::vector<double> xs;
  std::vector<double> tops;
  std::vector<double> mids;
  std::vector<double> bottoms;
  line.x_min = std::numeric_limits<int>::max();
  line.x_max = std::numeric_limits<int>::min();
  for (int id : line.blob_ids) {
    const Blob& b = blobs[static_cast<std::size_t>(id)];
    xs.push_back(b.centroid.x);
    tops.push_back(b.bbox.y0);
    mids.push_back(b.centroid.y);
    bottoms.push_back(b.bbox.y1);
    line.x_min = std::min(line.x_min, b.bbox.x0);
    line.x_max = std::max(line.x_max, b.bbox.x1);
  }
  line.top = fit_line(xs, tops);
  line.middle = fit_line(xs, mids);
  line.bottom = fit_line(xs, bottoms);
  if (ordered_on_span(line)) return;

  // Independent fits can cross inside the span. With one shared slope the
  // offsets become means of per-blob differences, which are non-negative.
  const double slope = line.middle.slope;
  auto intercept = [&](const std::vector<double>& ys) {
    double s = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) s += ys[i] - slope * xs[i];
    return s / static_cast<double>(ys.size());
  };
  line.top = {slope, intercept(tops)};
  line.middle = {slope, intercept(mids)};
  line.bottom = {slope, intercept(bottoms)};
}

void order_for_reading(std::vector<int>& ids, std::span<const Blob> blobs, ReadingOrder order) {
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double xa = blobs[static_cast<std::size_t>(a)].centroid.x;
    const double xb = blobs[static_cast<std::size_t>(b)].centroid.x;
    if (xa != xb) return order == ReadingOrder::LeftToRight ? xa < xb : xa > xb;
    return a < b;
  });
}

}  // namespace

std::vector<TextLine> detect_lines(std::span<const Blob> blobs, const SegParams& params) {
  if (auto errors = validate(params); !errors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid segmentation parameter: " + errors.begin()->first);
  }
  std::vector<int> core;
  for (const Blob& b : blobs) {
    if (b.area >= static_cast<std::size_t>(params.small_blob_area)) core.push_back(b.id);
  }
  std::vector<TextLine> lines;
  if (core.empty()) return lines;

  std::stable_sort(core.begin(), core.end(), [&](int a, int b) {
    return blobs[static_cast<std::size_t>(a)].centroid.y < blobs[static_cast<std::size_t>(b)].centroid.y;
  });

  TextLine current;
  double last_y = blobs[static_cast<std::size_t>(core.front())].centroid.y;
  for (int id : core) {
    const double y = blobs[static_cast<std::size_t>(id)].centroid.y;
    if (!current.blob_ids.empty() && y - last_y > params.line_gap) {
      lines.push_back(std::move(current));
      current = TextLine{};
    }
    current.blob_ids.push_back(id);
    last_y = y;
  }
  lines.push_back(std::move(current));

  for (TextLine& line : lines) {
    order_for_reading(line.blob_ids, blobs, params.reading_order);
    fit_regressions(line, blobs);
  }
  return lines;
}

PageSegmentation attach_diacritics(std::vector<TextLine> lines, std::vector<Blob> blobs,
                                   const SegParams& params, int width, int height) {
  PageSegmentation page;
  page.width = width;
  page.height = height;
  page.params = params;

  for (const Blob& b : blobs) {
    if (b.area >= static_cast<std::size_t>(params.small_blob_area)) continue;
    const double cx = b.centroid.x;
    const double cy = b.centroid.y;
    std::size_t best = lines.size();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const double line_height = lines[i].bottom.at(cx) - lines[i].top.at(cx);
      const double distance = std::abs(cy - lines[i].middle.at(cx));
      if (distance > 2.0 * line_height) continue;
      // Lines are ordered top to bottom, so `<=` hands ties to the lower one.
      if (distance <= best_distance + 1e-12) {
        best = i;
        best_distance = std::min(best_distance, distance);
      }
    }
    if (best < lines.size()) {
      lines[best].blob_ids.push_back(b.id);
    } else {
      page.noise_ids.push_back(b.id);
    }
  }

  page.lines = std::move(lines);
  page.blobs = std::move(blobs);
  return page;
}

PageSegmentation segment_page(const BinaryImage& img, const SegParams& params) {
  if (auto errors = validate(params); !errors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid segmentation parameter: " + errors.begin()->first);
  }
  auto blobs = extract_blobs(img, params.connectivity);
  auto lines = detect_lines(blobs, params);
  return attach_diacritics(std::move(lines), std::move(blobs), params, img.width(), img.height());
}

namespace {

BBox member_bbox(const TextLine& line, std::span<const Blob> blobs) {
  BBox box;
  for (int id : line.blob_ids) {
    const BBox& b = blobs[static_cast<std::size_t>(id)].bbox;
    box.expand(b.x0, b.y0);
    box.expand(b.x1, b.y1);
  }
  return box;
}

}  // namespace

BinaryImage crop_line(const BinaryImage& img, const TextLine& line, std::span<const Blob> blobs,
                      int margin) {
  if (line.blob_ids.empty()) throw Error(ErrorKind::EmptyInput, "crop_line: line has no blobs");
  if (margin < 0) throw Error(ErrorKind::InvalidArgument, "crop_line: negative margin");
  BBox box = member_bbox(line, blobs);
  box.x0 = std::max(0, box.x0 - margin);
  box.y0 = std::max(0, box.y0 - margin);
  box.x1 = std::min(img.width() - 1, box.x1 + margin);
  box.y1 = std::min(img.height() - 1, box.y1 + margin);

  BinaryImage out(box.width(), box.height());
  for (int id : line.blob_ids) {
    for (const Point& p : blobs[static_cast<std::size_t>(id)].pixels) {
      out.set(p.x - box.x0, p.y - box.y0, true);
    }
  }
  return out;
}

BinaryImage line_band(const TextLine& line, std::span<const Blob> blobs, int height) {
  if (line.blob_ids.empty()) throw Error(ErrorKind::EmptyInput, "line_band: line has no blobs");
  if (height < 1) throw Error(ErrorKind::InvalidArgument, "line_band: height must be >= 1");
  const BBox box = member_bbox(line, blobs);
  BinaryImage members(box.width(), box.height());
  for (int id : line.blob_ids) {
    for (const Point& p : blobs[static_cast<std::size_t>(id)].pixels) {
      members.set(p.x - box.x0, p.y - box.y0, true);
    }
  }

  BinaryImage out(box.width(), height);
  for (int col = 0; col < box.width(); ++col) {
    const double x = box.x0 + col;
    const double top = std::round(line.top.at(x));
    const double bottom = std::round(line.bottom.at(x));
    const double span = std::max(1.0, bottom - top + 1.0);
    for (int row = 0; row < height; ++row) {
      const double y = top + std::floor((row + 0.5) * span / height);
      out.set(col, row, members.get(col, static_cast<int>(y) - box.y0));
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const SegParams& p) {
  j = nlohmann::json{
      {"connectivity", p.connectivity},
      {"small_blob_area", p.small_blob_area},
      {"line_gap", p.line_gap},
      {"reading_order", p.reading_order == ReadingOrder::LeftToRight ? "ltr" : "rtl"},
  };
}

SegParams parse_params(const nlohmann::json& j, std::map<std::string, std::string>& errors) {
  SegParams p;
  if (!j.is_object()) {
    errors["params"] = "must be a JSON object";
    return p;
  }
  auto read_int = [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
      errors[key] = "must be an integer";
      return;
    }
    const auto value = v.get<long long>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      errors[key] = "out of range";
      return;
    }
    field = static_cast<int>(value);
  };
  read_int("connectivity", p.connectivity);
  read_int("small_blob_area", p.small_blob_area);
  read_int("line_gap", p.line_gap);
  if (j.contains("reading_order")) {
    const auto& v = j.at("reading_order");
    if (v == "ltr") {
      p.reading_order = ReadingOrder::LeftToRight;
    } else if (v == "rtl") {
      p.reading_order = ReadingOrder::RightToLeft;
    } else {
      errors["reading_order"] = "must be \"ltr\" or \"rtl\"";
    }
  }
  for (const auto& [field, message] : validate(p)) errors.emplace(field, message);
  for (const auto& item : j.items()) {
    if (item.key() != "connectivity" && item.key() != "small_blob_area" &&
        item.key() != "line_gap" && item.key() != "reading_order") {
      errors[item.key()] = "unknown parameter";
    }
  }
  return p;
}

void from_json(const nlohmann::json& j, SegParams& p) {
  std::map<std::string, std::string> errors;
  p = parse_params(j, errors);
  if (!errors.empty()) {
    std::string what = "invalid segmentation parameters:";
    for (const auto& [field, message] : errors) what += " " + field + " " + message + ";";
    throw Error(ErrorKind::InvalidArgument, what);
  }
}

namespace {

nlohmann::json line_json(const RegressionLine& l) {
  return {{"slope", l.slope}, {"intercept", l.intercept}};
}

}  // namespace

nlohmann::json to_json(const PageSegmentation& page) {
  nlohmann::json blobs = nlohmann::json::array();
  for (const Blob& b : page.blobs) {
    blobs.push_back({{"id", b.id},
                     {"bbox", {b.bbox.x0, b.bbox.y0, b.bbox.x1, b.bbox.y1}},
                     {"area", b.area},
                     {"centroid", {b.centroid.x, b.centroid.y}}});
  }
  nlohmann::json lines = nlohmann::json::array();
  for (const TextLine& l : page.lines) {
    lines.push_back({{"blob_ids", l.blob_ids},
                     {"top", line_json(l.top)},
                     {"middle", line_json(l.middle)},
                     {"bottom", line_json(l.bottom)},
                     {"x_span", {l.x_min, l.x_max}}});
  }
  nlohmann::json params;
  to_json(params, page.params);
  return {{"width", page.width},   {"height", page.height}, {"params", params},
          {"blobs", blobs},        {"lines", lines},        {"noise_ids", page.noise_ids}};
}

}  // namespace scriptorium
