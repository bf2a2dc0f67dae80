#include "scriptorium/raster.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "scriptorium/error.hpp"

namespace scriptorium {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::NotThin: return "not-thin";
    case ErrorKind::InfeasibleLabel: return "infeasible-label";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
  }
  return "unknown";
}

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> intensities)
    : width_(width), height_(height), data_(std::move(intensities)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::DimensionMismatch, "intensity buffer does not match width x height");
  }
}

BinaryImage::BinaryImage(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const unsigned weighted = 299u * r + 587u * g + 114u * b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

int otsu_threshold(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorKind::EmptyInput, "otsu: empty image");

  std::array<double, 256> hist{};
  for (auto v : img.intensities()) hist[v] += 1.0;

  const double total = static_cast<double>(img.intensities().size());
  double total_sum = 0.0;
  for (int v = 0; v < 256; ++v) total_sum += v * hist[v];

  // sigma_b^2 * N^2 = n0 * n1 * (mu0 - mu1)^2
  std::array<double, 256> score{};
  score.fill(-1.0);
  double n0 = 0.0;
  double s0 = 0.0;
  double best = -1.0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += t * hist[t];
    const double n1 = total - n0;
    if (n0 == 0.0 || n1 == 0.0) continue;
    const double diff = s0 / n0 - (total_sum - s0) / n1;
    score[t] = n0 * n1 * diff * diff;
    best = std::max(best, score[t]);
  }

  if (best <= 0.0) return img.intensities().front();  // constant image

  // Floating-point evaluation order can split exact ties by an ulp or two;
  // treat anything within a relative 1e-10 of the maximum as tied.
  const double floor = best * (1.0 - 1e-10);
  for (int t = 0; t < 256; ++t) {
    if (score[t] >= floor) return t;
  }
  return 0;
}

std::pair<BinaryImage, BinarizeReport> binarize_otsu(const GrayImage& img) {
  const int threshold = otsu_threshold(img);
  BinaryImage out(img.width(), img.height());
  std::size_t ink = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool on = img.at(x, y) > threshold;
      out.set(x, y, on);
      ink += on ? 1 : 0;
    }
  }

  const double n = static_cast<double>(img.width()) * img.height();
  BinarizeReport report{threshold, static_cast<double>(ink) / n, false};
  if (report.foreground_fraction > 0.5) {
    out = negate(out);
    report.inverted = true;
    report.foreground_fraction = static_cast<double>(out.count()) / n;
  }
  return {std::move(out), report};
}

BinaryImage negate(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, !img.at(x, y));
  }
  return out;
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img.at(x, y) ? 255 : 0);
  }
  return out;
}

}  // namespace scriptorium
