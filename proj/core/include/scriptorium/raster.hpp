#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace scriptorium {

/// 8-bit luminance image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> intensities);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) { data_[index(x, y)] = v; }

  std::span<const std::uint8_t> intensities() const { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Two-level image. `true` is ink (foreground) regardless of how the source
/// page was printed; the rest of the library never sees the other polarity.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool at(int x, int y) const { return data_[index(x, y)] != 0; }
  /// Out-of-range coordinates read as background.
  bool get(int x, int y) const { return contains(x, y) && at(x, y); }
  void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const;
  std::span<const std::uint8_t> data() const { return data_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < width_ && y < height_) data_[index(x, y)] = c;
  }
  std::span<const Rgb> pixels() const { return data_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> data_;
};

struct BinarizeReport {
  int threshold = 0;
  double foreground_fraction = 0.0;
  bool inverted = false;
};

/// ITU-R BT.601 luma with round-half-up: (299 R + 587 G + 114 B + 500) / 1000.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Otsu threshold followed by auto-polarity. Pixels strictly above the
/// threshold start as ink; if they cover more than half the page the result
/// is inverted so ink is always the minority class.
std::pair<BinaryImage, BinarizeReport> binarize_otsu(const GrayImage& img);

/// Threshold maximizing between-class variance; smallest maximizer wins.
/// Returns the constant value for single-valued images.
int otsu_threshold(const GrayImage& img);

BinaryImage negate(const BinaryImage& img);

/// Ink rendered as 255 on a 0 background.
GrayImage to_gray(const BinaryImage& img);

}  // namespace scriptorium
