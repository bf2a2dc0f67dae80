#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scriptorium/raster.hpp"
#include "scriptorium/segmentation.hpp"

namespace scriptorium {

/// T windows of H x W binary pixels, stored frame-major then row-major.
class FrameSequence {
 public:
  FrameSequence() = default;
  FrameSequence(int height, int window, int count);

  int height() const { return height_; }
  int window() const { return window_; }
  int count() const { return count_; }
  std::size_t frame_size() const { return static_cast<std::size_t>(height_) * window_; }

  std::span<const std::uint8_t> frame(int t) const {
    return {data_.data() + static_cast<std::size_t>(t) * frame_size(), frame_size()};
  }
  std::span<std::uint8_t> frame(int t) {
    return {data_.data() + static_cast<std::size_t>(t) * frame_size(), frame_size()};
  }
  bool at(int t, int row, int col) const {
    return frame(t)[static_cast<std::size_t>(row) * window_ + col] != 0;
  }

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  int height_ = 0;
  int window_ = 0;
  int count_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Slides a `window`-column slit over the line one column at a time. The line
/// is zero-padded by (window-1)/2 columns on each side, so there is exactly
/// one frame per original column. Right-to-left lines are scanned from their
/// right edge.
FrameSequence make_frames(const BinaryImage& line, int window,
                          ReadingOrder order = ReadingOrder::LeftToRight);

}  // namespace scriptorium
