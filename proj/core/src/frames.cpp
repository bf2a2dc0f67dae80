#include "scriptorium/frames.hpp"

#include "scriptorium/error.hpp"

namespace scriptorium {

FrameSequence::FrameSequence(int height, int window, int count)
    : height_(height),
      window_(window),
      count_(count),
      data_(static_cast<std::size_t>(height) * window * count, 0) {}

FrameSequence make_frames(const BinaryImage& line, int window, ReadingOrder order) {
  if (line.empty()) throw Error(ErrorKind::EmptyInput, "make_frames: empty line image");
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "make_frames: window must be odd and >= 1");
  }
  const int pad = (window - 1) / 2;
  const int width = line.width();
  FrameSequence frames(line.height(), window, width);
  for (int t = 0; t < width; ++t) {
    auto out = frames.frame(t);
    for (int col = 0; col < window; ++col) {
      // Column in scan order; RTL scans the mirrored line.
      const int scan = t - pad + col;
      if (scan < 0 || scan >= width) continue;
      const int x = order == ReadingOrder::LeftToRight ? scan : width - 1 - scan;
      for (int row = 0; row < line.height(); ++row) {
        out[static_cast<std::size_t>(row) * window + col] = line.at(x, row) ? 1 : 0;
      }
    }
  }
  return frames;
}

}  // namespace scriptorium
