#pragma once

#include "scriptorium/raster.hpp"
#include "scriptorium/segmentation.hpp"

namespace scriptorium {

inline constexpr Rgb kTopLineColor{0, 0, 255};
inline constexpr Rgb kBottomLineColor{0, 160, 0};
inline constexpr Rgb kMiddleLineColor{255, 0, 0};

/// Page drawn as dark ink on white with blob boxes (noise blobs dimmed) and
/// the three regression lines of every text line.
RgbImage render_overlay(const BinaryImage& img, const PageSegmentation& page);

}  // namespace scriptorium
