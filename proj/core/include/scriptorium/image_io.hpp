#pragma once

#include <filesystem>

#include "scriptorium/raster.hpp"

namespace scriptorium {

/// Loads PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) or binary PGM
/// (P5) as luminance. Color is converted with BT.601; 16-bit samples are
/// rescaled to [0,255]. Throws Error{Io} if the file cannot be read and
/// Error{UnsupportedFormat} for anything else.
GrayImage load_image(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const GrayImage& img);
void save_png(const std::filesystem::path& path, const RgbImage& img);
void save_pgm(const std::filesystem::path& path, const GrayImage& img);

std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

}  // namespace scriptorium
