#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scriptorium/corpus.hpp"
#include "scriptorium/raster.hpp"
#include "scriptorium/segmentation.hpp"

namespace scriptorium::cli {

enum ExitCode : int { kOk = 0, kBadArgs = 2, kIoFailure = 3, kPipelineFailure = 4 };

/// Bad command-line or config input; maps to exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Page images: Otsu binarization with auto-polarity.
BinaryImage load_page(const std::filesystem::path& path);

/// Synthesized line images: dark ink (< 128) on light paper.
BinaryImage load_line_image(const std::filesystem::path& path);
GrayImage line_to_gray(const BinaryImage& img);

std::vector<std::string> read_lines(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// The one JSON layout used for every output file and API response.
std::string dump(const nlohmann::json& j);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void ensure_directory(const std::filesystem::path& dir);

/// "builtin" or an atlas directory.
GlyphSet load_glyphs(const std::string& source);

/// SegParams from a JSON file; field errors become a UsageError.
SegParams load_params(const std::filesystem::path& path);
SegParams checked_params(const nlohmann::json& doc);

}  // namespace scriptorium::cli
