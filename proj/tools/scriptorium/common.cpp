#include "scriptorium/common.hpp"

#include <fstream>
#include <sstream>

#include "scriptorium/error.hpp"
#include "scriptorium/image_io.hpp"

namespace scriptorium::cli {

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

BinaryImage load_page(const std::filesystem::path& path) {
  return binarize_otsu(load_image(path)).first;
}

BinaryImage load_line_image(const std::filesystem::path& path) {
  const GrayImage gray = load_image(path);
  BinaryImage img(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) img.set(x, y, gray.at(x, y) < 128);
  }
  return img;
}

GrayImage line_to_gray(const BinaryImage& img) {
  GrayImage gray(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y)) gray.set(x, y, 0);
    }
  }
  return gray;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

GlyphSet load_glyphs(const std::string& source) {
  if (source == "builtin") return builtin_glyph_set();
  return load_atlas(source);
}

SegParams checked_params(const nlohmann::json& doc) {
  std::map<std::string, std::string> errors;
  const SegParams p = parse_params(doc, errors);
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid segmentation parameters:";
    for (const auto& [field, why] : errors) msg << "\n  " << field << ": " << why;
    throw UsageError(msg.str());
  }
  return p;
}

SegParams load_params(const std::filesystem::path& path) {
  return checked_params(read_json(path));
}

}  // namespace scriptorium::cli
