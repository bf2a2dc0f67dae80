#include "scriptorium/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "scriptorium/error.hpp"

namespace scriptorium {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  return bytes;
}

std::uint8_t rescale(unsigned v, unsigned maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255u + maxval / 2u) / maxval);
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 2;
  auto bad = [&](const char* why) {
    return Error(ErrorKind::UnsupportedFormat, name + ": malformed PGM (" + why + ")");
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> unsigned {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw bad("header");
    unsigned long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1u << 24) throw bad("header value too large");
    }
    return static_cast<unsigned>(v);
  };

  const unsigned width = read_uint();
  const unsigned height = read_uint();
  const unsigned maxval = read_uint();
  if (width == 0 || height == 0) throw bad("zero dimension");
  if (maxval == 0 || maxval > 65535) throw bad("maxval");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw bad("header terminator");
  ++pos;

  const std::size_t n = static_cast<std::size_t>(width) * height;
  const std::size_t sample = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < n * sample) throw bad("truncated raster");

  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = bytes[pos + i * sample];
    if (sample == 2) v = (v << 8) | bytes[pos + i * sample + 1];
    if (v > maxval) throw bad("sample exceeds maxval");
    out[i] = rescale(v, maxval);
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(out));
}

struct PngReadSource {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->pos + len > src->bytes->size()) png_error(png, "truncated PNG");
  std::memcpy(out, src->bytes->data() + src->pos, len);
  src->pos += len;
}

struct PngDecoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> raw;
  std::string error;
};

// Only trivially destructible locals live across the setjmp boundary.
bool png_decode_raw(const std::vector<std::uint8_t>& bytes, PngDecoded& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  PngReadSource src{&bytes, 0};

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    out.error = "libpng decode failure";
    return false;
  }

  png_set_read_fn(png, &src, png_read_from_memory);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  const int passes = png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const png_size_t stride = png_get_rowbytes(png, info);
  out.raw.resize(stride * out.height);

  for (int pass = 0; pass < passes; ++pass) {
    for (png_uint_32 y = 0; y < out.height; ++y) {
      png_read_row(png, out.raw.data() + y * stride, nullptr);
    }
  }
  png_read_end(png, nullptr);

  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  PngDecoded d;
  if (!png_decode_raw(bytes, d)) {
    throw Error(ErrorKind::UnsupportedFormat, name + ": " + (d.error.empty() ? "bad PNG" : d.error));
  }
  if (d.channels != 1 && d.channels != 3) {
    throw Error(ErrorKind::UnsupportedFormat, name + ": unexpected PNG channel layout");
  }
  if (d.bit_depth != 8 && d.bit_depth != 16) {
    throw Error(ErrorKind::UnsupportedFormat, name + ": unsupported PNG bit depth");
  }

  const std::size_t bytes_per_sample = d.bit_depth / 8;
  const std::size_t stride = static_cast<std::size_t>(d.width) * d.channels * bytes_per_sample;
  auto sample = [&](std::size_t row, std::size_t idx) -> std::uint8_t {
    const std::uint8_t* p = d.raw.data() + row * stride + idx * bytes_per_sample;
    if (bytes_per_sample == 1) return p[0];
    return rescale((static_cast<unsigned>(p[0]) << 8) | p[1], 65535);
  };

  std::vector<std::uint8_t> gray(static_cast<std::size_t>(d.width) * d.height);
  for (std::size_t y = 0; y < d.height; ++y) {
    for (std::size_t x = 0; x < d.width; ++x) {
      std::uint8_t v;
      if (d.channels == 1) {
        v = sample(y, x);
      } else {
        v = luma_bt601(sample(y, 3 * x), sample(y, 3 * x + 1), sample(y, 3 * x + 2));
      }
      gray[y * d.width + x] = v;
    }
  }
  return GrayImage(static_cast<int>(d.width), static_cast<int>(d.height), std::move(gray));
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

bool png_encode_raw(const std::uint8_t* pixels, int width, int height, int channels,
                    std::vector<std::uint8_t>& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::Io, "not a readable file: " + path.string());
  }
  const auto bytes = read_file(path);
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return decode_png(bytes, path.string());
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    return decode_pgm(bytes, path.string());
  }
  throw Error(ErrorKind::UnsupportedFormat, path.string() + ": not a PNG or binary PGM file");
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  std::vector<std::uint8_t> out;
  if (!png_encode_raw(img.intensities().data(), img.width(), img.height(), 1, out)) {
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  std::vector<std::uint8_t> flat;
  flat.reserve(img.pixels().size() * 3);
  for (const Rgb& c : img.pixels()) {
    flat.push_back(c.r);
    flat.push_back(c.g);
    flat.push_back(c.b);
  }
  std::vector<std::uint8_t> out;
  if (!png_encode_raw(flat.data(), img.width(), img.height(), 3, out)) {
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  return out;
}

void save_png(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, encode_png(img));
}

void save_png(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_png(img));
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.intensities().begin(), img.intensities().end());
  write_file(path, bytes);
}

}  // namespace scriptorium
