#include <string>

#include "scriptorium/error.hpp"
#include "scriptorium/outlines.hpp"

namespace scriptorium {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'C', 'C', '1'};

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw fail("varint too long");
  }

  int small(const char* what) {
    const std::uint64_t v = varint();
    if (v > 0x7fffffffu) throw fail(what);
    return static_cast<int>(v);
  }

  std::uint8_t byte() {
    if (pos_ >= bytes_.size()) throw fail("truncated");
    return bytes_[pos_++];
  }

  bool done() const { return pos_ == bytes_.size(); }

  static Error fail(const std::string& why) {
    return Error(ErrorKind::UnsupportedFormat, "chain code: " + why);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_chain_code(int width, int height,
                                            std::span<const BlobOutline> outlines) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_varint(out, static_cast<std::uint64_t>(width));
  put_varint(out, static_cast<std::uint64_t>(height));
  put_varint(out, outlines.size());
  for (const BlobOutline& outline : outlines) {
    put_varint(out, static_cast<std::uint64_t>(outline.blob_id));
    put_varint(out, outline.cycles.size());
    for (const OutlineCycle& cycle : outline.cycles) {
      const auto dirs = chain_directions(cycle);
      put_varint(out, static_cast<std::uint64_t>(cycle.vertices.front().x));
      put_varint(out, static_cast<std::uint64_t>(cycle.vertices.front().y));
      put_varint(out, dirs.size());
      std::uint8_t packed = 0;
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        packed |= static_cast<std::uint8_t>(static_cast<std::uint8_t>(dirs[i]) << (2 * (i % 4)));
        if (i % 4 == 3) {
          out.push_back(packed);
          packed = 0;
        }
      }
      if (dirs.size() % 4 != 0) out.push_back(packed);
    }
  }
  return out;
}

ChainCodeFile decode_chain_code(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  for (std::uint8_t m : kMagic) {
    if (in.byte() != m) throw Reader::fail("bad magic");
  }
  ChainCodeFile file;
  file.width = in.small("width");
  file.height = in.small("height");
  const std::uint64_t count = in.varint();
  if (count > bytes.size()) throw Reader::fail("outline count exceeds payload");
  for (std::uint64_t o = 0; o < count; ++o) {
    BlobOutline outline;
    outline.blob_id = in.small("blob id");
    const std::uint64_t cycles = in.varint();
    if (cycles > bytes.size()) throw Reader::fail("cycle count exceeds payload");
    for (std::uint64_t c = 0; c < cycles; ++c) {
      Point p{in.small("x"), in.small("y")};
      const std::uint64_t n = in.varint();
      if (n == 0 || n / 4 > bytes.size()) throw Reader::fail("bad edge count");
      std::vector<Point> vertices;
      vertices.reserve(n);
      std::uint8_t packed = 0;
      for (std::uint64_t i = 0; i < n; ++i) {
        if (i % 4 == 0) packed = in.byte();
        if (p.x < 0 || p.y < 0 || p.x > file.width || p.y > file.height) {
          throw Reader::fail("vertex outside the page");
        }
        vertices.push_back(p);
        p = step(p, static_cast<Direction>((packed >> (2 * (i % 4))) & 3));
      }
      if (p != vertices.front()) throw Reader::fail("cycle does not close");
      OutlineCycle cycle;
      cycle.signed_area = shoelace_area(vertices);
      cycle.orientation = cycle.signed_area > 0 ? 1 : -1;
      cycle.vertices = std::move(vertices);
      outline.cycles.push_back(std::move(cycle));
    }
    file.outlines.push_back(std::move(outline));
  }
  if (!in.done()) throw Reader::fail("trailing bytes");
  return file;
}

CompressionReport compression_ratio(int width, int height, std::span<const BlobOutline> outlines) {
  if (outlines.empty()) throw Error(ErrorKind::EmptyInput, "compression_ratio: page has no outlines");
  CompressionReport report;
  report.bitmap_bytes = (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 7) / 8;
  report.chain_code_bytes = encode_chain_code(width, height, outlines).size();
  report.ratio = static_cast<double>(report.bitmap_bytes) / static_cast<double>(report.chain_code_bytes);
  return report;
}

}  // namespace scriptorium
