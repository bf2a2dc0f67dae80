#include <array>
#include <string_view>

#include "scriptorium/corpus.hpp"

namespace scriptorium {

namespace {

struct GlyphArt {
  int id;
  GlyphGroup group;
  std::array<std::string_view, 12> rows;
};

// '#' is ink. Row 0 always has ink and row 11 is solid so words join on a
// shared baseline.
constexpr std::array<GlyphArt, 10> kArt{{
    {1, GlyphGroup::Letter,
     {"..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..",
      "..#..", "#####"}},
    {2, GlyphGroup::Letter,
     {".#####.", ".#...#.", ".#...#.", ".#...#.", ".#...#.", ".#...#.", ".#####.", "...#...",
      "...#...", "...#...", "...#...", "#######"}},
    {3, GlyphGroup::Letter,
     {"#######", "...#...", "...#...", "...#...", "...#...", "...#...", "...#...", "...#...",
      "...#...", "...#...", "...#...", "#######"}},
    {4, GlyphGroup::Letter,
     {"#.....#", "#.....#", ".#...#.", ".#...#.", "..#.#..", "..#.#..", "...#...", "...#...",
      "...#...", "...#...", "...#...", "#######"}},
    {5, GlyphGroup::Letter,
     {"#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#",
      "#....#", "#....#", "######"}},
    {6, GlyphGroup::Letter,
     {"#######", ".....#.", "....#..", "...#...", "..#....", ".#.....", "#......", "#......",
      "#......", "#......", "#......", "#######"}},
    {7, GlyphGroup::Letter,
     {"#.....#", ".#...#.", "..#.#..", "...#...", "..#.#..", ".#...#.", "#.....#", "#.....#",
      "#.....#", "#.....#", "#.....#", "#######"}},
    {8, GlyphGroup::Digit,
     {"######", ".....#", ".....#", ".....#", ".....#", "######", "#.....", "#.....", "#.....",
      "#.....", "#.....", "######"}},
    {9, GlyphGroup::Digit,
     {"#...#.", "#...#.", "#...#.", "#...#.", "######", "....#.", "....#.", "....#.", "....#.",
      "....#.", "....#.", "######"}},
    {10, GlyphGroup::Letter,
     {"########", "#..#...#", "#..#...#", "#..#...#", "#......#", "#......#", "#......#",
      "#......#", "#......#", "#......#", "#......#", "########"}},
}};

}  // namespace

GlyphSet builtin_glyph_set(int join_overlap) {
  GlyphSet gs;
  for (const auto& art : kArt) {
    const int w = static_cast<int>(art.rows[0].size());
    BinaryImage img(w, static_cast<int>(art.rows.size()));
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < w; ++x) img.set(x, y, art.rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#');
    }
    gs.glyphs[art.id] = std::move(img);
    gs.groups[art.id] = art.group;
  }
  gs.join_overlap = join_overlap;
  gs.space_id = 11;
  gs.space_width = 0;
  gs.validate();
  return gs;
}

}  // namespace scriptorium
