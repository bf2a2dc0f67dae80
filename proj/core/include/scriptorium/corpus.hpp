#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scriptorium/ctc.hpp"
#include "scriptorium/raster.hpp"

namespace scriptorium {

enum class GlyphGroup { Letter, Digit, Diacritic };

std::string to_string(GlyphGroup group);
GlyphGroup parse_glyph_group(const std::string& name);

/// Symbol bitmaps used in place of font rendering. The space symbol has no
/// bitmap; it is drawn as an empty gap `space_width` columns wide
/// (0 means height / 3).
struct GlyphSet {
  std::map<int, BinaryImage> glyphs;
  std::map<int, GlyphGroup> groups;
  int join_overlap = 0;
  int space_id = 0;
  int space_width = 0;

  /// Throws Error{InvalidArgument} when heights differ, join_overlap is not
  /// below the narrowest glyph, ids are < 1, or the space id collides with a
  /// glyph.
  void validate() const;

  int height() const;
  int effective_space_width() const;
  bool has_symbol(int id) const { return id == space_id || glyphs.contains(id); }
  bool is_diacritic(int id) const;
  /// Glyph ids plus the space id: the label alphabet without blank.
  std::vector<int> symbols() const;
  /// Largest symbol id + 1, i.e. the class count a model needs.
  int class_count() const;
};

/// Ten hand-drawn 12-row glyphs (ids 1..10, two of them digits) with the
/// space at id 11. Every glyph has ink in its top row and a full bottom row,
/// so composed words share one baseline the way cursive script does.
GlyphSet builtin_glyph_set(int join_overlap = 1);

/// Directory of `<id>.pgm` bitmaps (dark ink on light paper) plus
/// atlas.json holding groups, join_overlap, space_id and space_width.
GlyphSet load_atlas(const std::filesystem::path& dir);
void save_atlas(const std::filesystem::path& dir, const GlyphSet& glyphs);

struct NgramPlan {
  std::vector<LabelSequence> strings;
};

/// Unigrams (no diacritics), bigrams (no diacritic pairs), x-space-y trigrams
/// over non-diacritics, then `extras`, with duplicates dropped keeping the
/// first occurrence. Throws Error{InvalidArgument} for an unknown id in
/// `extras`.
NgramPlan build_plan(const GlyphSet& glyphs, std::span<const LabelSequence> extras = {});

/// `count` random lines with lengths uniform in [min_length, max_length].
/// Spaces appear between words of 1..8 glyphs, never at either end.
std::vector<LabelSequence> random_lines(const GlyphSet& glyphs, int count, int min_length,
                                        int max_length, std::uint64_t seed);

struct SynthLine {
  BinaryImage image;
  LabelSequence labels;
};

/// Concatenates glyph bitmaps left to right, overlapping neighbours by
/// join_overlap columns (OR in the overlap). With `salt` > 0, each
/// background pixel turns to ink with that probability, drawn from `seed`.
/// Throws Error{InvalidArgument} for unknown ids and Error{EmptyInput} for
/// an empty text.
SynthLine synthesize_line(const GlyphSet& glyphs, std::span<const int> text, std::uint64_t seed,
                          double salt = 0.0);

/// synthesize_line over many texts on `threads` workers; line i uses seed
/// `seed ^ i`, so the result does not depend on the thread count.
std::vector<SynthLine> synthesize_corpus(const GlyphSet& glyphs,
                                         std::span<const LabelSequence> texts, std::uint64_t seed,
                                         double salt = 0.0, unsigned threads = 0);

}  // namespace scriptorium
