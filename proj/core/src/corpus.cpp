#include "scriptorium/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "scriptorium/error.hpp"
#include "scriptorium/image_io.hpp"

namespace scriptorium {

std::string to_string(GlyphGroup group) {
  switch (group) {
    case GlyphGroup::Letter: return "letter";
    case GlyphGroup::Digit: return "digit";
    case GlyphGroup::Diacritic: return "diacritic";
  }
  return "letter";
}

GlyphGroup parse_glyph_group(const std::string& name) {
  if (name == "letter") return GlyphGroup::Letter;
  if (name == "digit") return GlyphGroup::Digit;
  if (name == "diacritic") return GlyphGroup::Diacritic;
  throw Error(ErrorKind::InvalidArgument, "unknown glyph group '" + name + "'");
}

void GlyphSet::validate() const {
  if (glyphs.empty()) throw Error(ErrorKind::EmptyInput, "glyph set has no glyphs");
  const int h = glyphs.begin()->second.height();
  int narrowest = glyphs.begin()->second.width();
  for (const auto& [id, img] : glyphs) {
    if (id < 1) throw Error(ErrorKind::InvalidArgument, "glyph ids start at 1 (0 is the CTC blank)");
    if (img.empty()) throw Error(ErrorKind::InvalidArgument, "glyph " + std::to_string(id) + " is empty");
    if (img.height() != h) {
      throw Error(ErrorKind::InvalidArgument,
                  "glyph " + std::to_string(id) + " has height " + std::to_string(img.height()) +
                      ", expected " + std::to_string(h));
    }
    narrowest = std::min(narrowest, img.width());
  }
  for (const auto& [id, group] : groups) {
    if (!glyphs.contains(id)) {
      throw Error(ErrorKind::InvalidArgument, "group given for unknown glyph " + std::to_string(id));
    }
  }
  if (join_overlap < 0 || join_overlap >= narrowest) {
    throw Error(ErrorKind::InvalidArgument,
                "join_overlap must lie in [0, " + std::to_string(narrowest) + ")");
  }
  if (space_id < 1 || glyphs.contains(space_id)) {
    throw Error(ErrorKind::InvalidArgument, "space id must be >= 1 and not a glyph id");
  }
  if (space_width < 0) throw Error(ErrorKind::InvalidArgument, "negative space width");
}

int GlyphSet::height() const { return glyphs.empty() ? 0 : glyphs.begin()->second.height(); }

int GlyphSet::effective_space_width() const {
  return space_width > 0 ? space_width : std::max(1, height() / 3);
}

bool GlyphSet::is_diacritic(int id) const {
  const auto it = groups.find(id);
  return it != groups.end() && it->second == GlyphGroup::Diacritic;
}

std::vector<int> GlyphSet::symbols() const {
  std::vector<int> out;
  for (const auto& [id, img] : glyphs) out.push_back(id);
  out.push_back(space_id);
  std::sort(out.begin(), out.end());
  return out;
}

int GlyphSet::class_count() const {
  const auto all = symbols();
  return all.back() + 1;
}

GlyphSet load_atlas(const std::filesystem::path& dir) {
  const auto meta_path = dir / "atlas.json";
  std::ifstream in(meta_path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + meta_path.string());
  GlyphSet gs;
  try {
    const auto meta = nlohmann::json::parse(in);
    gs.join_overlap = meta.value("join_overlap", 0);
    gs.space_id = meta.at("space_id").get<int>();
    gs.space_width = meta.value("space_width", 0);
    for (const auto& [key, value] : meta.at("groups").items()) {
      const int id = std::stoi(key);
      gs.groups[id] = parse_glyph_group(value.get<std::string>());
      const GrayImage gray = load_image(dir / (key + ".pgm"));
      BinaryImage glyph(gray.width(), gray.height());
      for (int y = 0; y < gray.height(); ++y) {
        for (int x = 0; x < gray.width(); ++x) glyph.set(x, y, gray.at(x, y) < 128);
      }
      gs.glyphs[id] = std::move(glyph);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnsupportedFormat, meta_path.string() + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorKind::UnsupportedFormat, meta_path.string() + ": bad glyph id");
  }
  gs.validate();
  return gs;
}

void save_atlas(const std::filesystem::path& dir, const GlyphSet& gs) {
  gs.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [id, img] : gs.glyphs) {
    const auto it = gs.groups.find(id);
    groups[std::to_string(id)] = to_string(it == gs.groups.end() ? GlyphGroup::Letter : it->second);
    GrayImage gray(img.width(), img.height(), 255);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (img.at(x, y)) gray.set(x, y, 0);
      }
    }
    save_pgm(dir / (std::to_string(id) + ".pgm"), gray);
  }
  const nlohmann::json meta = {{"join_overlap", gs.join_overlap},
                               {"space_id", gs.space_id},
                               {"space_width", gs.space_width},
                               {"groups", groups}};
  std::ofstream out(dir / "atlas.json");
  out << meta.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / "atlas.json").string());
}

NgramPlan build_plan(const GlyphSet& gs, std::span<const LabelSequence> extras) {
  std::vector<int> all;
  std::vector<int> base;
  for (const auto& [id, img] : gs.glyphs) {
    all.push_back(id);
    if (!gs.is_diacritic(id)) base.push_back(id);
  }

  NgramPlan plan;
  std::set<LabelSequence> seen;
  auto add = [&](LabelSequence s) {
    if (seen.insert(s).second) plan.strings.push_back(std::move(s));
  };
  for (int a : base) add({a});
  for (int a : all) {
    for (int b : all) {
      if (gs.is_diacritic(a) && gs.is_diacritic(b)) continue;
      add({a, b});
    }
  }
  for (int a : base) {
    for (int b : base) add({a, gs.space_id, b});
  }
  for (const auto& extra : extras) {
    if (extra.empty()) throw Error(ErrorKind::InvalidArgument, "empty extra n-gram");
    for (int id : extra) {
      if (!gs.has_symbol(id)) {
        throw Error(ErrorKind::InvalidArgument, "extra n-gram uses unknown symbol " + std::to_string(id));
      }
    }
    add(extra);
  }
  return plan;
}

std::vector<LabelSequence> random_lines(const GlyphSet& gs, int count, int min_length,
                                        int max_length, std::uint64_t seed) {
  if (count < 0 || min_length < 1 || max_length < min_length) {
    throw Error(ErrorKind::InvalidArgument, "random_lines: need 1 <= min_length <= max_length");
  }
  std::vector<int> base;
  std::vector<int> marks;
  for (const auto& [id, img] : gs.glyphs) (gs.is_diacritic(id) ? marks : base).push_back(id);
  if (base.empty()) throw Error(ErrorKind::EmptyInput, "random_lines: no non-diacritic glyphs");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length_dist(min_length, max_length);
  std::uniform_int_distribution<int> word_dist(1, 8);
  std::uniform_int_distribution<std::size_t> base_dist(0, base.size() - 1);
  std::uniform_int_distribution<std::size_t> mark_dist(0, marks.empty() ? 0 : marks.size() - 1);
  std::bernoulli_distribution use_mark(marks.empty() ? 0.0 : 0.15);

  std::vector<LabelSequence> lines;
  lines.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const int length = length_dist(rng);
    LabelSequence line;
    int word_left = word_dist(rng);
    for (int i = 0; i < length; ++i) {
      const bool last = i == length - 1;
      if (word_left == 0 && !last) {
        line.push_back(gs.space_id);
        word_left = word_dist(rng);
        continue;
      }
      const bool after_base = !line.empty() && line.back() != gs.space_id && !gs.is_diacritic(line.back());
      if (after_base && use_mark(rng)) {
        line.push_back(marks[mark_dist(rng)]);
      } else {
        line.push_back(base[base_dist(rng)]);
      }
      if (word_left > 0) --word_left;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

namespace {

void check_text(const GlyphSet& gs, std::span<const int> text) {
  if (text.empty()) throw Error(ErrorKind::EmptyInput, "synthesize_line: empty text");
  for (int id : text) {
    if (!gs.has_symbol(id)) throw Error(ErrorKind::InvalidArgument, "unknown symbol " + std::to_string(id));
  }
}

}  // namespace

SynthLine synthesize_line(const GlyphSet& gs, std::span<const int> text, std::uint64_t seed,
                          double salt) {
  check_text(gs, text);
  if (salt < 0.0 || salt > 1.0) throw Error(ErrorKind::InvalidArgument, "salt probability outside [0,1]");
  const int h = gs.height();
  const int space = gs.effective_space_width();
  auto width_of = [&](int id) { return id == gs.space_id ? space : gs.glyphs.at(id).width(); };

  int total = 0;
  for (int id : text) total += width_of(id);
  total -= static_cast<int>(text.size() - 1) * gs.join_overlap;
  if (total < 1) throw Error(ErrorKind::Degenerate, "synthesized line has no width");

  BinaryImage img(total, h);
  int x0 = 0;
  for (int id : text) {
    if (id != gs.space_id) {
      const BinaryImage& g = gs.glyphs.at(id);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < g.width(); ++x) {
          if (g.at(x, y)) img.set(x0 + x, y, true);
        }
      }
    }
    x0 += width_of(id) - gs.join_overlap;
  }

  if (salt > 0.0) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(salt);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < total; ++x) {
        if (flip(rng) && !img.at(x, y)) img.set(x, y, true);
      }
    }
  }
  return {std::move(img), LabelSequence(text.begin(), text.end())};
}

std::vector<SynthLine> synthesize_corpus(const GlyphSet& gs, std::span<const LabelSequence> texts,
                                         std::uint64_t seed, double salt, unsigned threads) {
  for (const auto& t : texts) check_text(gs, t);
  std::vector<SynthLine> out(texts.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(texts.size(), 1)));
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < texts.size(); i += threads) {
      out[i] = synthesize_line(gs, texts[i], seed ^ static_cast<std::uint64_t>(i), salt);
    }
  };
  if (threads <= 1) {
    work(0);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  return out;
}

}  // namespace scriptorium
