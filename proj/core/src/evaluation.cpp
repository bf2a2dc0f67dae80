#include "scriptorium/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "scriptorium/error.hpp"

namespace scriptorium {

EquivalenceMap::EquivalenceMap(const std::vector<std::vector<int>>& classes) {
  for (const auto& cls : classes) {
    if (cls.empty()) continue;
    const int rep = *std::min_element(cls.begin(), cls.end());
    for (int id : cls) {
      const auto [it, inserted] = rep_.emplace(id, rep);
      if (!inserted && it->second != rep) {
        throw Error(ErrorKind::InvalidArgument, "symbol " + std::to_string(id) + " is in two classes");
      }
    }
  }
}

int EquivalenceMap::representative(int id) const {
  const auto it = rep_.find(id);
  return it == rep_.end() ? id : it->second;
}

std::vector<std::vector<int>> EquivalenceMap::classes() const {
  std::map<int, std::vector<int>> grouped;
  for (const auto& [id, rep] : rep_) grouped[rep].push_back(id);
  std::vector<std::vector<int>> out;
  for (auto& [rep, ids] : grouped) {
    if (ids.size() > 1) out.push_back(std::move(ids));
  }
  return out;
}

EquivalenceMap load_equivalence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    return EquivalenceMap(doc.at("classes").get<std::vector<std::vector<int>>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": " + e.what());
  }
}

std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp, const EquivalenceMap& eq) {
  std::vector<int> a(ref.size());
  std::vector<int> b(hyp.size());
  std::transform(ref.begin(), ref.end(), a.begin(), [&](int s) { return eq.representative(s); });
  std::transform(hyp.begin(), hyp.end(), b.begin(), [&](int s) { return eq.representative(s); });

  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double cer(std::span<const LabelSequence> refs, std::span<const LabelSequence> hyps, const EquivalenceMap& eq) {
  if (refs.size() != hyps.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(refs.size()) + " references but " +
                                                  std::to_string(hyps.size()) + " hypotheses");
  }
  std::size_t errors = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    errors += edit_distance(refs[i], hyps[i], eq);
    total += refs[i].size();
  }
  if (total == 0) throw Error(ErrorKind::EmptyInput, "references contain no symbols");
  return static_cast<double>(errors) / static_cast<double>(total);
}

std::vector<int> utf8_codepoints(std::string_view text) {
  std::vector<int> out;
  std::size_t i = 0;
  auto bad = [&]() {
    return Error(ErrorKind::InvalidArgument, "malformed UTF-8 at byte " + std::to_string(i));
  };
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra;
    std::uint32_t cp;
    if (lead < 0x80) {
      extra = 0;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      throw bad();
    }
    if (i + static_cast<std::size_t>(extra) >= text.size()) throw bad();
    for (int k = 1; k <= extra; ++k) {
      const auto c = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((c & 0xC0) != 0x80) throw bad();
      cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) throw bad();
    out.push_back(static_cast<int>(cp));
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

LabelSequence parse_ids(std::string_view text) {
  LabelSequence out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !space(text[j])) ++j;
    int v = 0;
    const auto [end, ec] = std::from_chars(text.data() + i, text.data() + j, v);
    if (ec != std::errc() || end != text.data() + j || v < 0) {
      throw Error(ErrorKind::InvalidArgument, "not a symbol id: '" + std::string(text.substr(i, j - i)) + "'");
    }
    out.push_back(v);
    i = j;
  }
  return out;
}

std::string format_ids(std::span<const int> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace scriptorium
