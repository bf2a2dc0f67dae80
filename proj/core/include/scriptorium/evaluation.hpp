#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scriptorium/ctc.hpp"

namespace scriptorium {

/// Partition of symbol ids into classes that score as equal. Ids not listed
/// form singleton classes, so a default-constructed map is the identity.
class EquivalenceMap {
 public:
  EquivalenceMap() = default;
  /// Throws Error{InvalidArgument} if an id appears in two classes.
  explicit EquivalenceMap(const std::vector<std::vector<int>>& classes);

  /// Smallest id of the class containing `id`.
  int representative(int id) const;
  bool equivalent(int a, int b) const { return representative(a) == representative(b); }
  std::vector<std::vector<int>> classes() const;

 private:
  std::map<int, int> rep_;
};

/// JSON document {"classes": [[id, id, ...], ...]}.
EquivalenceMap load_equivalence(const std::filesystem::path& path);

/// Levenshtein distance with unit costs, comparing symbols by class.
std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp,
                          const EquivalenceMap& eq = {});

/// Total edit distance over total reference length. Throws
/// Error{DimensionMismatch} for lists of different size and Error{EmptyInput}
/// when the references hold no symbols.
double cer(std::span<const LabelSequence> refs, std::span<const LabelSequence> hyps,
           const EquivalenceMap& eq = {});

/// Decodes UTF-8 into code points. Throws Error{InvalidArgument} on malformed
/// input (overlong forms, surrogates and truncated sequences included).
std::vector<int> utf8_codepoints(std::string_view text);

/// Whitespace-separated non-negative integers. Throws Error{InvalidArgument}
/// on anything else.
LabelSequence parse_ids(std::string_view text);
std::string format_ids(std::span<const int> ids);

}  // namespace scriptorium
