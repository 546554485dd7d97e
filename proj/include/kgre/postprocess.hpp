#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgre/target_codec.hpp"
#include "kgre/types.hpp"

namespace kgre {

enum class Normalization { None, CasefoldWs };

struct SimilarityConfig {
  double epsilon = 0.85;
  std::size_t max_subspan_words = 10;
  Normalization normalization = Normalization::CasefoldWs;
  // Deletion threshold for position-absent resolution; off unless set.
  std::optional<double> jree_threshold;

  void validate() const;
};

// Character-level edit distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// 1 - dist / max(len) after comparison normalization; two empty strings -> 1.
double lev_sim(std::string_view a, std::string_view b,
               Normalization norm = Normalization::CasefoldWs);

struct Rejection {
  std::string raw;
  RejectReason reason;
};

struct Resolution {
  std::vector<RelationTriple> triples;
  std::vector<Rejection> rejected;
};

// Entity-given tasks: every argument is replaced by its most similar gold
// surface (earliest mention wins ties); the triple is deleted when either
// argument's best similarity is below epsilon. Parse rejections pass through
// into `rejected`. Output is deduplicated after replacement.
Resolution resolve_rc(std::span<const ParsedCandidate> candidates,
                      std::span<const EntityMention> gold_entities,
                      const SimilarityConfig& cfg);

// Entity-absent tasks: every argument that is not already a substring of the
// text is replaced by the most similar contiguous word span of at most
// max_subspan_words words (ties: fewer words, then leftmost).
Resolution resolve_jree(std::span<const ParsedCandidate> candidates,
                        std::string_view text, const SimilarityConfig& cfg);

}  // namespace kgre
