#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgre/types.hpp"

namespace kgre {

inline constexpr std::string_view kTripleSeparator = " ; ";

// "s r o ; s r o ; ..." in the given order; empty input gives "".
std::string linearize(std::span<const RelationTriple> triples);

enum class RejectReason { NoRelationFound, EmptySubject, EmptyObject, LowSimilarity };

std::string_view to_string(RejectReason r);

struct ParsedCandidate {
  std::string raw;
  std::optional<RelationTriple> parsed;
  std::optional<RejectReason> reject_reason;
};

// Splits model output on ';' and locates a schema relation in each segment as
// a whitespace-delimited infix. With several matches the longest surface wins,
// then the leftmost. Blank segments are skipped, duplicate triples keep their
// first occurrence. Never throws on malformed text.
std::vector<ParsedCandidate> parse_generated(std::string_view output,
                                             const RelationSchema& schema);

struct TrainingRecord {
  std::string id;
  std::string input;
  std::vector<RelationTriple> triples;
  bool augmented = false;
};

// Appends `copies` shuffled-target duplicates of every record that has a
// non-identical permutation of its triples. Originals keep their position;
// duplicates follow the whole original corpus, ids suffixed "#aug<k>".
std::vector<TrainingRecord> augment(std::span<const TrainingRecord> corpus,
                                    std::uint64_t seed, int copies = 1);

}  // namespace kgre
