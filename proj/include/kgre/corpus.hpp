#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgre/types.hpp"

namespace kgre {

// Canonical corpus: JSON-Lines, one Example per line.
Corpus load_canonical_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

// {"relations": [...], "null_relation": "..."}; duplicate surfaces are an error.
RelationSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const RelationSchema& schema);

enum class ViolationKind {
  BadSpan,
  UnknownRelation,
  DuplicateId,
  TripleNotInText,
  MissingPositions,
  MissingTypes,
  EmptyField,
  SeparatorInEntity,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  std::string example_id;
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t example_count = 0;
  std::size_t triple_count = 0;
  // gold triple count -> number of examples with that count
  std::map<std::size_t, std::size_t> triple_size_histogram;

  double mean_triple_size() const {
    return example_count == 0
               ? 0.0
               : static_cast<double>(triple_count) /
                     static_cast<double>(example_count);
  }
  bool ok() const { return violations.empty(); }
};

// Reports every invariant violation; never throws.
ValidationReport validate_corpus(const Corpus& corpus,
                                 const RelationSchema& schema);

}  // namespace kgre
