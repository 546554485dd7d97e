#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgre/types.hpp"

namespace kgre {

enum class CorpusFormat { Tacred, Nyt, Webnlg, Ace, Canonical };

std::optional<CorpusFormat> parse_corpus_format(std::string_view s);
std::string_view to_string(CorpusFormat f);

// Reads a benchmark dump into canonical Examples.
//
//   tacred     JSON array of TACRED records (token, subj_start/end, obj_start/
//              end inclusive token indices, subj_type/obj_type, relation).
//              Records sharing a sentence are merged into one Example;
//              "no_relation" contributes no triple. Task ETRC.
//   nyt,webnlg JSON array (or JSON-Lines) of {"text", "triple_list": [[s,r,o]]}.
//              Task JREE; ids are "<id_prefix>_<index>".
//   ace        JSON-Lines of pre-sentence-split documents {"doc_key",
//              "sentences", "ner", "relations"} with document-global inclusive
//              token offsets. Sentences without relations are dropped. Task JREE.
//   canonical  the repository's own JSON-Lines format.
//
// `id_prefix` defaults to the file stem.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   std::string id_prefix = {});

struct ELOptions {
  double score_threshold = -4.5;
  std::size_t top_k = 1;
};

struct ELLoadResult {
  ELFile el;
  std::vector<std::string> warnings;
  std::size_t dropped_below_threshold = 0;
  std::size_t dropped_beyond_top_k = 0;
};

// Reads an entity-linking dump: JSON-Lines {example_id, mentions: [{surface,
// start, end, kb_id, score}]}. Mentions scoring below the threshold are
// dropped and at most `top_k` candidates survive per (start, end) position.
// When `corpus` is given, records for unknown example ids and mentions whose
// surface disagrees with the text are skipped with a warning.
ELLoadResult load_el(const std::filesystem::path& path, const ELOptions& opts,
                     const Corpus* corpus = nullptr);

// Applies threshold and top-k selection to one example's candidates.
std::vector<LinkedMention> select_mentions(std::vector<LinkedMention> candidates,
                                           const ELOptions& opts,
                                           std::size_t* below = nullptr,
                                           std::size_t* beyond = nullptr);

void save_el(const std::filesystem::path& path, const ELFile& el);

// Published split statistics of the standard benchmarks.
struct SplitReference {
  std::string_view dataset;
  std::string_view split;
  std::size_t examples;
  double mean_triple_size;
};

const std::vector<SplitReference>& reference_splits();
std::optional<SplitReference> find_reference(std::string_view dataset,
                                             std::string_view split);

// Count must match exactly; the mean must agree after rounding to two decimals.
bool matches_reference(const SplitReference& ref, std::size_t examples,
                       double mean_triple_size);

}  // namespace kgre
