#include "kgre/postprocess.hpp"

#include <algorithm>
#include <set>

#include "kgre/error.hpp"
#include "kgre/text.hpp"

namespace kgre {

void SimilarityConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
  if (max_subspan_words < 1) throw ConfigError("max_subspan_words must be >= 1");
  if (jree_threshold && !(*jree_threshold >= 0.0 && *jree_threshold <= 1.0))
    throw ConfigError("jree threshold must be in [0, 1]");
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::u32string comparable(std::string_view s, Normalization norm) {
  return norm == Normalization::CasefoldWs ? text::utf8_decode(text::casefold_ws(s))
                                           : text::utf8_decode(s);
}

double sim_decoded(const std::u32string& a, const std::u32string& b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

struct Best {
  const std::string* surface = nullptr;
  double score = -1.0;
};

void emit(Resolution& out, std::set<RelationTriple>& seen, RelationTriple t) {
  if (seen.insert(t).second) out.triples.push_back(std::move(t));
}

}  // namespace

double lev_sim(std::string_view a, std::string_view b, Normalization norm) {
  return sim_decoded(comparable(a, norm), comparable(b, norm));
}

Resolution resolve_rc(std::span<const ParsedCandidate> candidates,
                      std::span<const EntityMention> gold_entities,
                      const SimilarityConfig& cfg) {
  cfg.validate();
  std::vector<const EntityMention*> gold;
  for (const auto& g : gold_entities) gold.push_back(&g);
  std::stable_sort(gold.begin(), gold.end(), [](const auto* a, const auto* b) {
    return a->start < b->start;
  });
  std::vector<std::u32string> gold_norm;
  for (const auto* g : gold) gold_norm.push_back(comparable(g->surface, cfg.normalization));

  auto best_gold = [&](const std::string& generated) {
    auto gen = comparable(generated, cfg.normalization);
    Best best;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      double s = sim_decoded(gen, gold_norm[i]);
      if (s > best.score) best = {&gold[i]->surface, s};
    }
    return best;
  };

  Resolution out;
  std::set<RelationTriple> seen;
  for (const auto& c : candidates) {
    if (!c.parsed) {
      out.rejected.push_back({c.raw, *c.reject_reason});
      continue;
    }
    auto subj = best_gold(c.parsed->subject);
    auto obj = best_gold(c.parsed->object);
    if (!subj.surface || !obj.surface || subj.score < cfg.epsilon ||
        obj.score < cfg.epsilon) {
      out.rejected.push_back({c.raw, RejectReason::LowSimilarity});
      continue;
    }
    emit(out, seen, {*subj.surface, c.parsed->relation, *obj.surface});
  }
  return out;
}

Resolution resolve_jree(std::span<const ParsedCandidate> candidates,
                        std::string_view text, const SimilarityConfig& cfg) {
  cfg.validate();

  struct Span {
    std::string surface;
    std::u32string norm;
    std::size_t words;
  };
  // Built lazily: only arguments that are not verbatim substrings need it.
  std::vector<Span> spans;
  bool spans_ready = false;
  auto ensure_spans = [&] {
    if (spans_ready) return;
    spans_ready = true;
    auto words = text::segment_words(text);
    for (std::size_t len = 1; len <= cfg.max_subspan_words; ++len) {
      for (std::size_t i = 0; i + len <= words.size(); ++i) {
        auto s = text.substr(words[i].start, words[i + len - 1].end - words[i].start);
        spans.push_back({std::string(s), comparable(s, cfg.normalization), len});
      }
    }
    // spans are ordered (words, start): the first maximum is the preferred tie
  };

  auto resolve = [&](const std::string& generated) -> std::optional<std::string> {
    if (text.find(generated) != std::string_view::npos) return generated;
    ensure_spans();
    auto gen = comparable(generated, cfg.normalization);
    const Span* best = nullptr;
    double best_score = -1.0;
    for (const auto& s : spans) {
      double v = sim_decoded(gen, s.norm);
      if (v > best_score) {
        best = &s;
        best_score = v;
      }
    }
    if (!best) return std::nullopt;
    if (cfg.jree_threshold && best_score < *cfg.jree_threshold) return std::nullopt;
    return best->surface;
  };

  Resolution out;
  std::set<RelationTriple> seen;
  for (const auto& c : candidates) {
    if (!c.parsed) {
      out.rejected.push_back({c.raw, *c.reject_reason});
      continue;
    }
    auto subj = resolve(c.parsed->subject);
    auto obj = resolve(c.parsed->object);
    if (!subj || !obj) {
      out.rejected.push_back({c.raw, RejectReason::LowSimilarity});
      continue;
    }
    emit(out, seen, {std::move(*subj), c.parsed->relation, std::move(*obj)});
  }
  return out;
}

}  // namespace kgre
