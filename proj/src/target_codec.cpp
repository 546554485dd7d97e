#include "kgre/target_codec.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_map>

#include "kgre/text.hpp"

namespace kgre {

std::string linearize(std::span<const RelationTriple> triples) {
  std::string out;
  for (const auto& t : triples) {
    if (!out.empty()) out += kTripleSeparator;
    out += t.subject;
    out += ' ';
    out += t.relation;
    out += ' ';
    out += t.object;
  }
  return out;
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NoRelationFound: return "no_relation_found";
    case RejectReason::EmptySubject: return "empty_subject";
    case RejectReason::EmptyObject: return "empty_object";
    case RejectReason::LowSimilarity: return "low_similarity";
  }
  return "?";
}

namespace {

struct RelationPattern {
  const std::string* surface;
  std::vector<std::string> tokens;
};

struct Match {
  const std::string* surface;
  std::size_t first_token;
  std::size_t last_token;
};

// Prefers infix matches; among those the longest surface, then the leftmost.
bool better(const Match& a, const Match& b, std::size_t ntok) {
  auto infix = [ntok](const Match& m) {
    return m.first_token > 0 && m.last_token + 1 < ntok;
  };
  if (infix(a) != infix(b)) return infix(a);
  if (a.surface->size() != b.surface->size())
    return a.surface->size() > b.surface->size();
  return a.first_token < b.first_token;
}

}  // namespace

std::vector<ParsedCandidate> parse_generated(std::string_view output,
                                             const RelationSchema& schema) {
  std::vector<RelationPattern> patterns;
  std::unordered_map<std::string_view, std::vector<std::size_t>> by_first;
  for (const auto& r : schema.relations) {
    RelationPattern p{&r, {}};
    for (auto w : text::whitespace_tokens(r)) p.tokens.push_back(r.substr(w.start, w.end - w.start));
    if (p.tokens.empty()) continue;
    patterns.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < patterns.size(); ++i)
    by_first[patterns[i].tokens.front()].push_back(i);

  std::vector<ParsedCandidate> out;
  std::set<RelationTriple> seen;
  std::size_t pos = 0;
  while (pos <= output.size()) {
    auto semi = output.find(';', pos);
    auto segment = output.substr(pos, semi == std::string_view::npos
                                          ? std::string_view::npos
                                          : semi - pos);
    pos = semi == std::string_view::npos ? output.size() + 1 : semi + 1;

    segment = text::trim(segment);
    if (segment.empty()) continue;

    auto toks = text::whitespace_tokens(segment);
    auto tok = [&](std::size_t i) {
      return segment.substr(toks[i].start, toks[i].end - toks[i].start);
    };
    std::optional<Match> best;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      auto it = by_first.find(tok(i));
      if (it == by_first.end()) continue;
      for (auto pi : it->second) {
        const auto& p = patterns[pi];
        if (i + p.tokens.size() > toks.size()) continue;
        bool ok = true;
        for (std::size_t k = 1; ok && k < p.tokens.size(); ++k)
          ok = tok(i + k) == p.tokens[k];
        if (!ok) continue;
        Match m{p.surface, i, i + p.tokens.size() - 1};
        if (!best || better(m, *best, toks.size())) best = m;
      }
    }

    ParsedCandidate cand;
    cand.raw = std::string(segment);
    if (!best) {
      cand.reject_reason = RejectReason::NoRelationFound;
    } else if (best->first_token == 0) {
      cand.reject_reason = RejectReason::EmptySubject;
    } else if (best->last_token + 1 == toks.size()) {
      cand.reject_reason = RejectReason::EmptyObject;
    } else {
      RelationTriple t;
      t.subject = std::string(text::trim(segment.substr(0, toks[best->first_token].start)));
      t.relation = *best->surface;
      t.object = std::string(text::trim(segment.substr(toks[best->last_token].end)));
      if (!seen.insert(t).second) continue;
      cand.parsed = std::move(t);
    }
    out.push_back(std::move(cand));
  }
  return out;
}

namespace {

// Uniform integer in [0, n) from raw engine output; std::uniform_int_distribution
// is implementation-defined, this is not.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::vector<TrainingRecord> augment(std::span<const TrainingRecord> corpus,
                                    std::uint64_t seed, int copies) {
  std::vector<TrainingRecord> out(corpus.begin(), corpus.end());
  if (copies <= 0) return out;
  std::mt19937_64 rng(seed);
  for (const auto& rec : corpus) {
    const auto& ts = rec.triples;
    bool permutable = std::adjacent_find(ts.begin(), ts.end(),
                                         std::not_equal_to<>()) != ts.end();
    if (!permutable) continue;
    for (int k = 1; k <= copies; ++k) {
      TrainingRecord dup = rec;
      do {
        fisher_yates(dup.triples, rng);
      } while (dup.triples == ts);
      dup.id = rec.id + "#aug" + std::to_string(k);
      dup.augmented = true;
      out.push_back(std::move(dup));
    }
  }
  return out;
}

}  // namespace kgre
