#include "kgre/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "kgre/corpus.hpp"
#include "kgre/error.hpp"
#include "kgre/json_io.hpp"
#include "kgre/text.hpp"

namespace kgre {

std::optional<CorpusFormat> parse_corpus_format(std::string_view s) {
  if (s == "tacred") return CorpusFormat::Tacred;
  if (s == "nyt") return CorpusFormat::Nyt;
  if (s == "webnlg") return CorpusFormat::Webnlg;
  if (s == "ace") return CorpusFormat::Ace;
  if (s == "canonical") return CorpusFormat::Canonical;
  return std::nullopt;
}

std::string_view to_string(CorpusFormat f) {
  switch (f) {
    case CorpusFormat::Tacred: return "tacred";
    case CorpusFormat::Nyt: return "nyt";
    case CorpusFormat::Webnlg: return "webnlg";
    case CorpusFormat::Ace: return "ace";
    case CorpusFormat::Canonical: return "canonical";
  }
  return "?";
}

namespace {

// Joins tokens with single spaces, recording each token's byte offset.
struct TokenText {
  std::string text;
  std::vector<std::size_t> starts;

  explicit TokenText(const std::vector<std::string>& tokens) {
    for (const auto& tok : tokens) {
      if (!text.empty()) text.push_back(' ');
      starts.push_back(text.size());
      text += tok;
    }
  }

  // Inclusive token range [first, last] as a mention.
  EntityMention mention(std::size_t first, std::size_t last) const {
    std::size_t start = starts[first];
    std::size_t end = (last + 1 < starts.size()) ? starts[last + 1] - 1
                                                 : text.size();
    return {text.substr(start, end - start), start, end, std::nullopt};
  }
};

std::vector<std::string> token_list(const json& j, const std::string& path,
                                    std::size_t line, const char* field) {
  if (!j.is_array()) throw ParseError(path, line, field, "expected an array");
  std::vector<std::string> out;
  for (const auto& t : j) {
    if (!t.is_string()) throw ParseError(path, line, field, "expected strings");
    out.push_back(t.get<std::string>());
  }
  if (out.empty()) throw ParseError(path, line, field, "empty token list");
  return out;
}

std::size_t index_field(const json& j, const char* field, std::size_t bound,
                        const std::string& path, std::size_t line) {
  std::size_t v = get_offset(j, field, path, line);
  if (v >= bound) throw ParseError(path, line, field, "token index out of range");
  return v;
}

void check_argument(const std::string& arg, const char* field,
                    const std::string& path, std::size_t line) {
  if (arg.empty()) throw ParseError(path, line, field, "empty argument");
  if (arg.find(';') != std::string::npos)
    throw ParseError(path, line, field, "';' cannot be linearized");
}

void add_unique(std::vector<RelationTriple>& triples, RelationTriple t) {
  if (std::find(triples.begin(), triples.end(), t) == triples.end())
    triples.push_back(std::move(t));
}

void add_unique(std::vector<EntityMention>& entities, EntityMention m) {
  for (const auto& e : entities)
    if (e.start == m.start && e.end == m.end) return;
  entities.push_back(std::move(m));
}

void sort_entities(std::vector<EntityMention>& entities) {
  std::sort(entities.begin(), entities.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.start, a.end) < std::tie(b.start, b.end);
            });
}

Corpus load_tacred(const std::filesystem::path& path) {
  const std::string p = path.string();
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(p, 0, "", e.what());
  }
  if (!doc.is_array()) throw ParseError(p, 0, "", "expected a JSON array");

  Corpus corpus;
  std::unordered_map<std::string, std::size_t> by_text;
  std::size_t record_no = 0;
  for (const auto& r : doc) {
    ++record_no;
    auto tokens = token_list(r.contains("token") ? r["token"] : json(),
                             p, record_no, "token");
    TokenText tt(tokens);
    auto n = tokens.size();
    auto ss = index_field(r, "subj_start", n, p, record_no);
    auto se = index_field(r, "subj_end", n, p, record_no);
    auto os = index_field(r, "obj_start", n, p, record_no);
    auto oe = index_field(r, "obj_end", n, p, record_no);
    if (se < ss) throw ParseError(p, record_no, "subj_end", "end before start");
    if (oe < os) throw ParseError(p, record_no, "obj_end", "end before start");
    auto relation = get_string(r, "relation", p, record_no);

    auto subj = tt.mention(ss, se);
    auto obj = tt.mention(os, oe);
    if (r.contains("subj_type")) subj.entity_type = get_string(r, "subj_type", p, record_no);
    if (r.contains("obj_type")) obj.entity_type = get_string(r, "obj_type", p, record_no);
    check_argument(subj.surface, "subj", p, record_no);
    check_argument(obj.surface, "obj", p, record_no);

    auto [it, fresh] = by_text.try_emplace(tt.text, corpus.size());
    if (fresh) {
      Example e;
      e.id = get_string(r, "id", p, record_no);
      e.text = tt.text;
      e.task = TaskKind::ETRC;
      corpus.push_back(std::move(e));
    }
    Example& e = corpus[it->second];
    if (relation != "no_relation")
      add_unique(e.gold_triples, {subj.surface, relation, obj.surface});
    add_unique(e.gold_entities, std::move(subj));
    add_unique(e.gold_entities, std::move(obj));
  }
  for (auto& e : corpus) sort_entities(e.gold_entities);
  return corpus;
}

RelationTriple casrel_triple(const json& t, const std::string& p,
                             std::size_t line) {
  RelationTriple out;
  if (t.is_array()) {
    if (t.size() != 3 || !t[0].is_string() || !t[1].is_string() ||
        !t[2].is_string())
      throw ParseError(p, line, "triple_list", "expected [subject, relation, object]");
    out = {t[0].get<std::string>(), t[1].get<std::string>(),
           t[2].get<std::string>()};
  } else {
    out = {get_string(t, "subject", p, line), get_string(t, "relation", p, line),
           get_string(t, "object", p, line)};
  }
  check_argument(out.subject, "triple_list.subject", p, line);
  check_argument(out.object, "triple_list.object", p, line);
  if (out.relation.empty())
    throw ParseError(p, line, "triple_list.relation", "empty relation");
  return out;
}

Corpus load_casrel(const std::filesystem::path& path, const std::string& prefix) {
  const std::string p = path.string();
  std::vector<std::pair<json, std::size_t>> records;
  auto content = read_file(path);
  auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    json doc;
    try {
      doc = json::parse(content);
    } catch (const json::parse_error& e) {
      throw ParseError(p, 0, "", e.what());
    }
    std::size_t n = 0;
    for (auto& r : doc) records.emplace_back(std::move(r), ++n);
  } else {
    for_each_jsonl(path, [&](const json& j, std::size_t line) {
      records.emplace_back(j, line);
    });
  }

  Corpus corpus;
  corpus.reserve(records.size());
  for (const auto& [r, line] : records) {
    Example e;
    e.id = prefix + "_" + std::to_string(corpus.size());
    e.text = get_string(r, "text", p, line);
    e.task = TaskKind::JREE;
    auto tl = r.find("triple_list");
    if (tl == r.end() || !tl->is_array())
      throw ParseError(p, line, "triple_list", "expected an array");
    for (const auto& t : *tl) add_unique(e.gold_triples, casrel_triple(t, p, line));
    corpus.push_back(std::move(e));
  }
  return corpus;
}

Corpus load_ace(const std::filesystem::path& path) {
  const std::string p = path.string();
  Corpus corpus;
  for_each_jsonl(path, [&](const json& doc, std::size_t line) {
    auto doc_key = get_string(doc, "doc_key", p, line);
    const auto& sentences = doc.contains("sentences") ? doc["sentences"] : json();
    if (!sentences.is_array())
      throw ParseError(p, line, "sentences", "expected an array");
    auto nested = [&](const char* field, std::size_t i) -> json {
      auto it = doc.find(field);
      if (it == doc.end() || !it->is_array() || i >= it->size())
        return json::array();
      return (*it)[i];
    };

    std::size_t offset = 0;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
      auto tokens = token_list(sentences[si], p, line, "sentences");
      TokenText tt(tokens);
      auto local = [&](const json& v, const char* field) {
        if (!v.is_number_integer())
          throw ParseError(p, line, field, "expected a token index");
        auto g = v.get<long long>();
        if (g < static_cast<long long>(offset) ||
            g >= static_cast<long long>(offset + tokens.size()))
          throw ParseError(p, line, field, "token index outside its sentence");
        return static_cast<std::size_t>(g) - offset;
      };

      Example e;
      e.id = doc_key + "_" + std::to_string(si);
      e.text = tt.text;
      e.task = TaskKind::JREE;
      for (const auto& ent : nested("ner", si)) {
        if (!ent.is_array() || ent.size() < 2)
          throw ParseError(p, line, "ner", "expected [start, end, type]");
        auto a = local(ent[0], "ner"), b = local(ent[1], "ner");
        if (b < a) throw ParseError(p, line, "ner", "end before start");
        auto m = tt.mention(a, b);
        if (ent.size() > 2 && ent[2].is_string()) m.entity_type = ent[2].get<std::string>();
        add_unique(e.gold_entities, std::move(m));
      }
      for (const auto& rel : nested("relations", si)) {
        if (!rel.is_array() || rel.size() != 5 || !rel[4].is_string())
          throw ParseError(p, line, "relations",
                           "expected [s_start, s_end, o_start, o_end, relation]");
        auto s0 = local(rel[0], "relations"), s1 = local(rel[1], "relations");
        auto o0 = local(rel[2], "relations"), o1 = local(rel[3], "relations");
        if (s1 < s0 || o1 < o0)
          throw ParseError(p, line, "relations", "end before start");
        RelationTriple t{tt.mention(s0, s1).surface, rel[4].get<std::string>(),
                         tt.mention(o0, o1).surface};
        check_argument(t.subject, "relations", p, line);
        check_argument(t.object, "relations", p, line);
        add_unique(e.gold_triples, std::move(t));
      }
      offset += tokens.size();
      if (e.gold_triples.empty()) continue;
      sort_entities(e.gold_entities);
      corpus.push_back(std::move(e));
    }
  });
  return corpus;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   std::string id_prefix) {
  if (id_prefix.empty()) id_prefix = path.stem().string();
  switch (format) {
    case CorpusFormat::Tacred: return load_tacred(path);
    case CorpusFormat::Nyt:
    case CorpusFormat::Webnlg: return load_casrel(path, id_prefix);
    case CorpusFormat::Ace: return load_ace(path);
    case CorpusFormat::Canonical: return load_canonical_corpus(path);
  }
  throw Error("unknown corpus format");
}

std::vector<LinkedMention> select_mentions(std::vector<LinkedMention> candidates,
                                           const ELOptions& opts,
                                           std::size_t* below,
                                           std::size_t* beyond) {
  std::vector<LinkedMention> kept;
  for (auto& m : candidates) {
    if (m.score < opts.score_threshold) {
      if (below) ++*below;
      continue;
    }
    kept.push_back(std::move(m));
  }
  // Highest score first within each position; kb_id breaks exact ties.
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    if (a.score != b.score) return a.score > b.score;
    return a.kb_id < b.kb_id;
  });
  std::vector<LinkedMention> out;
  std::size_t run = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    bool same = i > 0 && kept[i].start == kept[i - 1].start &&
                kept[i].end == kept[i - 1].end;
    run = same ? run + 1 : 0;
    if (run < opts.top_k) {
      out.push_back(std::move(kept[i]));
    } else if (beyond) {
      ++*beyond;
    }
  }
  return out;
}

ELLoadResult load_el(const std::filesystem::path& path, const ELOptions& opts,
                     const Corpus* corpus) {
  if (!std::isfinite(opts.score_threshold))
    throw ConfigError("entity-linking threshold must be finite");
  if (opts.top_k < 1) throw ConfigError("entity-linking top_k must be >= 1");

  std::unordered_map<std::string, const Example*> by_id;
  if (corpus)
    for (const auto& e : *corpus) by_id.emplace(e.id, &e);

  const std::string p = path.string();
  ELLoadResult result;
  std::map<std::string, std::vector<LinkedMention>> raw;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto id = get_string(j, "example_id", p, line);
    const Example* ex = nullptr;
    if (corpus) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        result.warnings.push_back(p + ":" + std::to_string(line) +
                                  ": unknown example_id '" + id + "', skipped");
        return;
      }
      ex = it->second;
    }
    auto ms = j.find("mentions");
    if (ms == j.end() || !ms->is_array())
      throw ParseError(p, line, "mentions", "expected an array");
    auto& bucket = raw[id];
    for (const auto& mj : *ms) {
      auto m = linked_mention_from_json(mj, p, line);
      if (ex && (m.end > ex->text.size() ||
                 ex->text.compare(m.start, m.end - m.start, m.surface) != 0)) {
        result.warnings.push_back(p + ":" + std::to_string(line) + ": mention '" +
                                  m.surface + "' does not match the text of '" +
                                  id + "', skipped");
        continue;
      }
      bucket.push_back(std::move(m));
    }
  });
  for (auto& [id, mentions] : raw) {
    result.el[id] = select_mentions(std::move(mentions), opts,
                                    &result.dropped_below_threshold,
                                    &result.dropped_beyond_top_k);
  }
  return result;
}

void save_el(const std::filesystem::path& path, const ELFile& el) {
  std::vector<ordered_json> records;
  for (const auto& [id, mentions] : el) {
    ordered_json j;
    j["example_id"] = id;
    j["mentions"] = ordered_json::array();
    for (const auto& m : mentions) j["mentions"].push_back(to_json(m));
    records.push_back(std::move(j));
  }
  write_jsonl(path, records);
}

const std::vector<SplitReference>& reference_splits() {
  static const std::vector<SplitReference> refs = {
      {"tacred", "train", 10021, 1.30},  {"tacred", "val", 3894, 1.40},
      {"tacred", "test", 2307, 1.44},    {"semeval", "train", 6507, 1.00},
      {"semeval", "val", 1493, 1.00},    {"semeval", "test", 2717, 1.00},
      {"nyt", "train", 56196, 2.01},     {"nyt", "val", 5000, 2.02},
      {"nyt", "test", 5000, 2.03},       {"webnlg", "train", 5019, 2.74},
      {"webnlg", "val", 500, 3.11},      {"webnlg", "test", 703, 2.82},
      {"ace2005", "train", 2619, 1.83},  {"ace2005", "val", 648, 1.82},
      {"ace2005", "test", 590, 1.95},
  };
  return refs;
}

std::optional<SplitReference> find_reference(std::string_view dataset,
                                             std::string_view split) {
  if (dataset == "ace") dataset = "ace2005";
  if (dataset == "nyt10") dataset = "nyt";
  if (dataset == "semeval2010") dataset = "semeval";
  if (split == "dev" || split == "valid") split = "val";
  for (const auto& r : reference_splits())
    if (r.dataset == dataset && r.split == split) return r;
  return std::nullopt;
}

bool matches_reference(const SplitReference& ref, std::size_t examples,
                       double mean_triple_size) {
  return examples == ref.examples &&
         std::llround(mean_triple_size * 100.0) ==
             std::llround(ref.mean_triple_size * 100.0);
}

}  // namespace kgre
