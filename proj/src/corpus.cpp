#include "kgre/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "kgre/error.hpp"
#include "kgre/json_io.hpp"

namespace kgre {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::ETRC: return "ETRC";
    case TaskKind::RC: return "RC";
    case TaskKind::JREE: return "JREE";
  }
  return "?";
}

std::optional<TaskKind> parse_task(std::string_view s) {
  if (s == "ETRC") return TaskKind::ETRC;
  if (s == "RC") return TaskKind::RC;
  if (s == "JREE") return TaskKind::JREE;
  return std::nullopt;
}

std::string_view to_string(TypeProperty p) {
  return p == TypeProperty::InstanceOf ? "instance_of" : "subclass_of";
}

std::optional<TypeProperty> parse_type_property(std::string_view s) {
  if (s == "instance_of") return TypeProperty::InstanceOf;
  if (s == "subclass_of") return TypeProperty::SubclassOf;
  return std::nullopt;
}

bool RelationSchema::contains(std::string_view relation) const {
  return std::find(relations.begin(), relations.end(), relation) !=
         relations.end();
}

Corpus load_canonical_corpus(const std::filesystem::path& path) {
  Corpus corpus;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    corpus.push_back(example_from_json(j, path.string(), line));
  });
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::vector<ordered_json> records;
  records.reserve(corpus.size());
  for (const auto& e : corpus) records.push_back(to_json(e));
  write_jsonl(path, records);
}

RelationSchema load_schema(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, "", e.what());
  }
  RelationSchema schema;
  auto rel = j.find("relations");
  if (rel == j.end() || !rel->is_array())
    throw ParseError(path.string(), 0, "relations", "expected an array");
  std::set<std::string> seen;
  for (const auto& r : *rel) {
    if (!r.is_string() || r.get<std::string>().empty())
      throw ParseError(path.string(), 0, "relations", "expected non-empty strings");
    auto s = r.get<std::string>();
    if (!seen.insert(s).second)
      throw ParseError(path.string(), 0, "relations", "duplicate relation " + s);
    schema.relations.push_back(std::move(s));
  }
  if (auto n = j.find("null_relation"); n != j.end() && !n->is_null()) {
    if (!n->is_string())
      throw ParseError(path.string(), 0, "null_relation", "expected a string");
    schema.null_relation = n->get<std::string>();
  }
  return schema;
}

void save_schema(const std::filesystem::path& path,
                 const RelationSchema& schema) {
  ordered_json j;
  j["relations"] = schema.relations;
  if (schema.null_relation) j["null_relation"] = *schema.null_relation;
  AtomicFile f(path);
  f.stream() << j.dump(2) << '\n';
  f.commit();
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::BadSpan: return "bad_span";
    case ViolationKind::UnknownRelation: return "unknown_relation";
    case ViolationKind::DuplicateId: return "duplicate_id";
    case ViolationKind::TripleNotInText: return "triple_not_in_text";
    case ViolationKind::MissingPositions: return "missing_positions";
    case ViolationKind::MissingTypes: return "missing_types";
    case ViolationKind::EmptyField: return "empty_field";
    case ViolationKind::SeparatorInEntity: return "separator_in_entity";
  }
  return "?";
}

ValidationReport validate_corpus(const Corpus& corpus,
                                 const RelationSchema& schema) {
  ValidationReport report;
  std::unordered_set<std::string> ids;
  auto add = [&](const Example& e, ViolationKind k, std::string detail) {
    report.violations.push_back({e.id, k, std::move(detail)});
  };

  for (const auto& e : corpus) {
    ++report.example_count;
    report.triple_count += e.gold_triples.size();
    ++report.triple_size_histogram[e.gold_triples.size()];

    if (!ids.insert(e.id).second) add(e, ViolationKind::DuplicateId, e.id);

    for (const auto& m : e.gold_entities) {
      if (m.start >= m.end || m.end > e.text.size()) {
        add(e, ViolationKind::BadSpan,
            "[" + std::to_string(m.start) + "," + std::to_string(m.end) +
                ") outside text");
      } else if (e.text.compare(m.start, m.end - m.start, m.surface) != 0) {
        add(e, ViolationKind::BadSpan,
            "surface '" + m.surface + "' does not match text at [" +
                std::to_string(m.start) + "," + std::to_string(m.end) + ")");
      }
      if (e.task == TaskKind::ETRC && !m.entity_type)
        add(e, ViolationKind::MissingTypes, "entity '" + m.surface + "' untyped");
    }
    if (has_positions(e.task) && e.gold_entities.empty() &&
        !e.gold_triples.empty())
      add(e, ViolationKind::MissingPositions,
          std::string(to_string(e.task)) + " example without entity positions");

    for (const auto& t : e.gold_triples) {
      if (t.subject.empty() || t.object.empty() || t.relation.empty()) {
        add(e, ViolationKind::EmptyField, "triple with an empty field");
        continue;
      }
      bool known = schema.contains(t.relation) ||
                   (schema.null_relation && *schema.null_relation == t.relation);
      if (!known)
        add(e, ViolationKind::UnknownRelation,
            "'" + t.relation + "' is not in the relation set");
      for (const auto* arg : {&t.subject, &t.object}) {
        if (arg->find(';') != std::string::npos)
          add(e, ViolationKind::SeparatorInEntity, "'" + *arg + "' contains ';'");
        if (e.text.find(*arg) == std::string::npos)
          add(e, ViolationKind::TripleNotInText, "'" + *arg + "' not in text");
      }
    }
  }
  return report;
}

}  // namespace kgre
