#include "kgre/json_io.hpp"

#include <cmath>
#include <sstream>

#include "kgre/error.hpp"

namespace kgre {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), line_no, "", e.what());
    }
    fn(record, line_no);
  }
}

namespace {

const json& require(const json& j, std::string_view field,
                    const std::string& path, std::size_t line) {
  if (!j.is_object()) throw ParseError(path, line, "", "record is not an object");
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(path, line, std::string(field), "missing field");
  return *it;
}

}  // namespace

std::string get_string(const json& j, std::string_view field,
                       const std::string& path, std::size_t line) {
  const auto& v = require(j, field, path, line);
  if (!v.is_string())
    throw ParseError(path, line, std::string(field), "expected a string");
  return v.get<std::string>();
}

std::size_t get_offset(const json& j, std::string_view field,
                       const std::string& path, std::size_t line) {
  const auto& v = require(j, field, path, line);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError(path, line, std::string(field),
                     "expected a non-negative integer");
  return v.get<std::size_t>();
}

double get_number(const json& j, std::string_view field,
                  const std::string& path, std::size_t line) {
  const auto& v = require(j, field, path, line);
  if (!v.is_number())
    throw ParseError(path, line, std::string(field), "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d))
    throw ParseError(path, line, std::string(field), "not finite");
  return d;
}

ordered_json to_json(const RelationTriple& t) {
  ordered_json j;
  j["subject"] = t.subject;
  j["relation"] = t.relation;
  j["object"] = t.object;
  return j;
}

ordered_json to_json(const EntityMention& m) {
  ordered_json j;
  j["surface"] = m.surface;
  j["start"] = m.start;
  j["end"] = m.end;
  if (m.entity_type) j["type"] = *m.entity_type;
  return j;
}

ordered_json to_json(const Example& e) {
  ordered_json j;
  j["id"] = e.id;
  j["text"] = e.text;
  j["entities"] = ordered_json::array();
  for (const auto& m : e.gold_entities) j["entities"].push_back(to_json(m));
  j["triples"] = ordered_json::array();
  for (const auto& t : e.gold_triples) j["triples"].push_back(to_json(t));
  j["task"] = std::string(to_string(e.task));
  return j;
}

ordered_json to_json(const LinkedMention& m) {
  ordered_json j;
  j["surface"] = m.surface;
  j["start"] = m.start;
  j["end"] = m.end;
  j["kb_id"] = m.kb_id;
  j["score"] = m.score;
  return j;
}

ordered_json to_json(const KBEntry& e) {
  ordered_json j;
  j["kb_id"] = e.kb_id;
  j["label"] = e.label;
  j["instance_of"] = e.instance_of;
  j["subclass_of"] = e.subclass_of;
  return j;
}

ordered_json to_json(const GroundedFact& f) {
  ordered_json j = to_json(f.mention);
  j["label"] = f.label;
  j["type"] = f.type_label;
  return j;
}

RelationTriple triple_from_json(const json& j, const std::string& path,
                                std::size_t line) {
  RelationTriple t{get_string(j, "subject", path, line),
                   get_string(j, "relation", path, line),
                   get_string(j, "object", path, line)};
  if (t.relation.empty())
    throw ParseError(path, line, "triples.relation", "empty relation");
  if (t.subject.empty())
    throw ParseError(path, line, "triples.subject", "empty subject");
  if (t.object.empty())
    throw ParseError(path, line, "triples.object", "empty object");
  if (t.subject.find(';') != std::string::npos)
    throw ParseError(path, line, "triples.subject",
                     "';' cannot be linearized");
  if (t.object.find(';') != std::string::npos)
    throw ParseError(path, line, "triples.object", "';' cannot be linearized");
  return t;
}

Example example_from_json(const json& j, const std::string& path,
                          std::size_t line) {
  Example e;
  e.id = get_string(j, "id", path, line);
  e.text = get_string(j, "text", path, line);
  auto task = parse_task(get_string(j, "task", path, line));
  if (!task) throw ParseError(path, line, "task", "unknown task kind");
  e.task = *task;

  if (auto it = j.find("entities"); it != j.end()) {
    if (!it->is_array())
      throw ParseError(path, line, "entities", "expected an array");
    for (const auto& ent : *it) {
      EntityMention m;
      m.surface = get_string(ent, "surface", path, line);
      m.start = get_offset(ent, "start", path, line);
      m.end = get_offset(ent, "end", path, line);
      if (auto t = ent.find("type"); t != ent.end() && !t->is_null()) {
        if (!t->is_string())
          throw ParseError(path, line, "entities.type", "expected a string");
        m.entity_type = t->get<std::string>();
      }
      if (m.end <= m.start)
        throw ParseError(path, line, "entities.end", "end must exceed start");
      e.gold_entities.push_back(std::move(m));
    }
  }
  if (auto it = j.find("triples"); it != j.end()) {
    if (!it->is_array())
      throw ParseError(path, line, "triples", "expected an array");
    for (const auto& t : *it) e.gold_triples.push_back(triple_from_json(t, path, line));
  }
  return e;
}

LinkedMention linked_mention_from_json(const json& j, const std::string& path,
                                       std::size_t line) {
  LinkedMention m;
  m.surface = get_string(j, "surface", path, line);
  m.start = get_offset(j, "start", path, line);
  m.end = get_offset(j, "end", path, line);
  m.kb_id = get_string(j, "kb_id", path, line);
  m.score = get_number(j, "score", path, line);
  if (m.end <= m.start)
    throw ParseError(path, line, "mentions.end", "end must exceed start");
  return m;
}

KBEntry kb_entry_from_json(const json& j, const std::string& path,
                           std::size_t line) {
  KBEntry e;
  e.kb_id = get_string(j, "kb_id", path, line);
  e.label = get_string(j, "label", path, line);
  auto list = [&](const char* field) {
    std::vector<std::string> out;
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return out;
    if (!it->is_array()) throw ParseError(path, line, field, "expected an array");
    for (const auto& v : *it) {
      if (!v.is_string()) throw ParseError(path, line, field, "expected strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  e.instance_of = list("instance_of");
  e.subclass_of = list("subclass_of");
  return e;
}

AtomicFile::AtomicFile(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
  if (path_.has_parent_path())
    std::filesystem::create_directories(path_.parent_path());
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write " + tmp_.string());
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw Error("write failed: " + tmp_.string());
  out_.close();
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<ordered_json>& records) {
  AtomicFile f(path);
  for (const auto& r : records) f.stream() << r.dump() << '\n';
  f.commit();
}

}  // namespace kgre
