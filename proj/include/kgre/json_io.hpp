#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kgre/types.hpp"

namespace kgre {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

// Calls `fn(record, line_number)` for every non-blank line of a JSON-Lines
// file. Unparseable lines raise ParseError with the line number.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn);

// Field accessors that raise ParseError naming the field on type mismatch.
std::string get_string(const json& j, std::string_view field,
                       const std::string& path, std::size_t line);
std::size_t get_offset(const json& j, std::string_view field,
                       const std::string& path, std::size_t line);
double get_number(const json& j, std::string_view field,
                  const std::string& path, std::size_t line);

ordered_json to_json(const RelationTriple& t);
ordered_json to_json(const EntityMention& m);
ordered_json to_json(const Example& e);
ordered_json to_json(const LinkedMention& m);
ordered_json to_json(const KBEntry& e);
ordered_json to_json(const GroundedFact& f);

RelationTriple triple_from_json(const json& j, const std::string& path,
                                std::size_t line);
Example example_from_json(const json& j, const std::string& path,
                          std::size_t line);
LinkedMention linked_mention_from_json(const json& j, const std::string& path,
                                       std::size_t line);
KBEntry kb_entry_from_json(const json& j, const std::string& path,
                           std::size_t line);

// Writes to `<path>.tmp` and renames into place on commit(). A writer that is
// destroyed uncommitted removes its temporary file, so a failed stage never
// leaves a partial artifact behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<ordered_json>& records);

}  // namespace kgre
