#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgre {

enum class TaskKind { ETRC, RC, JREE };

std::string_view to_string(TaskKind task);
std::optional<TaskKind> parse_task(std::string_view s);

// Entity position/type information is part of the dataset knowledge only for
// the position-aware tasks.
inline bool has_positions(TaskKind t) { return t != TaskKind::JREE; }

/// A span of the example text. Offsets are character (byte) offsets into the
/// raw text; `end` is exclusive.
struct EntityMention {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<std::string> entity_type;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct RelationTriple {
  std::string subject;
  std::string relation;
  std::string object;

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
  friend auto operator<=>(const RelationTriple&, const RelationTriple&) = default;
};

struct Example {
  std::string id;
  std::string text;
  std::vector<EntityMention> gold_entities;
  std::vector<RelationTriple> gold_triples;
  TaskKind task = TaskKind::JREE;

  friend bool operator==(const Example&, const Example&) = default;
};

using Corpus = std::vector<Example>;

struct RelationSchema {
  std::vector<std::string> relations;
  std::optional<std::string> null_relation;

  bool contains(std::string_view relation) const;
};

// Entity-linker output for one span, before type resolution.
struct LinkedMention {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string kb_id;
  double score = 0.0;

  friend bool operator==(const LinkedMention&, const LinkedMention&) = default;
};

// example_id -> mentions, ordered by example id for deterministic output.
using ELFile = std::map<std::string, std::vector<LinkedMention>>;

enum class TypeProperty { InstanceOf, SubclassOf };

std::string_view to_string(TypeProperty p);
std::optional<TypeProperty> parse_type_property(std::string_view s);

struct KBEntry {
  std::string kb_id;
  std::string label;
  std::vector<std::string> instance_of;
  std::vector<std::string> subclass_of;

  const std::vector<std::string>& types(TypeProperty p) const {
    return p == TypeProperty::InstanceOf ? instance_of : subclass_of;
  }

  friend bool operator==(const KBEntry&, const KBEntry&) = default;
};

using KBSnapshot = std::map<std::string, KBEntry>;

// One external fact attached to a linked mention: <label, instance of, type>.
struct GroundedFact {
  LinkedMention mention;
  std::string label;
  std::string type_label;

  friend bool operator==(const GroundedFact&, const GroundedFact&) = default;
};

using GroundedKnowledge = std::map<std::string, std::vector<GroundedFact>>;

}  // namespace kgre
