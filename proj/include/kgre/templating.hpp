#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "kgre/types.hpp"

namespace kgre {

enum class AblationMode { Full, NoKg, NoText };
enum class TemplateKind { T1, T2 };
enum class T2LabelSource { KbLabel, Surface };

std::optional<AblationMode> parse_ablation(std::string_view s);
std::string_view to_string(AblationMode m);
std::optional<TemplateKind> parse_template_kind(std::string_view s);
std::string_view to_string(TemplateKind t);

struct TemplateConfig {
  std::string entity_start_token = "[es]";
  std::string grounding_token = "[gr]";
  std::optional<std::string> task_prefix;  // e.g. "summary:" for T5 backends
  AblationMode ablation = AblationMode::Full;
  T2LabelSource t2_label = T2LabelSource::KbLabel;
  // Position-aware template only: type text emitted for an entity that has no
  // grounded type. Unset means the entity gets the start marker alone.
  std::optional<std::string> missing_type_label;

  // Throws ConfigError when the tokens are empty or equal, or when NoText is
  // combined with the position-aware template.
  void validate(TemplateKind kind) const;
};

// Backends truncate long inputs; builders only flag them.
inline constexpr std::size_t kMaxSourceTokens = 1024;

// Position-aware template: each gold entity is wrapped as
// "<es> mention <gr> type" inside the otherwise untouched text. Types come
// from the grounded fact whose span equals the entity span.
std::string build_t1(const Example& example, std::span<const GroundedFact> kg,
                     const TemplateConfig& cfg);

// Position-absent template: the text followed by one
// " <gr> label is an instance of type" clause per grounded entity, in order of
// first mention, each kb id once.
std::string build_t2(const Example& example, std::span<const GroundedFact> kg,
                     const TemplateConfig& cfg);

std::string build_input(TemplateKind kind, const Example& example,
                        std::span<const GroundedFact> kg,
                        const TemplateConfig& cfg);

}  // namespace kgre
