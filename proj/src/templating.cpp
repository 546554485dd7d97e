#include "kgre/templating.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "kgre/error.hpp"

namespace kgre {

std::optional<AblationMode> parse_ablation(std::string_view s) {
  if (s == "full") return AblationMode::Full;
  if (s == "no_kg") return AblationMode::NoKg;
  if (s == "no_text") return AblationMode::NoText;
  return std::nullopt;
}

std::string_view to_string(AblationMode m) {
  switch (m) {
    case AblationMode::Full: return "full";
    case AblationMode::NoKg: return "no_kg";
    case AblationMode::NoText: return "no_text";
  }
  return "?";
}

std::optional<TemplateKind> parse_template_kind(std::string_view s) {
  if (s == "t1") return TemplateKind::T1;
  if (s == "t2") return TemplateKind::T2;
  return std::nullopt;
}

std::string_view to_string(TemplateKind t) {
  return t == TemplateKind::T1 ? "t1" : "t2";
}

void TemplateConfig::validate(TemplateKind kind) const {
  if (entity_start_token.empty() || grounding_token.empty())
    throw ConfigError("template tokens must be non-empty");
  if (entity_start_token == grounding_token)
    throw ConfigError("entity start and grounding tokens must differ");
  if (kind == TemplateKind::T1 && ablation == AblationMode::NoText)
    throw ConfigError("no_text ablation requires template t2");
}

namespace {

void refuse_special_tokens(const Example& e, const TemplateConfig& cfg) {
  for (const auto* tok : {&cfg.entity_start_token, &cfg.grounding_token}) {
    if (e.text.find(*tok) != std::string::npos)
      throw TemplateError("example '" + e.id + "' already contains the token " +
                          *tok);
  }
}

std::string with_prefix(std::string body, const TemplateConfig& cfg) {
  if (!cfg.task_prefix) return body;
  return *cfg.task_prefix + " " + body;
}

}  // namespace

std::string build_t1(const Example& example, std::span<const GroundedFact> kg,
                     const TemplateConfig& cfg) {
  cfg.validate(TemplateKind::T1);
  if (!has_positions(example.task))
    throw TemplateError("template t1 needs entity positions; example '" +
                        example.id + "' is " + std::string(to_string(example.task)));
  refuse_special_tokens(example, cfg);

  std::vector<EntityMention> marked = example.gold_entities;
  std::sort(marked.begin(), marked.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  });
  marked.erase(std::unique(marked.begin(), marked.end(),
                           [](const auto& a, const auto& b) {
                             return a.start == b.start && a.end == b.end;
                           }),
               marked.end());
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (marked[i].end > example.text.size() || marked[i].start >= marked[i].end)
      throw TemplateError("example '" + example.id + "': entity span out of range");
    if (i > 0 && marked[i].start < marked[i - 1].end)
      throw TemplateError("example '" + example.id + "': entities '" +
                          marked[i - 1].surface + "' and '" + marked[i].surface +
                          "' overlap");
  }

  std::string out;
  std::size_t cursor = 0;
  for (const auto& m : marked) {
    out.append(example.text, cursor, m.start - cursor);
    out += cfg.entity_start_token;
    out += ' ';
    out.append(example.text, m.start, m.end - m.start);
    if (cfg.ablation != AblationMode::NoKg) {
      auto fact = std::find_if(kg.begin(), kg.end(), [&](const GroundedFact& f) {
        return f.mention.start == m.start && f.mention.end == m.end;
      });
      const std::string* type = nullptr;
      if (fact != kg.end()) {
        type = &fact->type_label;
      } else if (cfg.missing_type_label) {
        type = &*cfg.missing_type_label;
      }
      if (type) {
        out += ' ';
        out += cfg.grounding_token;
        out += ' ';
        out += *type;
      }
    }
    cursor = m.end;
  }
  out.append(example.text, cursor);
  return with_prefix(std::move(out), cfg);
}

std::string build_t2(const Example& example, std::span<const GroundedFact> kg,
                     const TemplateConfig& cfg) {
  cfg.validate(TemplateKind::T2);
  refuse_special_tokens(example, cfg);
  if (cfg.ablation == AblationMode::NoKg) return with_prefix(example.text, cfg);

  std::vector<const GroundedFact*> ordered;
  for (const auto& f : kg) ordered.push_back(&f);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const GroundedFact* a, const GroundedFact* b) {
                     return a->mention.start < b->mention.start;
                   });

  std::string suffix;
  std::set<std::string> seen;
  for (const auto* f : ordered) {
    if (!seen.insert(f->mention.kb_id).second) continue;
    if (!suffix.empty()) suffix += ' ';
    suffix += cfg.grounding_token;
    suffix += ' ';
    suffix += cfg.t2_label == T2LabelSource::KbLabel ? f->label : f->mention.surface;
    suffix += " is an instance of ";
    suffix += f->type_label;
  }

  if (cfg.ablation == AblationMode::NoText) return with_prefix(suffix, cfg);
  if (suffix.empty()) return with_prefix(example.text, cfg);
  return with_prefix(example.text + " " + suffix, cfg);
}

std::string build_input(TemplateKind kind, const Example& example,
                        std::span<const GroundedFact> kg,
                        const TemplateConfig& cfg) {
  return kind == TemplateKind::T1 ? build_t1(example, kg, cfg)
                                  : build_t2(example, kg, cfg);
}

}  // namespace kgre
