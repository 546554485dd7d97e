#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgre/backend.hpp"
#include "kgre/evaluation.hpp"
#include "kgre/ingestion.hpp"
#include "kgre/kb.hpp"
#include "kgre/postprocess.hpp"
#include "kgre/templating.hpp"
#include "kgre/types.hpp"

namespace kgre {

enum class BackendKind { Stub, Remote };

struct RunConfig {
  std::optional<TaskKind> task;                   // overrides the corpus task
  std::optional<TemplateKind> template_kind;      // unset: t1 if positions, else t2
  TemplateConfig template_cfg;
  DecodingConfig decoding;
  SimilarityConfig sim;
  ELOptions el;
  TypeProperty property = TypeProperty::InstanceOf;
  TrainingConfig training;
  BackendKind backend = BackendKind::Stub;
  std::string endpoint;
  std::uint64_t seed = 13;
  int augment_copies = 1;
  unsigned jobs = 1;

  struct Paths {
    std::filesystem::path corpus;
    CorpusFormat format = CorpusFormat::Canonical;
    std::filesystem::path schema;
    std::filesystem::path el;
    std::filesystem::path train_el;
    std::filesystem::path snapshot;
    std::filesystem::path stub_table;
    std::filesystem::path out;
  } paths;

  // Checks cross-field invariants (e.g. no_text needs t2). Throws ConfigError.
  void validate() const;
  ordered_json to_json() const;
  // Applies the keys present in `j` on top of the current values.
  void merge_json(const json& j);
};

struct ModelInput {
  std::string id;
  std::string input;
  std::string target;
  bool augmented = false;
};

struct Generated {
  std::string id;
  std::string output;
};

struct Prediction {
  std::string id;
  std::vector<RelationTriple> triples;
  std::vector<Rejection> rejected;
};

// ---- stages (in memory) ----

struct GroundResult {
  GroundedKnowledge kg;
  TypeFrequency frequency;
  GroundingDiagnostics diagnostics;
};

// Frequencies come from `train_el` (the training split); pass the same file as
// `el` when grounding the training split itself.
GroundResult ground(const ELFile& el, const ELFile& train_el,
                    const KBSnapshot& snapshot, TypeProperty prop);

TemplateKind template_for(const Example& e, const RunConfig& cfg);

// Templated inputs paired with linearized gold targets, in corpus order.
// Inputs longer than the backend's source budget are reported in `warnings`.
std::vector<ModelInput> build_model_inputs(const Corpus& corpus,
                                           const GroundedKnowledge& kg,
                                           const RunConfig& cfg,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<ModelInput> augment_model_inputs(const Corpus& corpus,
                                             const std::vector<ModelInput>& inputs,
                                             std::uint64_t seed, int copies);

std::vector<Generated> generate_all(const std::vector<ModelInput>& inputs,
                                    GenerationBackend& backend,
                                    const DecodingConfig& decoding, unsigned jobs);

// Oracle table: templated input -> linearized gold target. The first record
// wins when an input repeats with a different target.
std::map<std::string, std::string> oracle_table(const std::vector<ModelInput>& inputs,
                                                std::vector<std::string>* warnings = nullptr);

std::vector<Prediction> postprocess_all(const Corpus& corpus,
                                        const std::vector<Generated>& generated,
                                        const RelationSchema& schema,
                                        const SimilarityConfig& sim, unsigned jobs);

EvalReport evaluate(const Corpus& corpus, const std::vector<Prediction>& predictions,
                    const GroundedKnowledge* kg = nullptr, const EvalOptions& opts = {});

// ---- artifact files ----

void save_grounded(const std::filesystem::path& path, const GroundedKnowledge& kg);
GroundedKnowledge load_grounded(const std::filesystem::path& path);
void save_model_inputs(const std::filesystem::path& path, const std::vector<ModelInput>& v);
std::vector<ModelInput> load_model_inputs(const std::filesystem::path& path);
void save_generated(const std::filesystem::path& path, const std::vector<Generated>& v);
std::vector<Generated> load_generated(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, const std::vector<Prediction>& v);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
// JSON-Lines {input, output}.
std::map<std::string, std::string> load_stub_table(const std::filesystem::path& path);
void save_report(const std::filesystem::path& json_path, const EvalReport& report);

// ---- orchestration ----

struct RunAllResult {
  EvalReport report;
  std::vector<std::string> warnings;
  std::filesystem::path report_path;
};

// ingest -> ground -> template -> augment -> generate -> postprocess ->
// evaluate, writing every artifact and its manifest under paths.out.
// Grounding is skipped (empty knowledge) when no EL file is configured.
RunAllResult run_all(const RunConfig& cfg);

}  // namespace kgre
