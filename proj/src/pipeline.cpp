#include "kgre/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "kgre/corpus.hpp"
#include "kgre/error.hpp"
#include "kgre/manifest.hpp"
#include "kgre/target_codec.hpp"
#include "kgre/text.hpp"
#include "parallel.hpp"

namespace kgre {

// ---- RunConfig ----

void RunConfig::validate() const {
  decoding.validate();
  sim.validate();
  if (template_kind) template_cfg.validate(*template_kind);
  if (!template_kind && template_cfg.ablation == AblationMode::NoText &&
      task && has_positions(*task))
    throw ConfigError("no_text ablation requires template t2");
  if (template_kind == TemplateKind::T1 && task == TaskKind::JREE)
    throw ConfigError("template t1 requires entity positions (task ETRC or RC)");
  if (augment_copies < 0) throw ConfigError("augmentation copies must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (el.top_k < 1) throw ConfigError("el top_k must be >= 1");
  if (backend == BackendKind::Remote && endpoint.empty())
    throw ConfigError("remote backend needs an endpoint");
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["task"] = task ? ordered_json(std::string(to_string(*task))) : ordered_json(nullptr);
  j["template"] = template_kind ? ordered_json(std::string(to_string(*template_kind)))
                                : ordered_json("auto");
  j["ablation"] = std::string(to_string(template_cfg.ablation));
  j["entity_start_token"] = template_cfg.entity_start_token;
  j["grounding_token"] = template_cfg.grounding_token;
  j["task_prefix"] = template_cfg.task_prefix ? ordered_json(*template_cfg.task_prefix)
                                              : ordered_json(nullptr);
  j["t2_label"] = template_cfg.t2_label == T2LabelSource::KbLabel ? "kb_label" : "surface";
  j["missing_type_label"] = template_cfg.missing_type_label
                                ? ordered_json(*template_cfg.missing_type_label)
                                : ordered_json(nullptr);
  j["strategy"] = std::string(to_string(decoding.strategy));
  j["top_k"] = decoding.top_k;
  j["top_p"] = decoding.top_p;
  j["max_new_tokens"] = decoding.max_new_tokens;
  j["epsilon"] = sim.epsilon;
  j["max_subspan_words"] = sim.max_subspan_words;
  j["normalization"] = sim.normalization == Normalization::CasefoldWs ? "casefold_ws" : "none";
  j["el_threshold"] = el.score_threshold;
  j["el_top_k"] = el.top_k;
  j["property"] = std::string(to_string(property));
  j["backend"] = backend == BackendKind::Stub ? "stub" : "remote";
  j["endpoint"] = endpoint;
  j["seed"] = seed;
  j["copies"] = augment_copies;
  j["jobs"] = jobs;
  j["training"] = training.to_json();
  ordered_json p;
  p["corpus"] = paths.corpus.string();
  p["format"] = std::string(to_string(paths.format));
  p["schema"] = paths.schema.string();
  p["el"] = paths.el.string();
  p["train_el"] = paths.train_el.string();
  p["snapshot"] = paths.snapshot.string();
  p["stub_table"] = paths.stub_table.string();
  p["out"] = paths.out.string();
  j["paths"] = p;
  return j;
}

namespace {

template <typename T, typename Parse>
void set_enum(const json& j, const char* key, T& dst, Parse parse) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  auto v = parse(it->template get<std::string>());
  if (!v) throw ConfigError(std::string("bad value for '") + key + "'");
  dst = *v;
}

template <typename T>
void set_value(const json& j, const char* key, T& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    dst = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

void RunConfig::merge_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  if (auto it = j.find("task"); it != j.end()) {
    if (it->is_null()) {
      task.reset();
    } else {
      auto t = parse_task(it->get<std::string>());
      if (!t) throw ConfigError("bad value for 'task'");
      task = t;
    }
  }
  if (auto it = j.find("template"); it != j.end() && it->is_string()) {
    auto s = it->get<std::string>();
    if (s == "auto") {
      template_kind.reset();
    } else {
      auto t = parse_template_kind(s);
      if (!t) throw ConfigError("bad value for 'template'");
      template_kind = t;
    }
  }
  set_enum(j, "ablation", template_cfg.ablation, parse_ablation);
  set_value(j, "entity_start_token", template_cfg.entity_start_token);
  set_value(j, "grounding_token", template_cfg.grounding_token);
  if (auto it = j.find("task_prefix"); it != j.end())
    template_cfg.task_prefix = it->is_null() ? std::nullopt
                                             : std::optional(it->get<std::string>());
  if (auto it = j.find("missing_type_label"); it != j.end())
    template_cfg.missing_type_label = it->is_null() ? std::nullopt
                                                    : std::optional(it->get<std::string>());
  if (auto it = j.find("t2_label"); it != j.end() && it->is_string())
    template_cfg.t2_label = it->get<std::string>() == "surface" ? T2LabelSource::Surface
                                                                : T2LabelSource::KbLabel;
  set_enum(j, "strategy", decoding.strategy, parse_strategy);
  set_value(j, "top_k", decoding.top_k);
  set_value(j, "top_p", decoding.top_p);
  set_value(j, "max_new_tokens", decoding.max_new_tokens);
  set_value(j, "epsilon", sim.epsilon);
  set_value(j, "max_subspan_words", sim.max_subspan_words);
  if (auto it = j.find("normalization"); it != j.end() && it->is_string())
    sim.normalization = it->get<std::string>() == "none" ? Normalization::None
                                                         : Normalization::CasefoldWs;
  set_value(j, "el_threshold", el.score_threshold);
  set_value(j, "el_top_k", el.top_k);
  set_enum(j, "property", property, parse_type_property);
  if (auto it = j.find("backend"); it != j.end() && it->is_string()) {
    auto b = it->get<std::string>();
    if (b != "stub" && b != "remote") throw ConfigError("bad value for 'backend'");
    backend = b == "stub" ? BackendKind::Stub : BackendKind::Remote;
  }
  set_value(j, "endpoint", endpoint);
  set_value(j, "seed", seed);
  set_value(j, "copies", augment_copies);
  set_value(j, "jobs", jobs);
  if (auto it = j.find("training"); it != j.end() && it->is_object())
    training = TrainingConfig::from_json(*it);
  if (auto it = j.find("paths"); it != j.end() && it->is_object()) {
    auto path = [&](const char* key, std::filesystem::path& dst) {
      std::string s;
      set_value(*it, key, s);
      if (!s.empty()) dst = s;
    };
    path("corpus", paths.corpus);
    path("schema", paths.schema);
    path("el", paths.el);
    path("train_el", paths.train_el);
    path("snapshot", paths.snapshot);
    path("stub_table", paths.stub_table);
    path("out", paths.out);
    set_enum(*it, "format", paths.format, parse_corpus_format);
  }
}

// ---- stages ----

GroundResult ground(const ELFile& el, const ELFile& train_el,
                    const KBSnapshot& snapshot, TypeProperty prop) {
  GroundResult r;
  r.frequency = build_type_frequency(train_el, snapshot, prop);
  r.kg = resolve_types(el, snapshot, prop, r.frequency, &r.diagnostics);
  return r;
}

TemplateKind template_for(const Example& e, const RunConfig& cfg) {
  if (cfg.template_kind) return *cfg.template_kind;
  return has_positions(e.task) ? TemplateKind::T1 : TemplateKind::T2;
}

std::vector<ModelInput> build_model_inputs(const Corpus& corpus,
                                           const GroundedKnowledge& kg,
                                           const RunConfig& cfg,
                                           std::vector<std::string>* warnings) {
  std::vector<ModelInput> out(corpus.size());
  static const std::vector<GroundedFact> none;
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    const auto& e = corpus[i];
    auto it = kg.find(e.id);
    const auto& facts = it == kg.end() ? none : it->second;
    out[i].id = e.id;
    out[i].input = build_input(template_for(e, cfg), e, facts, cfg.template_cfg);
    out[i].target = linearize(e.gold_triples);
  });
  if (warnings) {
    for (const auto& m : out) {
      auto n = text::count_whitespace_tokens(m.input);
      if (n > kMaxSourceTokens)
        warnings->push_back("input '" + m.id + "' has " + std::to_string(n) +
                            " whitespace tokens; the backend will truncate it");
    }
  }
  return out;
}

std::vector<ModelInput> augment_model_inputs(const Corpus& corpus,
                                             const std::vector<ModelInput>& inputs,
                                             std::uint64_t seed, int copies) {
  std::unordered_map<std::string, const Example*> by_id;
  for (const auto& e : corpus) by_id.emplace(e.id, &e);
  std::vector<TrainingRecord> records;
  records.reserve(inputs.size());
  for (const auto& m : inputs) {
    auto it = by_id.find(m.id);
    if (it == by_id.end())
      throw Error("model input '" + m.id + "' has no corpus example");
    if (linearize(it->second->gold_triples) != m.target)
      throw Error("model input '" + m.id + "' target disagrees with the corpus");
    records.push_back({m.id, m.input, it->second->gold_triples, m.augmented});
  }
  std::vector<ModelInput> out;
  for (auto& r : augment(records, seed, copies))
    out.push_back({r.id, r.input, linearize(r.triples), r.augmented});
  return out;
}

std::vector<Generated> generate_all(const std::vector<ModelInput>& inputs,
                                    GenerationBackend& backend,
                                    const DecodingConfig& decoding, unsigned jobs) {
  std::vector<std::string> texts;
  texts.reserve(inputs.size());
  for (const auto& m : inputs) texts.push_back(m.input);

  jobs = std::max(1u, jobs);
  std::size_t chunk = (texts.size() + jobs - 1) / jobs;
  std::size_t nchunks = chunk == 0 ? 0 : (texts.size() + chunk - 1) / chunk;
  std::vector<std::vector<std::string>> parts(nchunks);
  parallel_for(nchunks, jobs, [&](std::size_t c) {
    std::span<const std::string> all(texts);
    auto n = std::min(chunk, texts.size() - c * chunk);
    auto span = all.subspan(c * chunk, n);
    parts[c] = backend.generate(span, decoding);
    if (parts[c].size() != span.size())
      throw ProtocolError("backend returned a misaligned batch");
  });

  std::vector<Generated> out;
  out.reserve(inputs.size());
  std::size_t i = 0;
  for (auto& part : parts)
    for (auto& o : part) {
      out.push_back({inputs[i].id, std::move(o)});
      ++i;
    }
  return out;
}

std::map<std::string, std::string> oracle_table(const std::vector<ModelInput>& inputs,
                                                std::vector<std::string>* warnings) {
  std::map<std::string, std::string> table;
  for (const auto& m : inputs) {
    auto [it, fresh] = table.emplace(m.input, m.target);
    if (!fresh && it->second != m.target && warnings)
      warnings->push_back("input of '" + m.id +
                          "' repeats an earlier input with a different target");
  }
  return table;
}

std::vector<Prediction> postprocess_all(const Corpus& corpus,
                                        const std::vector<Generated>& generated,
                                        const RelationSchema& schema,
                                        const SimilarityConfig& sim, unsigned jobs) {
  sim.validate();
  std::unordered_map<std::string, const Example*> by_id;
  for (const auto& e : corpus) by_id.emplace(e.id, &e);
  std::vector<Prediction> out(generated.size());
  parallel_for(generated.size(), jobs, [&](std::size_t i) {
    const auto& g = generated[i];
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw Error("generated output '" + g.id + "' has no corpus example");
    const Example& e = *it->second;
    auto candidates = parse_generated(g.output, schema);
    Resolution r = has_positions(e.task) && !e.gold_entities.empty()
                       ? resolve_rc(candidates, e.gold_entities, sim)
                       : resolve_jree(candidates, e.text, sim);
    out[i] = {g.id, std::move(r.triples), std::move(r.rejected)};
  });
  return out;
}

EvalReport evaluate(const Corpus& corpus, const std::vector<Prediction>& predictions,
                    const GroundedKnowledge* kg, const EvalOptions& opts) {
  TripleSets pred;
  for (const auto& p : predictions) {
    if (!pred.emplace(p.id, p.triples).second)
      throw Error("duplicate prediction id '" + p.id + "'");
  }
  auto report = micro_prf(pred, gold_triples(corpus), opts);
  if (kg) report.found_info_ratio = found_info_ratio(*kg, corpus);
  return report;
}

// ---- files ----

void save_grounded(const std::filesystem::path& path, const GroundedKnowledge& kg) {
  std::vector<ordered_json> records;
  for (const auto& [id, facts] : kg) {
    ordered_json j;
    j["id"] = id;
    j["facts"] = ordered_json::array();
    for (const auto& f : facts) j["facts"].push_back(to_json(f));
    records.push_back(std::move(j));
  }
  write_jsonl(path, records);
}

GroundedKnowledge load_grounded(const std::filesystem::path& path) {
  GroundedKnowledge kg;
  const auto p = path.string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto id = get_string(j, "id", p, line);
    auto& facts = kg[id];
    auto fs = j.find("facts");
    if (fs == j.end() || !fs->is_array()) throw ParseError(p, line, "facts", "expected an array");
    for (const auto& f : *fs) {
      facts.push_back({linked_mention_from_json(f, p, line), get_string(f, "label", p, line),
                       get_string(f, "type", p, line)});
    }
  });
  return kg;
}

void save_model_inputs(const std::filesystem::path& path, const std::vector<ModelInput>& v) {
  std::vector<ordered_json> records;
  records.reserve(v.size());
  for (const auto& m : v) {
    ordered_json j;
    j["id"] = m.id;
    j["input"] = m.input;
    j["target"] = m.target;
    if (m.augmented) j["augmented"] = true;
    records.push_back(std::move(j));
  }
  write_jsonl(path, records);
}

std::vector<ModelInput> load_model_inputs(const std::filesystem::path& path) {
  std::vector<ModelInput> out;
  const auto p = path.string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    ModelInput m{get_string(j, "id", p, line), get_string(j, "input", p, line),
                 get_string(j, "target", p, line), false};
    if (auto it = j.find("augmented"); it != j.end() && it->is_boolean()) m.augmented = it->get<bool>();
    out.push_back(std::move(m));
  });
  return out;
}

void save_generated(const std::filesystem::path& path, const std::vector<Generated>& v) {
  std::vector<ordered_json> records;
  records.reserve(v.size());
  for (const auto& g : v) {
    ordered_json j;
    j["id"] = g.id;
    j["output"] = g.output;
    records.push_back(std::move(j));
  }
  write_jsonl(path, records);
}

std::vector<Generated> load_generated(const std::filesystem::path& path) {
  std::vector<Generated> out;
  const auto p = path.string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    out.push_back({get_string(j, "id", p, line), get_string(j, "output", p, line)});
  });
  return out;
}

void save_predictions(const std::filesystem::path& path, const std::vector<Prediction>& v) {
  std::vector<ordered_json> records;
  records.reserve(v.size());
  for (const auto& pr : v) {
    ordered_json j;
    j["id"] = pr.id;
    j["triples"] = ordered_json::array();
    for (const auto& t : pr.triples) j["triples"].push_back(to_json(t));
    j["rejected"] = ordered_json::array();
    for (const auto& r : pr.rejected) {
      ordered_json rj;
      rj["raw"] = r.raw;
      rj["reason"] = std::string(to_string(r.reason));
      j["rejected"].push_back(std::move(rj));
    }
    records.push_back(std::move(j));
  }
  write_jsonl(path, records);
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  const auto p = path.string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    Prediction pr;
    pr.id = get_string(j, "id", p, line);
    auto ts = j.find("triples");
    if (ts == j.end() || !ts->is_array()) throw ParseError(p, line, "triples", "expected an array");
    for (const auto& t : *ts) pr.triples.push_back(triple_from_json(t, p, line));
    if (auto rs = j.find("rejected"); rs != j.end() && rs->is_array()) {
      for (const auto& r : *rs) {
        auto reason = get_string(r, "reason", p, line);
        RejectReason rr = RejectReason::NoRelationFound;
        if (reason == "empty_subject") rr = RejectReason::EmptySubject;
        else if (reason == "empty_object") rr = RejectReason::EmptyObject;
        else if (reason == "low_similarity") rr = RejectReason::LowSimilarity;
        else if (reason != "no_relation_found")
          throw ParseError(p, line, "rejected.reason", "unknown reason " + reason);
        pr.rejected.push_back({get_string(r, "raw", p, line), rr});
      }
    }
    out.push_back(std::move(pr));
  });
  return out;
}

std::map<std::string, std::string> load_stub_table(const std::filesystem::path& path) {
  std::map<std::string, std::string> table;
  const auto p = path.string();
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto in = get_string(j, "input", p, line);
    auto out = get_string(j, "output", p, line);
    auto [it, fresh] = table.emplace(std::move(in), out);
    if (!fresh && it->second != out)
      throw ParseError(p, line, "input", "conflicting outputs for one input");
  });
  return table;
}

void save_report(const std::filesystem::path& json_path, const EvalReport& report) {
  {
    AtomicFile f(json_path);
    f.stream() << report.to_json().dump(2) << '\n';
    f.commit();
  }
  auto stem = json_path.parent_path() / json_path.stem();
  {
    AtomicFile f(stem.string() + ".txt");
    f.stream() << report.to_table();
    f.commit();
  }
  {
    AtomicFile f(stem.string() + ".breakdown.csv");
    f.stream() << report.breakdown_csv();
    f.commit();
  }
}

// ---- run-all ----

RunAllResult run_all(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.paths.corpus.empty()) throw ConfigError("run-all needs a corpus");
  if (cfg.paths.schema.empty()) throw ConfigError("run-all needs a relation schema");
  if (cfg.paths.out.empty()) throw ConfigError("run-all needs an output directory");
  const auto& out = cfg.paths.out;
  std::filesystem::create_directories(out);
  const auto config = cfg.to_json();
  RunAllResult result;
  auto& warnings = result.warnings;

  // ingest
  Corpus corpus = load_corpus(cfg.paths.corpus, cfg.paths.format);
  if (cfg.task)
    for (auto& e : corpus) e.task = *cfg.task;
  auto schema = load_schema(cfg.paths.schema);
  auto validation = validate_corpus(corpus, schema);
  for (const auto& v : validation.violations)
    warnings.push_back("corpus: " + v.example_id + ": " + std::string(to_string(v.kind)) +
                       ": " + v.detail);
  auto corpus_path = out / "corpus.jsonl";
  save_corpus(corpus_path, corpus);
  StageManifest{"ingest", config, {cfg.paths.corpus}, {corpus_path}}.write_next_to(corpus_path);

  // ground
  GroundedKnowledge kg;
  auto grounded_path = out / "grounded.jsonl";
  std::vector<std::filesystem::path> ground_inputs{corpus_path};
  if (!cfg.paths.el.empty()) {
    if (cfg.paths.snapshot.empty()) throw ConfigError("grounding needs a KB snapshot");
    auto el = load_el(cfg.paths.el, cfg.el, &corpus);
    for (auto& w : el.warnings) warnings.push_back(std::move(w));
    ELFile train_el = el.el;
    if (!cfg.paths.train_el.empty()) {
      train_el = load_el(cfg.paths.train_el, cfg.el).el;
      ground_inputs.push_back(cfg.paths.train_el);
    }
    auto snapshot = load_snapshot(cfg.paths.snapshot);
    auto g = ground(el.el, train_el, snapshot, cfg.property);
    if (g.diagnostics.missing_kb_id > 0)
      warnings.push_back(std::to_string(g.diagnostics.missing_kb_id) +
                         " linked mentions reference kb ids absent from the snapshot");
    kg = std::move(g.kg);
    ground_inputs.push_back(cfg.paths.el);
    ground_inputs.push_back(cfg.paths.snapshot);
  }
  save_grounded(grounded_path, kg);
  StageManifest{"ground", config, ground_inputs, {grounded_path}}.write_next_to(grounded_path);

  // template
  auto inputs = build_model_inputs(corpus, kg, cfg, &warnings);
  auto inputs_path = out / "model_input.jsonl";
  save_model_inputs(inputs_path, inputs);
  StageManifest{"template", config, {corpus_path, grounded_path}, {inputs_path}}
      .write_next_to(inputs_path);

  // augment (training artifact; generation runs on the unaugmented inputs)
  auto augmented = augment_model_inputs(corpus, inputs, cfg.seed, cfg.augment_copies);
  auto augmented_path = out / "model_input.augmented.jsonl";
  save_model_inputs(augmented_path, augmented);
  StageManifest{"augment", config, {corpus_path, inputs_path}, {augmented_path}}
      .write_next_to(augmented_path);

  // generate
  std::unique_ptr<GenerationBackend> backend;
  std::vector<std::filesystem::path> gen_inputs{inputs_path};
  if (cfg.backend == BackendKind::Stub) {
    std::map<std::string, std::string> table;
    if (!cfg.paths.stub_table.empty()) {
      table = load_stub_table(cfg.paths.stub_table);
      gen_inputs.push_back(cfg.paths.stub_table);
    } else {
      table = oracle_table(inputs, &warnings);
    }
    backend = std::make_unique<StubBackend>(std::move(table));
  } else {
    RemoteOptions ro;
    ro.endpoint = cfg.endpoint;
    ro.max_in_flight = static_cast<std::ptrdiff_t>(cfg.jobs);
    backend = std::make_unique<RemoteBackend>(ro);
  }
  auto decoding = cfg.decoding;
  if (!decoding.seed) decoding.seed = cfg.seed;
  auto generated = generate_all(inputs, *backend, decoding, cfg.jobs);
  auto generated_path = out / "generated.jsonl";
  save_generated(generated_path, generated);
  StageManifest{"generate", config, gen_inputs, {generated_path}}.write_next_to(generated_path);

  // postprocess
  auto predictions = postprocess_all(corpus, generated, schema, cfg.sim, cfg.jobs);
  auto predictions_path = out / "predictions.jsonl";
  save_predictions(predictions_path, predictions);
  StageManifest{"postprocess", config, {corpus_path, generated_path, cfg.paths.schema},
                {predictions_path}}
      .write_next_to(predictions_path);

  // evaluate
  result.report = evaluate(corpus, predictions, cfg.paths.el.empty() ? nullptr : &kg);
  result.report_path = out / "report.json";
  save_report(result.report_path, result.report);
  StageManifest{"evaluate", config, {corpus_path, predictions_path, grounded_path},
                {result.report_path}}
      .write_next_to(result.report_path);
  return result;
}

}  // namespace kgre
