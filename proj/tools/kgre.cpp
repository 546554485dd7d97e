// kgre: command-line driver for the knowledge-grounded relation extraction
// pipeline. Every stage reads files and writes one JSON-Lines artifact plus
// <artifact>.manifest.json; run-all chains the stages.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgre/corpus.hpp"
#include "kgre/error.hpp"
#include "kgre/manifest.hpp"
#include "kgre/pipeline.hpp"

namespace {

using kgre::RunConfig;
namespace fs = std::filesystem;

// Flags shared by the stages. Unset flags leave the config file's (or the
// built-in) value alone.
struct CommonFlags {
  std::string config;
  std::optional<std::string> task, template_kind, ablation, backend, endpoint,
      strategy, property, es_token, gr_token, prefix, missing_type_label, t2_label;
  std::optional<double> epsilon, top_p, el_threshold;
  std::optional<int> top_k, max_new_tokens, copies;
  std::optional<std::size_t> el_top_k, max_subspan_words;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; flags override it");
    app->add_option("--task", task, "ETRC | RC | JREE (overrides the corpus)");
    app->add_option("--template", template_kind, "t1 | t2 | auto");
    app->add_option("--ablation", ablation, "full | no_kg | no_text");
    app->add_option("--epsilon", epsilon, "similarity threshold (default 0.85)");
    app->add_option("--max-subspan-words", max_subspan_words);
    app->add_option("--top-k", top_k, "sampling top-k (default 20)");
    app->add_option("--top-p", top_p, "nucleus mass (default 0.95)");
    app->add_option("--strategy", strategy, "greedy | topk_nucleus");
    app->add_option("--max-new-tokens", max_new_tokens);
    app->add_option("--seed", seed);
    app->add_option("--backend", backend, "stub | remote");
    app->add_option("--endpoint", endpoint, "inference service base URL");
    app->add_option("--jobs", jobs, "worker threads per stage");
    app->add_option("--property", property, "instance_of | subclass_of");
    app->add_option("--el-threshold", el_threshold, "drop links scoring below (default -4.5)");
    app->add_option("--el-top-k", el_top_k, "links kept per span (default 1)");
    app->add_option("--es-token", es_token, "entity start marker (default [es])");
    app->add_option("--gr-token", gr_token, "grounding marker (default [gr])");
    app->add_option("--prefix", prefix, "task prefix, e.g. summary:");
    app->add_option("--missing-type-label", missing_type_label,
                    "t1 type text for ungrounded entities (default: omit)");
    app->add_option("--t2-label", t2_label, "kb_label | surface");
    app->add_option("--copies", copies, "shuffled duplicates per example (default 1)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) cfg.merge_json(kgre::json::parse(kgre::read_file(config)));
    kgre::json j = kgre::json::object();
    auto put = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    put("task", task);
    put("template", template_kind);
    put("ablation", ablation);
    put("backend", backend);
    put("endpoint", endpoint);
    put("strategy", strategy);
    put("property", property);
    put("entity_start_token", es_token);
    put("grounding_token", gr_token);
    put("task_prefix", prefix);
    put("missing_type_label", missing_type_label);
    put("t2_label", t2_label);
    put("epsilon", epsilon);
    put("top_p", top_p);
    put("el_threshold", el_threshold);
    put("top_k", top_k);
    put("max_new_tokens", max_new_tokens);
    put("copies", copies);
    put("el_top_k", el_top_k);
    put("max_subspan_words", max_subspan_words);
    put("seed", seed);
    put("jobs", jobs);
    cfg.merge_json(j);
    return cfg;
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

template <typename T>
fs::path pick(const std::string& flag, const T& from_config) {
  return flag.empty() ? fs::path(from_config) : fs::path(flag);
}

void require(const fs::path& p, const char* what) {
  if (p.empty()) throw kgre::ConfigError(std::string("missing ") + what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgre - knowledge-grounded relation extraction pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kgre::kToolName) + " " + kgre::kToolVersion);

  std::string corpus, format = "canonical", input, out, schema, el, train_el, snapshot,
                      grounded, model_input, generated, predictions, stub_table,
                      id_prefix, dataset, split, kb_endpoint, kb_cache;
  bool casefold = false;
  std::vector<std::string> reports;

  CommonFlags flags;

  auto* ingest = app.add_subcommand("ingest", "convert a benchmark dump to the canonical corpus");
  ingest->add_option("--input", input, "benchmark file")->required();
  ingest->add_option("--format", format, "tacred | nyt | webnlg | ace | canonical");
  ingest->add_option("--id-prefix", id_prefix, "id prefix for formats without ids");
  ingest->add_option("--schema", schema, "relation schema to validate against");
  ingest->add_option("--dataset", dataset, "compare with published split statistics");
  ingest->add_option("--split", split, "train | val | test");
  ingest->add_option("--out", out, "canonical corpus")->required();

  auto* ground = app.add_subcommand("ground", "attach KB types to entity-linking output");
  ground->add_option("--corpus", corpus)->required();
  ground->add_option("--el", el, "entity-linking JSON-Lines")->required();
  ground->add_option("--train-el", train_el, "training-split EL for type frequencies");
  ground->add_option("--snapshot", snapshot, "KB snapshot JSON-Lines")->required();
  ground->add_option("--kb-endpoint", kb_endpoint, "fetch ids missing from the snapshot");
  ground->add_option("--out", out)->required();

  auto* tmpl = app.add_subcommand("template", "build model inputs and targets");
  tmpl->add_option("--corpus", corpus)->required();
  tmpl->add_option("--grounded", grounded, "output of ground (optional)");
  tmpl->add_option("--out", out)->required();

  auto* aug = app.add_subcommand("augment", "append shuffled-target duplicates");
  aug->add_option("--corpus", corpus)->required();
  aug->add_option("--model-input", model_input)->required();
  aug->add_option("--out", out)->required();

  auto* gen = app.add_subcommand("generate", "run a generation backend over model inputs");
  gen->add_option("--model-input", model_input)->required();
  gen->add_option("--stub-table", stub_table, "JSON-Lines {input, output}; default: oracle targets");
  gen->add_option("--out", out)->required();

  auto* post = app.add_subcommand("postprocess", "turn generated text into resolved triples");
  post->add_option("--corpus", corpus)->required();
  post->add_option("--generated", generated)->required();
  post->add_option("--schema", schema)->required();
  post->add_option("--out", out)->required();

  auto* eval = app.add_subcommand("evaluate", "micro P/R/F1 with per-size breakdown");
  eval->add_option("--corpus", corpus)->required();
  eval->add_option("--predictions", predictions)->required();
  eval->add_option("--grounded", grounded, "adds the found-info ratio");
  eval->add_flag("--casefold", casefold, "case-insensitive matching");
  eval->add_option("--out", out, "report JSON (also writes .txt and .breakdown.csv)")->required();

  auto* stats = app.add_subcommand("stats", "corpus statistics and validation");
  stats->add_option("--corpus", corpus)->required();
  stats->add_option("--schema", schema);
  stats->add_option("--grounded", grounded);
  stats->add_option("--dataset", dataset);
  stats->add_option("--split", split);
  stats->add_option("--out", out, "write the statistics JSON here instead of stdout");

  auto* combine = app.add_subcommand("combine", "mean/stddev over several report files");
  combine->add_option("reports", reports)->required();
  combine->add_option("--out", out);

  auto* run = app.add_subcommand("run-all", "run every stage in sequence");
  run->add_option("--corpus", corpus);
  run->add_option("--format", format, "tacred | nyt | webnlg | ace | canonical");
  run->add_option("--schema", schema);
  run->add_option("--el", el);
  run->add_option("--train-el", train_el);
  run->add_option("--snapshot", snapshot);
  run->add_option("--stub-table", stub_table);
  run->add_option("--out", out, "output directory");

  for (auto* sub : {ingest, ground, tmpl, aug, gen, post, eval, stats, run}) flags.add_to(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = flags.resolve();
    auto fmt = kgre::parse_corpus_format(format);
    if (!fmt) throw kgre::ConfigError("unknown format '" + format + "'");

    if (*ingest) {
      auto c = kgre::load_corpus(input, *fmt, id_prefix);
      kgre::save_corpus(out, c);
      kgre::StageManifest m{"ingest", cfg.to_json(), {input}, {out}};
      m.config["format"] = format;
      m.write_next_to(out);
      kgre::ValidationReport rep;
      if (!schema.empty()) {
        rep = kgre::validate_corpus(c, kgre::load_schema(schema));
        for (const auto& v : rep.violations)
          std::cerr << "violation: " << v.example_id << ": " << kgre::to_string(v.kind)
                    << ": " << v.detail << '\n';
      } else {
        rep = kgre::validate_corpus(c, {});
        std::erase_if(rep.violations, [](const auto& v) {
          return v.kind == kgre::ViolationKind::UnknownRelation;
        });
      }
      std::printf("examples %zu  triples %zu  mean triple size %.2f  violations %zu\n",
                  rep.example_count, rep.triple_count, rep.mean_triple_size(),
                  rep.violations.size());
      if (!dataset.empty()) {
        auto ref = kgre::find_reference(dataset, split);
        if (!ref) throw kgre::ConfigError("no reference for " + dataset + "/" + split);
        bool ok = kgre::matches_reference(*ref, rep.example_count, rep.mean_triple_size());
        std::printf("reference %s/%s: %zu examples, mean %.2f -> %s\n", dataset.c_str(),
                    split.c_str(), ref->examples, ref->mean_triple_size,
                    ok ? "match" : "MISMATCH");
        if (!ok) return 2;
      }
    } else if (*ground) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      auto linked = kgre::load_el(el, cfg.el, &c);
      print_warnings(linked.warnings);
      kgre::ELFile train = linked.el;
      std::vector<fs::path> ins{corpus, el, snapshot};
      if (!train_el.empty()) {
        train = kgre::load_el(train_el, cfg.el).el;
        ins.push_back(train_el);
      }
      auto snap = kgre::load_snapshot(snapshot);
      if (!kb_endpoint.empty()) {
        std::vector<std::string> ids;
        for (const auto* file : {&linked.el, &train})
          for (const auto& [id, ms] : *file)
            for (const auto& m : ms)
              if (!snap.count(m.kb_id)) ids.push_back(m.kb_id);
        kgre::KbClient client({kb_endpoint, snapshot});
        auto fetched = client.fetch(ids);
        for (auto& [id, e] : fetched.fragment) snap[id] = std::move(e);
        for (const auto& id : fetched.unknown_ids)
          std::cerr << "warning: kb id " << id << " unknown to " << kb_endpoint << '\n';
      }
      auto g = kgre::ground(linked.el, train, snap, cfg.property);
      kgre::save_grounded(out, g.kg);
      kgre::StageManifest{"ground", cfg.to_json(), ins, {out}}.write_next_to(out);
      std::printf("grounded %zu mentions; %zu with unknown kb id, %zu without types\n",
                  g.diagnostics.grounded, g.diagnostics.missing_kb_id,
                  g.diagnostics.no_candidate_types);
    } else if (*tmpl) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      if (cfg.task)
        for (auto& e : c) e.task = *cfg.task;
      kgre::GroundedKnowledge kg;
      std::vector<fs::path> ins{corpus};
      if (!grounded.empty()) {
        kg = kgre::load_grounded(grounded);
        ins.push_back(grounded);
      }
      cfg.validate();
      std::vector<std::string> warnings;
      auto inputs = kgre::build_model_inputs(c, kg, cfg, &warnings);
      print_warnings(warnings);
      kgre::save_model_inputs(out, inputs);
      kgre::StageManifest{"template", cfg.to_json(), ins, {out}}.write_next_to(out);
    } else if (*aug) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      auto inputs = kgre::load_model_inputs(model_input);
      auto augmented = kgre::augment_model_inputs(c, inputs, cfg.seed, cfg.augment_copies);
      kgre::save_model_inputs(out, augmented);
      kgre::StageManifest{"augment", cfg.to_json(), {corpus, model_input}, {out}}
          .write_next_to(out);
      std::printf("%zu records (%zu augmented)\n", augmented.size(),
                  augmented.size() - inputs.size());
    } else if (*gen) {
      cfg.validate();
      auto inputs = kgre::load_model_inputs(model_input);
      std::unique_ptr<kgre::GenerationBackend> backend;
      std::vector<fs::path> ins{model_input};
      if (cfg.backend == kgre::BackendKind::Stub) {
        std::vector<std::string> warnings;
        auto table = stub_table.empty() ? kgre::oracle_table(inputs, &warnings)
                                        : kgre::load_stub_table(stub_table);
        print_warnings(warnings);
        if (!stub_table.empty()) ins.push_back(stub_table);
        backend = std::make_unique<kgre::StubBackend>(std::move(table));
      } else {
        kgre::RemoteOptions ro;
        ro.endpoint = cfg.endpoint;
        ro.max_in_flight = static_cast<std::ptrdiff_t>(cfg.jobs);
        backend = std::make_unique<kgre::RemoteBackend>(ro);
      }
      auto decoding = cfg.decoding;
      if (!decoding.seed) decoding.seed = cfg.seed;
      auto outputs = kgre::generate_all(inputs, *backend, decoding, cfg.jobs);
      kgre::save_generated(out, outputs);
      kgre::StageManifest{"generate", cfg.to_json(), ins, {out}}.write_next_to(out);
    } else if (*post) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      if (cfg.task)
        for (auto& e : c) e.task = *cfg.task;
      auto preds = kgre::postprocess_all(c, kgre::load_generated(generated),
                                         kgre::load_schema(schema), cfg.sim, cfg.jobs);
      kgre::save_predictions(out, preds);
      kgre::StageManifest{"postprocess", cfg.to_json(), {corpus, generated, schema}, {out}}
          .write_next_to(out);
    } else if (*eval) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      std::optional<kgre::GroundedKnowledge> kg;
      std::vector<fs::path> ins{corpus, predictions};
      if (!grounded.empty()) {
        kg = kgre::load_grounded(grounded);
        ins.push_back(grounded);
      }
      for (const auto& e : c)
        if (kgre::dedupe(e.gold_triples).size() != e.gold_triples.size())
          std::cerr << "warning: duplicate gold triples in '" << e.id << "' counted once\n";
      auto report = kgre::evaluate(c, kgre::load_predictions(predictions),
                                   kg ? &*kg : nullptr, {casefold});
      kgre::save_report(out, report);
      kgre::StageManifest{"evaluate", cfg.to_json(), ins, {out}}.write_next_to(out);
      std::cout << report.to_table();
    } else if (*stats) {
      auto c = kgre::load_corpus(corpus, kgre::CorpusFormat::Canonical);
      kgre::RelationSchema rs;
      if (!schema.empty()) rs = kgre::load_schema(schema);
      auto rep = kgre::validate_corpus(c, rs);
      if (schema.empty())
        std::erase_if(rep.violations, [](const auto& v) {
          return v.kind == kgre::ViolationKind::UnknownRelation;
        });
      kgre::ordered_json j;
      j["examples"] = rep.example_count;
      j["triples"] = rep.triple_count;
      j["mean_triple_size"] = rep.mean_triple_size();
      kgre::ordered_json hist = kgre::ordered_json::object();
      for (const auto& [k, v] : rep.triple_size_histogram) hist[std::to_string(k)] = v;
      j["triple_size_histogram"] = hist;
      j["violations"] = kgre::ordered_json::array();
      for (const auto& v : rep.violations)
        j["violations"].push_back({{"id", v.example_id},
                                   {"kind", std::string(kgre::to_string(v.kind))},
                                   {"detail", v.detail}});
      if (!grounded.empty()) {
        auto ratio = kgre::found_info_ratio(kgre::load_grounded(grounded), c);
        j["found_info_ratio"] = ratio ? kgre::ordered_json(*ratio) : kgre::ordered_json(nullptr);
      }
      if (!dataset.empty()) {
        auto ref = kgre::find_reference(dataset, split);
        if (!ref) throw kgre::ConfigError("no reference for " + dataset + "/" + split);
        j["reference"] = {{"examples", ref->examples},
                          {"mean_triple_size", ref->mean_triple_size},
                          {"match", kgre::matches_reference(*ref, rep.example_count,
                                                            rep.mean_triple_size())}};
      }
      if (out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        kgre::AtomicFile f(out);
        f.stream() << j.dump(2) << '\n';
        f.commit();
      }
    } else if (*combine) {
      std::vector<kgre::EvalReport> rs;
      for (const auto& r : reports)
        rs.push_back(kgre::EvalReport::from_json(kgre::json::parse(kgre::read_file(r))));
      auto agg = kgre::combine_reports(rs).to_json().dump(2);
      if (out.empty()) {
        std::cout << agg << '\n';
      } else {
        kgre::AtomicFile f(out);
        f.stream() << agg << '\n';
        f.commit();
      }
    } else if (*run) {
      if (!corpus.empty()) cfg.paths.corpus = corpus;
      if (run->count("--format")) cfg.paths.format = *fmt;
      cfg.paths.schema = pick(schema, cfg.paths.schema);
      cfg.paths.el = pick(el, cfg.paths.el);
      cfg.paths.train_el = pick(train_el, cfg.paths.train_el);
      cfg.paths.snapshot = pick(snapshot, cfg.paths.snapshot);
      cfg.paths.stub_table = pick(stub_table, cfg.paths.stub_table);
      cfg.paths.out = pick(out, cfg.paths.out);
      require(cfg.paths.corpus, "--corpus");
      require(cfg.paths.schema, "--schema");
      require(cfg.paths.out, "--out");
      auto result = kgre::run_all(cfg);
      print_warnings(result.warnings);
      std::cout << result.report.to_table();
      std::printf("report: %s\n", result.report_path.string().c_str());
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    std::cerr << "kgre: error: " << msg << '\n';
    return 1;
  }
  return 0;
}
