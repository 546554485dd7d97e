#include "kgre/backend.hpp"

#include <algorithm>

#include "kgre/error.hpp"
#include "net.hpp"

namespace kgre {

std::optional<DecodingStrategy> parse_strategy(std::string_view s) {
  if (s == "greedy") return DecodingStrategy::Greedy;
  if (s == "topk_nucleus") return DecodingStrategy::TopKNucleus;
  return std::nullopt;
}

std::string_view to_string(DecodingStrategy s) {
  return s == DecodingStrategy::Greedy ? "greedy" : "topk_nucleus";
}

void DecodingConfig::validate() const {
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
}

ordered_json DecodingConfig::to_wire() const {
  ordered_json j;
  j["strategy"] = std::string(to_string(strategy));
  if (strategy == DecodingStrategy::TopKNucleus) {
    j["top_k"] = top_k;
    j["top_p"] = top_p;
  }
  j["max_new_tokens"] = max_new_tokens;
  if (seed) j["seed"] = *seed;
  return j;
}

std::vector<std::string> StubBackend::generate(std::span<const std::string> inputs,
                                               const DecodingConfig&) {
  std::vector<std::string> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    auto it = table_.find(in);
    out.push_back(it == table_.end() ? std::string() : it->second);
  }
  return out;
}

ordered_json generate_request_body(std::span<const std::string> inputs,
                                   const DecodingConfig& cfg) {
  ordered_json body;
  body["inputs"] = ordered_json::array();
  for (const auto& in : inputs) body["inputs"].push_back(in);
  body["decoding"] = cfg.to_wire();
  return body;
}

RemoteBackend::RemoteBackend(RemoteOptions opts)
    : opts_(std::move(opts)),
      in_flight_(std::clamp<std::ptrdiff_t>(opts_.max_in_flight, 1, 1024)) {
  if (opts_.max_batch == 0) throw ConfigError("max_batch must be >= 1");
  parse_endpoint(opts_.endpoint);
}

std::vector<std::string> RemoteBackend::generate(std::span<const std::string> inputs,
                                                 const DecodingConfig& cfg) {
  cfg.validate();
  std::vector<std::string> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); i += opts_.max_batch) {
    auto n = std::min(opts_.max_batch, inputs.size() - i);
    auto part = post_batch(inputs.subspan(i, n), cfg);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<std::string> RemoteBackend::post_batch(std::span<const std::string> inputs,
                                                   const DecodingConfig& cfg) {
  auto ep = parse_endpoint(opts_.endpoint);
  auto body = generate_request_body(inputs, cfg).dump();

  in_flight_.acquire();
  httplib::Result res;
  try {
    res = with_retries(opts_.max_attempts, opts_.initial_backoff, [&] {
      httplib::Client cli(ep.origin);
      cli.set_connection_timeout(opts_.timeout);
      cli.set_read_timeout(opts_.timeout);
      return cli.Post(ep.path_prefix + "/generate", body, "application/json");
    });
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();

  if (res->status != 200)
    throw ProtocolError("/generate returned HTTP " + std::to_string(res->status));
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("/generate reply is not JSON: ") + e.what());
  }
  auto outs = reply.find("outputs");
  if (!reply.is_object() || outs == reply.end() || !outs->is_array())
    throw ProtocolError("/generate reply lacks an \"outputs\" array");
  if (outs->size() != inputs.size())
    throw ProtocolError("/generate returned " + std::to_string(outs->size()) +
                        " outputs for " + std::to_string(inputs.size()) + " inputs");
  std::vector<std::string> out;
  out.reserve(outs->size());
  for (const auto& o : *outs) {
    if (!o.is_string()) throw ProtocolError("/generate output is not a string");
    out.push_back(o.get<std::string>());
  }
  return out;
}

ordered_json TrainingConfig::to_json() const {
  ordered_json j;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["max_source_length"] = max_source_length;
  j["max_target_length"] = max_target_length;
  j["batch_size"] = batch_size;
  j["scheduler"] = scheduler;
  j["optimizer"] = optimizer;
  j["seed"] = seed;
  return j;
}

TrainingConfig TrainingConfig::from_json(const json& j) {
  TrainingConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.max_source_length = j.value("max_source_length", c.max_source_length);
  c.max_target_length = j.value("max_target_length", c.max_target_length);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.scheduler = j.value("scheduler", c.scheduler);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.seed = j.value("seed", c.seed);
  return c;
}

ordered_json train_request_body(const std::string& train_file,
                                const std::string& val_file,
                                const TrainingConfig& cfg) {
  ordered_json body;
  body["train_file"] = train_file;
  body["val_file"] = val_file;
  auto fields = cfg.to_json();
  for (auto& [k, v] : fields.items()) body[k] = v;
  return body;
}

std::string submit_training_job(const std::string& endpoint,
                                const std::string& train_file,
                                const std::string& val_file,
                                const TrainingConfig& cfg) {
  auto ep = parse_endpoint(endpoint);
  auto body = train_request_body(train_file, val_file, cfg).dump();
  auto res = with_retries(3, std::chrono::milliseconds(200), [&] {
    httplib::Client cli(ep.origin);
    return cli.Post(ep.path_prefix + "/train", body, "application/json");
  });
  if (res->status != 200 && res->status != 202)
    throw ProtocolError("/train returned HTTP " + std::to_string(res->status) +
                        ": " + res->body);
  try {
    auto reply = json::parse(res->body);
    return reply.at("job_id").get<std::string>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("/train reply: ") + e.what());
  }
}

}  // namespace kgre
