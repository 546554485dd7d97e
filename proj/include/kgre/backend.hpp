#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgre/json_io.hpp"

namespace kgre {

enum class DecodingStrategy { Greedy, TopKNucleus };

std::optional<DecodingStrategy> parse_strategy(std::string_view s);
std::string_view to_string(DecodingStrategy s);

struct DecodingConfig {
  DecodingStrategy strategy = DecodingStrategy::TopKNucleus;
  int top_k = 20;
  double top_p = 0.95;
  int max_new_tokens = 128;
  std::optional<std::uint64_t> seed;

  void validate() const;
  // The "decoding" object of a /generate request. Greedy omits the sampling
  // fields; seed appears only when set.
  ordered_json to_wire() const;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  // Output i answers input i; implementations guarantee equal lengths.
  virtual std::vector<std::string> generate(std::span<const std::string> inputs,
                                            const DecodingConfig& cfg) = 0;
};

// Table lookup; inputs missing from the table produce "".
class StubBackend final : public GenerationBackend {
 public:
  explicit StubBackend(std::map<std::string, std::string> table)
      : table_(std::move(table)) {}

  std::vector<std::string> generate(std::span<const std::string> inputs,
                                    const DecodingConfig& cfg) override;

 private:
  std::map<std::string, std::string> table_;
};

struct RemoteOptions {
  std::string endpoint;  // http://host:port[/prefix]
  std::size_t max_batch = 32;
  std::ptrdiff_t max_in_flight = 4;
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{300};
};

// Client for the inference service:
//   POST <endpoint>/generate {"inputs": [...], "decoding": {...}}
//   -> {"outputs": [...]}
// Batches larger than max_batch are split. Concurrent callers share an
// in-flight request cap.
class RemoteBackend final : public GenerationBackend {
 public:
  explicit RemoteBackend(RemoteOptions opts);

  std::vector<std::string> generate(std::span<const std::string> inputs,
                                    const DecodingConfig& cfg) override;

 private:
  std::vector<std::string> post_batch(std::span<const std::string> inputs,
                                      const DecodingConfig& cfg);

  RemoteOptions opts_;
  std::counting_semaphore<1024> in_flight_;
};

ordered_json generate_request_body(std::span<const std::string> inputs,
                                   const DecodingConfig& cfg);

// Fine-tuning knobs forwarded verbatim to the inference service; nothing in
// this library interprets them.
struct TrainingConfig {
  double learning_rate = 8e-5;
  int epochs = 10;
  int max_source_length = 1024;
  int max_target_length = 128;
  int batch_size = 16;
  std::string scheduler = "linear";
  std::string optimizer = "adamw";
  std::uint64_t seed = 42;

  ordered_json to_json() const;
  static TrainingConfig from_json(const json& j);
};

// Body of POST <endpoint>/train.
ordered_json train_request_body(const std::string& train_file,
                                const std::string& val_file,
                                const TrainingConfig& cfg);

// Submits a fine-tuning job and returns the service's job id.
std::string submit_training_job(const std::string& endpoint,
                                const std::string& train_file,
                                const std::string& val_file,
                                const TrainingConfig& cfg);

}  // namespace kgre
