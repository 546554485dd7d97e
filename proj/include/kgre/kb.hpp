#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "kgre/types.hpp"

namespace kgre {

// JSON-Lines {kb_id, label, instance_of: [...], subclass_of: [...]}.
KBSnapshot load_snapshot(const std::filesystem::path& path);
// Entries are written in kb_id order so equal snapshots give equal files.
void save_snapshot(const std::filesystem::path& path, const KBSnapshot& snapshot);

using TypeFrequency = std::map<std::string, std::size_t>;

// Counts candidate type labels over every linked mention occurrence of the
// training split. A label repeated inside one entity's list counts once for
// that occurrence; kb ids missing from the snapshot contribute nothing.
TypeFrequency build_type_frequency(const ELFile& train_el,
                                   const KBSnapshot& snapshot, TypeProperty prop);

// Highest training frequency wins; equal frequencies (including all-zero)
// fall back to lexicographic order of the label. Empty candidates -> "".
std::string pick_type(const std::vector<std::string>& candidates,
                      const TypeFrequency& freq);

struct GroundingDiagnostics {
  std::size_t grounded = 0;
  std::size_t missing_kb_id = 0;
  std::size_t no_candidate_types = 0;
  std::vector<std::string> missing_ids;  // sorted, unique
};

GroundedKnowledge resolve_types(const ELFile& el, const KBSnapshot& snapshot,
                                TypeProperty prop, const TypeFrequency& freq,
                                GroundingDiagnostics* diag = nullptr);

struct KbClientOptions {
  std::string endpoint;  // http://host:port[/prefix]
  std::filesystem::path cache_path;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds timeout{10};
};

struct FetchResult {
  KBSnapshot fragment;
  std::vector<std::string> unknown_ids;
  std::size_t remote_lookups = 0;
};

// Remote KB lookups (GET <endpoint>/entity/<kb_id>) backed by an on-disk
// snapshot cache. Cached ids never touch the network. Every successful lookup
// is persisted before an error propagates, so an interrupted run keeps its
// partial results.
class KbClient {
 public:
  explicit KbClient(KbClientOptions opts);

  FetchResult fetch(const std::vector<std::string>& kb_ids);

  KBSnapshot snapshot() const;

 private:
  void persist_locked();

  KbClientOptions opts_;
  mutable std::mutex mu_;
  KBSnapshot cache_;
};

}  // namespace kgre
