#include "kgre/kb.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "httplib.h"
#include "kgre/error.hpp"
#include "kgre/json_io.hpp"
#include "net.hpp"

namespace kgre {

KBSnapshot load_snapshot(const std::filesystem::path& path) {
  KBSnapshot snapshot;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto entry = kb_entry_from_json(j, path.string(), line);
    auto id = entry.kb_id;
    if (!snapshot.emplace(id, std::move(entry)).second)
      throw ParseError(path.string(), line, "kb_id", "duplicate kb_id " + id);
  });
  return snapshot;
}

void save_snapshot(const std::filesystem::path& path, const KBSnapshot& snapshot) {
  std::vector<ordered_json> records;
  records.reserve(snapshot.size());
  for (const auto& [id, entry] : snapshot) records.push_back(to_json(entry));
  write_jsonl(path, records);
}

TypeFrequency build_type_frequency(const ELFile& train_el,
                                   const KBSnapshot& snapshot, TypeProperty prop) {
  TypeFrequency freq;
  for (const auto& [id, mentions] : train_el) {
    for (const auto& m : mentions) {
      auto it = snapshot.find(m.kb_id);
      if (it == snapshot.end()) continue;
      std::set<std::string> labels(it->second.types(prop).begin(),
                                   it->second.types(prop).end());
      for (const auto& l : labels) ++freq[l];
    }
  }
  return freq;
}

std::string pick_type(const std::vector<std::string>& candidates,
                      const TypeFrequency& freq) {
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& c : candidates) {
    auto it = freq.find(c);
    std::size_t n = it == freq.end() ? 0 : it->second;
    if (!best || n > best_count || (n == best_count && c < *best)) {
      best = &c;
      best_count = n;
    }
  }
  return best ? *best : std::string();
}

GroundedKnowledge resolve_types(const ELFile& el, const KBSnapshot& snapshot,
                                TypeProperty prop, const TypeFrequency& freq,
                                GroundingDiagnostics* diag) {
  GroundingDiagnostics local;
  GroundingDiagnostics& d = diag ? *diag : local;
  std::set<std::string> missing;
  GroundedKnowledge kg;
  for (const auto& [id, mentions] : el) {
    auto& facts = kg[id];
    for (const auto& m : mentions) {
      auto it = snapshot.find(m.kb_id);
      if (it == snapshot.end()) {
        ++d.missing_kb_id;
        missing.insert(m.kb_id);
        continue;
      }
      auto type = pick_type(it->second.types(prop), freq);
      if (type.empty()) {
        ++d.no_candidate_types;
        continue;
      }
      facts.push_back({m, it->second.label, std::move(type)});
      ++d.grounded;
    }
  }
  d.missing_ids.assign(missing.begin(), missing.end());
  return kg;
}

KbClient::KbClient(KbClientOptions opts) : opts_(std::move(opts)) {
  if (!opts_.cache_path.empty() && std::filesystem::exists(opts_.cache_path))
    cache_ = load_snapshot(opts_.cache_path);
}

KBSnapshot KbClient::snapshot() const {
  std::lock_guard lock(mu_);
  return cache_;
}

void KbClient::persist_locked() {
  if (!opts_.cache_path.empty()) save_snapshot(opts_.cache_path, cache_);
}

FetchResult KbClient::fetch(const std::vector<std::string>& kb_ids) {
  FetchResult result;
  std::set<std::string> wanted(kb_ids.begin(), kb_ids.end());

  std::lock_guard lock(mu_);
  std::vector<std::string> to_fetch;
  for (const auto& id : wanted) {
    if (auto it = cache_.find(id); it != cache_.end()) {
      result.fragment.emplace(id, it->second);
    } else {
      to_fetch.push_back(id);
    }
  }
  if (to_fetch.empty()) return result;

  auto ep = parse_endpoint(opts_.endpoint);
  bool dirty = false;
  try {
    for (const auto& id : to_fetch) {
      ++result.remote_lookups;
      auto res = with_retries(
          opts_.max_attempts, opts_.initial_backoff, [&]() -> httplib::Result {
            httplib::Client cli(ep.origin);
            cli.set_connection_timeout(opts_.timeout);
            cli.set_read_timeout(opts_.timeout);
            return cli.Get(ep.path_prefix + "/entity/" + id);
          });
      if (res->status == 404) {
        result.unknown_ids.push_back(id);
        continue;
      }
      if (res->status != 200)
        throw ProtocolError("kb lookup of " + id + " returned HTTP " +
                            std::to_string(res->status));
      json body;
      try {
        body = json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw ProtocolError("kb lookup of " + id + ": " + e.what());
      }
      KBEntry entry;
      try {
        entry = kb_entry_from_json(body, opts_.endpoint, 0);
      } catch (const ParseError& e) {
        throw ProtocolError(std::string("kb lookup of ") + id + ": " + e.what());
      }
      if (entry.kb_id != id)
        throw ProtocolError("kb lookup of " + id + " answered for " + entry.kb_id);
      cache_[id] = entry;
      result.fragment[id] = std::move(entry);
      dirty = true;
    }
  } catch (...) {
    if (dirty) persist_locked();
    throw;
  }
  if (dirty) persist_locked();
  return result;
}

}  // namespace kgre
