#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kgre/json_io.hpp"

namespace kgre {

inline constexpr const char* kToolName = "kgre";
inline constexpr const char* kToolVersion = "0.3.0";

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

// Stage record written next to every artifact as <artifact>.manifest.json.
// No timestamps: identical inputs and config give an identical manifest.
struct StageManifest {
  std::string stage;
  ordered_json config = ordered_json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  ordered_json to_json() const;
  void write_next_to(const std::filesystem::path& artifact) const;
};

std::filesystem::path manifest_path(const std::filesystem::path& artifact);

}  // namespace kgre
