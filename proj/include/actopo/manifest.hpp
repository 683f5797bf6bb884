#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "actopo/graph_json.hpp"

namespace actopo {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record written next to every CLI output as
// `<output>.manifest.json`.
struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double wall_seconds = 0.0;

  Json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::filesystem::path manifest_path_for(const std::filesystem::path& output);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& primary_output);

}  // namespace actopo
