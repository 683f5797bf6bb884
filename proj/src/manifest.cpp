#include "actopo/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "actopo/error.hpp"
#include "actopo/tensor_io.hpp"

namespace actopo {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

Json RunManifest::to_json() const {
  Json inputs_json = Json::array();
  for (const auto& p : inputs) inputs_json.push_back(Json{{"path", p.string()}, {"sha256", sha256_file(p)}});
  Json outputs_json = Json::array();
  for (const auto& p : outputs) outputs_json.push_back(Json{{"path", p.string()}, {"sha256", sha256_file(p)}});
  Json out = Json::object();
  out["tool"] = "actopo";
  out["tool_version"] = kToolVersion;
  out["command"] = command;
  out["parameters"] = parameters;
  out["inputs"] = std::move(inputs_json);
  out["outputs"] = std::move(outputs_json);
  out["wall_seconds"] = wall_seconds;
  return out;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& primary_output) {
  write_text_file(manifest_path_for(primary_output), manifest.to_json().dump(2) + "\n");
}

}  // namespace actopo
