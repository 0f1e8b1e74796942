#pragma once

// Scene manifests: a JSON document per generated scene holding everything
// needed to regenerate it (seed, config echo, render settings) plus a summary
// of the drawn scene and the hashes of every emitted file. Keys are written in
// a fixed order so identical scenes give identical bytes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "xyzmap/renderer.hpp"
#include "xyzmap/scene.hpp"

namespace xyzmap {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(std::string_view bytes);
std::string file_hash(const std::filesystem::path& path);

Json to_json(const SceneConfig& config);
/// Missing keys keep their defaults; unknown keys and wrong types throw
/// InvalidArgument. The result is validated.
SceneConfig scene_config_from_json(const Json& json);
SceneConfig load_scene_config(const std::filesystem::path& path);

Json to_json(const PinholeCamera& camera);
PinholeCamera camera_from_json(const Json& json);

Json to_json(const MaterialVector& material);
Json to_json(const VesselProfile& profile);

/// One emitted file, path relative to the manifest's directory.
struct ArtifactEntry {
  std::string role;
  std::string kind;
  std::string path;
  std::string hash;

  friend bool operator==(const ArtifactEntry&, const ArtifactEntry&) = default;
};

struct SceneManifest {
  int format_version = kManifestFormatVersion;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  SceneConfig config;
  RenderOptions render;
  PinholeCamera camera;
  std::vector<ArtifactEntry> files;

  const ArtifactEntry* find(std::string_view role, std::string_view kind) const;
};

/// The full manifest document for a rendered scene.
Json manifest_json(const SceneRecord& scene, const SceneConfig& config,
                   const RenderOptions& render, const std::vector<ArtifactEntry>& files);

/// Reads the fields needed for replay, evaluation and depth cleaning.
/// Throws MalformedHeader for an unsupported format_version.
SceneManifest read_manifest(const std::filesystem::path& path);

std::string manifest_name(std::uint64_t seed);
/// `<seed>_<role>_<kind>.<ext>`.
std::string artifact_name(std::uint64_t seed, std::string_view role, std::string_view kind,
                          std::string_view ext);

}  // namespace xyzmap
