#pragma once

// Batch operations behind the command-line tool: scene generation and replay,
// directory evaluation, and single-file loss and depth cleaning.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xyzmap/losses.hpp"
#include "xyzmap/manifest.hpp"
#include "xyzmap/renderer.hpp"
#include "xyzmap/report.hpp"
#include "xyzmap/scene.hpp"

namespace xyzmap {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitPartial = 3,
};

struct SeedFailure {
  std::uint64_t seed = 0;
  ErrorCode code = ErrorCode::kGenerationFailed;
  std::string message;
};

struct BatchResult {
  std::vector<std::uint64_t> written;
  std::vector<SeedFailure> failures;

  /// 0 when nothing failed, 3 when some items failed, 2 when all did.
  int exit_code() const;
};

/// Creates `dir` if needed and checks that a file can be written there.
/// Throws IoError without leaving anything behind on failure.
void prepare_output_dir(const std::filesystem::path& dir);

/// Writes maps, masks and meshes for one rendered scene; returns the entries
/// in manifest order.
std::vector<ArtifactEntry> write_scene_artifacts(const SceneRecord& scene,
                                                 const RenderOutput& render,
                                                 const std::filesystem::path& dir);

/// Assembles, renders and writes one scene plus its manifest. Nothing is
/// written when assembly or rendering throws.
std::filesystem::path generate_scene(std::uint64_t seed, const SceneConfig& config,
                                     const RenderOptions& render,
                                     const std::filesystem::path& dir);

struct GenerateOptions {
  SceneConfig config;
  RenderOptions render;
  /// Scenes processed concurrently; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

BatchResult generate_batch(std::span<const std::uint64_t> seeds, const GenerateOptions& options,
                           const std::filesystem::path& out_dir);

/// Regenerates every manifest into `out_dir`, optionally at a new resolution.
BatchResult render_manifests(std::span<const std::filesystem::path> manifests,
                             const std::filesystem::path& out_dir,
                             std::optional<std::pair<Index, Index>> resolution = {},
                             unsigned jobs = 0);

/// Regenerates the scene of `manifest` into `scratch_dir` and lists every file
/// whose hash differs from the recorded one (empty when the replay is exact).
std::vector<std::string> verify_replay(const std::filesystem::path& manifest,
                                       const std::filesystem::path& scratch_dir);

/// Manifests in `dir`, ascending by seed.
std::vector<std::filesystem::path> find_manifests(const std::filesystem::path& dir);

struct EvalOptions {
  EvalMode mode = EvalMode::kVesselScale;
  std::vector<int> dilations;
  ScaleOptions scale;
  unsigned jobs = 0;
};

/// Rows for vessel and content (plus opening in segmentation mode) of every
/// manifest under `gt_dir`; predictions are looked up in `pred_dir` under the
/// same file names.
ReportDocument evaluate_batch(const std::filesystem::path& pred_dir,
                              const std::filesystem::path& gt_dir, const EvalOptions& options);

/// 0 when every row was evaluated, 3 when some were not, 2 when none were.
int exit_code(const ReportDocument& doc);

/// Writes report.csv and report.txt into `dir`.
void write_report_files(const ReportDocument& doc, const std::filesystem::path& dir);

/// Loss between two XYZ PFMs over `mask` intersected with both validities
/// (validity alone when no mask is given).
LossReport loss_from_files(const std::filesystem::path& pred, const std::filesystem::path& gt,
                           const std::optional<std::filesystem::path>& mask, LossKind kind,
                           std::span<const int> dilations, const ScaleOptions& options = {});

LossKind parse_loss_kind(std::string_view text);
const char* to_string(LossKind kind);
std::string format_loss_report(LossKind kind, const LossReport& report);

/// Cleans a depth PFM with the camera recorded in `manifest` and writes the
/// result (and its validity PGM) to `out`.
void clean_depth_file(const std::filesystem::path& depth, const std::filesystem::path& mask,
                      const std::filesystem::path& manifest, const std::filesystem::path& out,
                      double max_distance);

/// "1-10,15,20" -> ascending unique seeds. InvalidArgument on bad syntax.
std::vector<std::uint64_t> parse_seeds(std::string_view text);
/// "1,2,4" -> dilations. InvalidArgument on bad syntax.
std::vector<int> parse_dilations(std::string_view text);
/// "256" or "320x240" (width x height).
std::pair<Index, Index> parse_resolution(std::string_view text);

}  // namespace xyzmap
