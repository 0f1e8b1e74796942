// xyzmap: generate synthetic vessel scenes, replay them, evaluate predictions.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 partial batch failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "xyzmap/pipeline.hpp"

namespace fs = std::filesystem;
using namespace xyzmap;

namespace {

int report_failures(const BatchResult& result, const fs::path& out_dir) {
  std::cout << "wrote " << result.written.size() << " scene(s) to " << out_dir.string() << '\n';
  if (!result.failures.empty()) {
    std::string list;
    for (const auto& f : result.failures) {
      list += "seed " + std::to_string(f.seed) + ": " + std::string(to_string(f.code)) + ": " +
              f.message + "\n";
    }
    std::cerr << result.failures.size() << " seed(s) failed:\n" << list;
    std::ofstream(out_dir / "failures.txt") << list;
  }
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic vessel scenes, XYZ-map losses and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string seeds_text, config_path, out_dir, resolution_text, dilations_text;
  unsigned jobs = 0;
  bool normals = false, render_ground = false;

  auto* generate = app.add_subcommand("generate", "Assemble, render and write scenes");
  generate->add_option("--seeds", seeds_text, "Seeds, e.g. 1-10,15")->required();
  generate->add_option("--config", config_path, "Scene config JSON")->check(CLI::ExistingFile);
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--resolution", resolution_text, "WIDTH or WIDTHxHEIGHT");
  generate->add_option("--jobs", jobs, "Scenes rendered in parallel (0 = all cores)");
  generate->add_flag("--normals", normals, "Also write camera-frame normal maps");
  generate->add_flag("--render-ground", render_ground, "Render the ground plane");

  std::vector<std::string> manifests;
  bool verify = false;
  auto* render = app.add_subcommand("render", "Regenerate scenes from manifests");
  render->add_option("--manifest", manifests, "Manifest files or directories")->required();
  render->add_option("--out", out_dir, "Output directory")->required();
  render->add_option("--resolution", resolution_text, "WIDTH or WIDTHxHEIGHT");
  render->add_option("--jobs", jobs, "Scenes rendered in parallel (0 = all cores)");
  render->add_flag("--verify", verify, "Check regenerated files against the manifest hashes");

  std::string pred_dir, gt_dir, mode_text = "vessel-scale";
  auto* eval = app.add_subcommand("eval", "Evaluate predictions against generated scenes");
  eval->add_option("--pred", pred_dir, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt_dir, "Directory with ground-truth manifests")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--mode", mode_text, "vessel-scale | content-scale | segmentation");
  eval->add_option("--dilations", dilations_text, "Pair dilations for K, e.g. 1,2,4");
  eval->add_option("--out", out_dir, "Write report.csv and report.txt here");
  eval->add_option("--jobs", jobs, "Scenes evaluated in parallel (0 = all cores)");

  std::string pred_map, gt_map, mask_path, kind_text = "scale-invariant";
  auto* loss = app.add_subcommand("loss", "Loss between two XYZ maps");
  loss->add_option("--pred", pred_map, "Predicted XYZ PFM")->required()->check(CLI::ExistingFile);
  loss->add_option("--gt", gt_map, "Ground-truth XYZ PFM")->required()->check(CLI::ExistingFile);
  loss->add_option("--mask", mask_path, "Mask PGM")->check(CLI::ExistingFile);
  loss->add_option("--kind", kind_text, "translation-invariant | scale-invariant");
  loss->add_option("--dilations", dilations_text, "Pair dilations, e.g. 1,2,4");
  int min_terms = ScaleOptions{}.min_positive_terms;
  loss->add_option("--min-scale-terms", min_terms, "Positive terms required to estimate K");

  std::string depth_path, manifest_path, out_path;
  double max_distance = 0.10;
  auto* clean = app.add_subcommand("clean-depth", "Drop masked depth far from the object centroid");
  clean->add_option("--depth", depth_path, "Depth PFM")->required()->check(CLI::ExistingFile);
  clean->add_option("--mask", mask_path, "Object mask PGM")->required()->check(CLI::ExistingFile);
  clean->add_option("--manifest", manifest_path, "Manifest with the camera")->required()->check(CLI::ExistingFile);
  clean->add_option("--out", out_path, "Output depth PFM")->required();
  clean->add_option("--max-distance", max_distance, "Meters from the centroid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Argument values that parse but make no sense are usage errors; anything
  // the library rejects afterwards is a data error.
  std::vector<std::uint64_t> seeds;
  std::vector<int> dilations;
  std::optional<std::pair<Index, Index>> resolution;
  EvalMode mode{};
  LossKind kind{};
  try {
    if (!seeds_text.empty()) seeds = parse_seeds(seeds_text);
    if (!dilations_text.empty()) dilations = parse_dilations(dilations_text);
    if (!resolution_text.empty()) resolution = parse_resolution(resolution_text);
    mode = parse_eval_mode(mode_text);
    kind = parse_loss_kind(kind_text);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*generate) {
      GenerateOptions options;
      if (!config_path.empty()) options.config = load_scene_config(config_path);
      if (resolution) {
        options.config.camera.width = resolution->first;
        options.config.camera.height = resolution->second;
      }
      options.render.normals = normals;
      options.render.render_ground = render_ground;
      options.jobs = jobs;
      return report_failures(generate_batch(seeds, options, out_dir), out_dir);
    }
    if (*render) {
      std::vector<fs::path> paths;
      for (const auto& m : manifests) {
        if (fs::is_directory(m)) {
          for (auto& p : find_manifests(m)) paths.push_back(p);
        } else {
          paths.emplace_back(m);
        }
      }
      if (verify) {
        int bad = 0;
        for (const auto& p : paths) {
          for (const auto& msg : verify_replay(p, out_dir)) {
            std::cerr << p.filename().string() << ": " << msg << '\n';
            ++bad;
          }
        }
        std::cout << paths.size() << " manifest(s) checked, " << bad << " mismatch(es)\n";
        return bad == 0 ? kExitOk : kExitData;
      }
      return report_failures(render_manifests(paths, out_dir, resolution, jobs), out_dir);
    }
    if (*eval) {
      EvalOptions options;
      options.mode = mode;
      options.dilations = dilations;
      options.jobs = jobs;
      const ReportDocument doc = evaluate_batch(pred_dir, gt_dir, options);
      write_text(std::cout, doc);
      if (!out_dir.empty()) write_report_files(doc, out_dir);
      return exit_code(doc);
    }
    if (*loss) {
      ScaleOptions options;
      options.min_positive_terms = min_terms;
      std::optional<fs::path> mask;
      if (!mask_path.empty()) mask = mask_path;
      const LossReport report = loss_from_files(pred_map, gt_map, mask, kind, dilations, options);
      std::cout << format_loss_report(kind, report);
      return kExitOk;
    }
    if (*clean) {
      clean_depth_file(depth_path, mask_path, manifest_path, out_path, max_distance);
      std::cout << "wrote " << out_path << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
