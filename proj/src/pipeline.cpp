#include "xyzmap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "xyzmap/image_io.hpp"

namespace xyzmap {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRoles[] = {"vessel", "content", "opening"};

unsigned resolve_jobs(unsigned jobs, std::size_t items) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(items, 1)));
}

/// Calls fn(i) for i in [0, n) on `jobs` threads pulling from a shared counter.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = resolve_jobs(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

ArtifactEntry entry(const fs::path& dir, std::string role, std::string kind, const fs::path& file) {
  return {std::move(role), std::move(kind), file.filename().string(), file_hash(dir / file.filename())};
}

/// Runs one batch item, turning library errors into a failure record.
template <typename Fn>
std::optional<SeedFailure> isolate(std::uint64_t seed, Fn&& fn) {
  try {
    fn();
    return std::nullopt;
  } catch (const Error& e) {
    return SeedFailure{seed, e.code(), e.what()};
  } catch (const std::exception& e) {
    return SeedFailure{seed, ErrorCode::kIoError, e.what()};
  }
}

BatchResult collect(std::span<const std::uint64_t> seeds,
                    const std::vector<std::optional<SeedFailure>>& outcomes) {
  BatchResult result;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (outcomes[i]) {
      result.failures.push_back(*outcomes[i]);
    } else {
      result.written.push_back(seeds[i]);
    }
  }
  return result;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorCode::kInvalidArgument, "bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

SegMask intersect_valid(const SegMask& mask, const MaskArray& a, const MaskArray& b) {
  require_same_size(mask.height(), mask.width(), a.rows(), a.cols(), "mask vs prediction");
  require_same_size(mask.height(), mask.width(), b.rows(), b.cols(), "mask vs ground truth");
  return SegMask(MaskArray(mask.values() && a && b));
}

struct ObjectMaps {
  XyzMapd pred;
  XyzMapd gt;
  SegMask mask;
};

ReportRow make_row(std::uint64_t seed, const char* object) {
  ReportRow row;
  row.seed = seed;
  row.object = object;
  return row;
}

void mark_failed(ReportRow& row, const std::exception& e) {
  row.status = RowStatus::kFailed;
  row.message = e.what();
}

std::vector<ReportRow> evaluate_geometry(const SceneManifest& m, const fs::path& pred_dir,
                                         const fs::path& gt_dir, const EvalOptions& options) {
  std::vector<ReportRow> rows{make_row(m.seed, "vessel"), make_row(m.seed, "content")};
  std::optional<ObjectMaps> maps[2];
  for (int i = 0; i < 2; ++i) {
    ReportRow& row = rows[i];
    const ArtifactEntry* xyz = m.find(row.object, "xyz");
    const ArtifactEntry* mask = m.find(row.object, "mask");
    if (!xyz || !mask) {
      row.status = RowStatus::kFailed;
      row.message = "manifest lists no " + row.object + " xyz/mask";
      continue;
    }
    if (!fs::exists(pred_dir / xyz->path)) {
      row.status = RowStatus::kMissing;
      row.message = std::string(to_string(ErrorCode::kMissingPrediction)) + ": " + xyz->path;
      continue;
    }
    try {
      auto pred = read_xyz_pfm<double>(pred_dir / xyz->path);
      auto gt = read_xyz_pfm<double>(gt_dir / xyz->path);
      SegMask region = intersect_valid(read_pgm(gt_dir / mask->path), pred.validity(), gt.validity());
      maps[i] = ObjectMaps{std::move(pred), std::move(gt), std::move(region)};
    } catch (const std::exception& e) {
      mark_failed(row, e);
    }
  }

  std::optional<Alignment> vessel_alignment;
  for (int i = 0; i < 2; ++i) {
    ReportRow& row = rows[i];
    if (!maps[i]) continue;
    try {
      const ObjectMaps& o = *maps[i];
      Alignment a;
      if (i == 1 && options.mode == EvalMode::kVesselScale) {
        if (!vessel_alignment) {
          row.status = rows[0].status == RowStatus::kMissing ? RowStatus::kMissing : RowStatus::kFailed;
          row.message = "vessel-scale alignment unavailable: " + rows[0].message;
          continue;
        }
        a = *vessel_alignment;
      } else {
        a = estimate_alignment(o.pred, o.gt, o.mask, options.dilations, options.scale);
        if (i == 0) vessel_alignment = a;
      }
      row.eval = evaluate_points(apply_alignment(o.pred, a, o.mask), o.gt, o.mask);
    } catch (const std::exception& e) {
      mark_failed(row, e);
    }
  }
  return rows;
}

std::vector<ReportRow> evaluate_segmentation(const SceneManifest& m, const fs::path& pred_dir,
                                             const fs::path& gt_dir) {
  std::vector<ReportRow> rows;
  for (const char* role : kRoles) {
    ReportRow row = make_row(m.seed, role);
    const ArtifactEntry* mask = m.find(role, "mask");
    if (!mask) {
      row.status = RowStatus::kFailed;
      row.message = std::string("manifest lists no ") + role + " mask";
    } else if (!fs::exists(pred_dir / mask->path)) {
      row.status = RowStatus::kMissing;
      row.message = std::string(to_string(ErrorCode::kMissingPrediction)) + ": " + mask->path;
    } else {
      try {
        row.seg = seg_eval(read_pgm(pred_dir / mask->path), read_pgm(gt_dir / mask->path));
      } catch (const std::exception& e) {
        mark_failed(row, e);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int BatchResult::exit_code() const {
  if (failures.empty()) return kExitOk;
  return written.empty() ? kExitData : kExitPartial;
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fail(ErrorCode::kIoError, "cannot create output directory " + dir.string() +
                                  (ec ? ": " + ec.message() : ""));
  }
  const fs::path probe = dir / ".xyzmap_write_probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out || !(out << "probe")) {
      fail(ErrorCode::kIoError, "output directory is not writable: " + dir.string());
    }
  }
  fs::remove(probe, ec);
}

std::vector<ArtifactEntry> write_scene_artifacts(const SceneRecord& scene,
                                                 const RenderOutput& render, const fs::path& dir) {
  const DepthMapd* depth[] = {&render.vessel_depth, &render.content_depth, &render.opening_depth};
  const XyzMapd* xyz[] = {&render.vessel_xyz, &render.content_xyz, &render.opening_xyz};
  const SegMask* mask[] = {&render.vessel_mask, &render.content_mask, &render.opening_mask};
  const TriMesh* mesh[] = {&scene.vessel, &scene.content, &scene.opening};

  std::vector<ArtifactEntry> files;
  for (int i = 0; i < 3; ++i) {
    const std::string role = kRoles[i];
    const fs::path depth_path = dir / artifact_name(scene.seed, role, "depth", "pfm");
    write_pfm(depth_path, *depth[i]);
    files.push_back(entry(dir, role, "depth", depth_path));
    files.push_back(entry(dir, role, "depth-validity", validity_path(depth_path)));

    const fs::path xyz_path = dir / artifact_name(scene.seed, role, "xyz", "pfm");
    write_pfm(xyz_path, *xyz[i]);
    files.push_back(entry(dir, role, "xyz", xyz_path));
    files.push_back(entry(dir, role, "xyz-validity", validity_path(xyz_path)));

    const fs::path mask_path = dir / artifact_name(scene.seed, role, "mask", "pgm");
    write_pgm(mask_path, *mask[i]);
    files.push_back(entry(dir, role, "mask", mask_path));

    const fs::path mesh_path = dir / artifact_name(scene.seed, role, "mesh", "obj");
    write_obj(mesh_path, *mesh[i]);
    files.push_back(entry(dir, role, "mesh", mesh_path));
  }
  if (render.normals) {
    const fs::path path = dir / artifact_name(scene.seed, "scene", "normals", "pfm");
    write_pfm(path, *render.normals);
    files.push_back(entry(dir, "scene", "normals", path));
    files.push_back(entry(dir, "scene", "normals-validity", validity_path(path)));
  }
  return files;
}

fs::path generate_scene(std::uint64_t seed, const SceneConfig& config, const RenderOptions& render,
                        const fs::path& dir) {
  const SceneRecord scene = assemble_scene(seed, config);
  const RenderOutput out = render_scene(scene, render);
  prepare_output_dir(dir);
  const auto files = write_scene_artifacts(scene, out, dir);
  const fs::path manifest = dir / manifest_name(seed);
  write_text_file(manifest, manifest_json(scene, config, render, files).dump(2) + "\n");
  return manifest;
}

BatchResult generate_batch(std::span<const std::uint64_t> seeds, const GenerateOptions& options,
                           const fs::path& out_dir) {
  validate(options.config);
  prepare_output_dir(out_dir);
  RenderOptions render = options.render;
  if (resolve_jobs(options.jobs, seeds.size()) > 1) render.threads = 1;
  std::vector<std::optional<SeedFailure>> outcomes(seeds.size());
  parallel_for(seeds.size(), options.jobs, [&](std::size_t i) {
    outcomes[i] = isolate(seeds[i], [&] { generate_scene(seeds[i], options.config, render, out_dir); });
  });
  return collect(seeds, outcomes);
}

BatchResult render_manifests(std::span<const fs::path> manifests, const fs::path& out_dir,
                             std::optional<std::pair<Index, Index>> resolution, unsigned jobs) {
  prepare_output_dir(out_dir);
  std::vector<std::uint64_t> seeds(manifests.size());
  std::vector<std::optional<SeedFailure>> outcomes(manifests.size());
  const bool parallel = resolve_jobs(jobs, manifests.size()) > 1;
  parallel_for(manifests.size(), jobs, [&](std::size_t i) {
    outcomes[i] = isolate(0, [&] {
      SceneManifest m = read_manifest(manifests[i]);
      seeds[i] = m.seed;
      if (resolution) {
        m.config.camera.width = resolution->first;
        m.config.camera.height = resolution->second;
      }
      if (parallel) m.render.threads = 1;
      generate_scene(m.seed, m.config, m.render, out_dir);
    });
    if (outcomes[i]) outcomes[i]->seed = seeds[i];
  });
  return collect(seeds, outcomes);
}

std::vector<std::string> verify_replay(const fs::path& manifest, const fs::path& scratch_dir) {
  const SceneManifest m = read_manifest(manifest);
  prepare_output_dir(scratch_dir);
  const fs::path replayed = generate_scene(m.seed, m.config, m.render, scratch_dir);
  std::vector<std::string> mismatches;
  for (const auto& f : m.files) {
    const fs::path path = scratch_dir / f.path;
    if (!fs::exists(path)) {
      mismatches.push_back(f.path + ": not regenerated");
    } else if (file_hash(path) != f.hash) {
      mismatches.push_back(f.path + ": hash differs");
    }
  }
  if (file_hash(replayed) != file_hash(manifest)) {
    mismatches.push_back(manifest.filename().string() + ": manifest differs");
  }
  return mismatches;
}

std::vector<fs::path> find_manifests(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIoError, "not a directory: " + dir.string());
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  const std::string suffix = "_manifest.json";
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (!e.is_regular_file() || name.size() <= suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    const std::string_view stem(name.data(), name.size() - suffix.size());
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), seed);
    if (ec != std::errc() || ptr != stem.data() + stem.size()) continue;
    found.emplace_back(seed, e.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [seed, path] : found) out.push_back(std::move(path));
  return out;
}

ReportDocument evaluate_batch(const fs::path& pred_dir, const fs::path& gt_dir,
                              const EvalOptions& options) {
  const auto manifests = find_manifests(gt_dir);
  if (manifests.empty()) fail(ErrorCode::kIoError, "no manifests in " + gt_dir.string());
  if (!fs::is_directory(pred_dir)) fail(ErrorCode::kIoError, "not a directory: " + pred_dir.string());

  std::vector<std::vector<ReportRow>> per_scene(manifests.size());
  parallel_for(manifests.size(), options.jobs, [&](std::size_t i) {
    try {
      const SceneManifest m = read_manifest(manifests[i]);
      per_scene[i] = options.mode == EvalMode::kSegmentation
                         ? evaluate_segmentation(m, pred_dir, gt_dir)
                         : evaluate_geometry(m, pred_dir, gt_dir, options);
    } catch (const std::exception& e) {
      ReportRow row = make_row(0, "manifest");
      mark_failed(row, e);
      row.message = manifests[i].filename().string() + ": " + row.message;
      per_scene[i] = {row};
    }
  });

  ReportDocument doc;
  doc.mode = options.mode;
  doc.tool_version = kToolVersion;
  for (auto& rows : per_scene) {
    for (auto& r : rows) doc.rows.push_back(std::move(r));
  }
  finalize(doc);
  return doc;
}

int exit_code(const ReportDocument& doc) {
  const auto ok = doc.count(RowStatus::kOk);
  if (ok == static_cast<std::int64_t>(doc.rows.size())) return kExitOk;
  return ok == 0 ? kExitData : kExitPartial;
}

void write_report_files(const ReportDocument& doc, const fs::path& dir) {
  prepare_output_dir(dir);
  std::ostringstream csv, text;
  write_csv(csv, doc);
  write_text(text, doc);
  write_text_file(dir / "report.csv", csv.str());
  write_text_file(dir / "report.txt", text.str());
}

LossReport loss_from_files(const fs::path& pred_path, const fs::path& gt_path,
                           const std::optional<fs::path>& mask_path, LossKind kind,
                           std::span<const int> dilations, const ScaleOptions& options) {
  const XyzMapd pred = read_xyz_pfm<double>(pred_path);
  const XyzMapd gt = read_xyz_pfm<double>(gt_path);
  require_same_size(pred.height(), pred.width(), gt.height(), gt.width(), "prediction vs ground truth");
  const SegMask base = mask_path ? read_pgm(*mask_path)
                                 : SegMask(MaskArray::Constant(gt.height(), gt.width(), true));
  const SegMask region = intersect_valid(base, pred.validity(), gt.validity());
  const PairSet pairs = dilations.empty() ? build_pair_set(region) : build_pair_set(region, dilations);
  return kind == LossKind::kTranslationInvariant ? translation_invariant_loss(pred, gt, pairs)
                                                 : scale_invariant_loss(pred, gt, pairs, options);
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "translation" || text == "translation-invariant") return LossKind::kTranslationInvariant;
  if (text == "scale" || text == "scale-invariant") return LossKind::kScaleInvariant;
  fail(ErrorCode::kInvalidArgument, "unknown loss kind '" + std::string(text) + "'");
}

const char* to_string(LossKind kind) {
  return kind == LossKind::kTranslationInvariant ? "translation-invariant" : "scale-invariant";
}

std::string format_loss_report(LossKind kind, const LossReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "kind: " << to_string(kind) << '\n';
  out << "value: " << r.value << '\n';
  if (r.k_used) {
    out << "k: " << r.k_used->k << '\n';
    out << "k_terms: " << r.k_used->valid_pair_count << '\n';
  } else {
    out << "k: none\n";
  }
  out << "control_term: " << (r.control_term_active ? "true" : "false") << '\n';
  out << "pair_count: " << r.pair_count << '\n';
  return out.str();
}

void clean_depth_file(const fs::path& depth_path, const fs::path& mask_path,
                      const fs::path& manifest, const fs::path& out, double max_distance) {
  const SceneManifest m = read_manifest(manifest);
  const DepthMapd depth = read_depth_pfm<double>(depth_path);
  const DepthMapd cleaned = clean_depth(depth, m.camera, read_pgm(mask_path), max_distance);
  write_pfm(out, cleaned);
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (std::string_view part : split(text, ',')) {
    const std::size_t dash = part.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(parse_u64(part, "seed"));
      continue;
    }
    const std::uint64_t lo = parse_u64(part.substr(0, dash), "seed range");
    const std::uint64_t hi = parse_u64(part.substr(dash + 1), "seed range");
    if (hi < lo) fail(ErrorCode::kInvalidArgument, "descending seed range '" + std::string(part) + "'");
    if (hi - lo >= 10'000'000) fail(ErrorCode::kInvalidArgument, "seed range too large");
    for (std::uint64_t s = lo;; ++s) {
      seeds.push_back(s);
      if (s == hi) break;
    }
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

std::vector<int> parse_dilations(std::string_view text) {
  std::vector<int> out;
  for (std::string_view part : split(text, ',')) {
    const std::uint64_t v = parse_u64(part, "dilation");
    if (v == 0 || v > 1'000'000) fail(ErrorCode::kInvalidArgument, "dilation out of range");
    if (!out.empty() && int(v) <= out.back()) {
      fail(ErrorCode::kInvalidArgument, "dilations must be strictly increasing");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::pair<Index, Index> parse_resolution(std::string_view text) {
  const std::size_t x = text.find('x');
  const std::uint64_t w = parse_u64(text.substr(0, x), "resolution");
  const std::uint64_t h = x == std::string_view::npos ? w : parse_u64(text.substr(x + 1), "resolution");
  if (w == 0 || h == 0 || w > 16384 || h > 16384) {
    fail(ErrorCode::kInvalidArgument, "resolution out of range");
  }
  return {static_cast<Index>(w), static_cast<Index>(h)};
}

}  // namespace xyzmap
