#include "xyzmap/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <variant>

namespace xyzmap {

namespace {

[[noreturn]] void bad_config(const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "config: " + what);
}

void check_object(const Json& j, const std::string& where) {
  if (!j.is_object()) bad_config(where + " must be an object");
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  check_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) bad_config("unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read_field(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad_config(where + "." + key + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad_config(where + "." + key + " must be an integer");
  } else {
    if (!v.is_number()) bad_config(where + "." + key + " must be a number");
  }
  out = v.get<T>();
}

void read_range(const Json& j, const char* key, Range& out, const std::string& where) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad_config(where + "." + key + " must be a [lo, hi] pair");
  }
  out = {v[0].get<double>(), v[1].get<double>()};
}

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

Json vector_json(const Eigen::Vector3d& v) { return Json::array({v[0], v[1], v[2]}); }

Eigen::Vector3d vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::kMalformedHeader, std::string(what) + " must have 3 entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json render_json(const RenderOptions& r) {
  Json j;
  j["mask_epsilon"] = r.mask_epsilon;
  j["normals"] = r.normals;
  j["render_ground"] = r.render_ground;
  return j;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return fnv1a_hex(bytes);
}

Json to_json(const SceneConfig& c) {
  const ProfileConfig& p = c.profile;
  Json profile;
  profile["min_terms"] = p.min_terms;
  profile["max_terms"] = p.max_terms;
  profile["use_linear"] = p.use_linear;
  profile["use_polynomial"] = p.use_polynomial;
  profile["use_sinusoidal"] = p.use_sinusoidal;
  profile["slope"] = range_json(p.slope);
  profile["min_degree"] = p.min_degree;
  profile["max_degree"] = p.max_degree;
  profile["poly_coefficient"] = range_json(p.poly_coefficient);
  profile["sin_amplitude"] = range_json(p.sin_amplitude);
  profile["sin_frequency"] = range_json(p.sin_frequency);
  profile["base_radius"] = range_json(p.base_radius);
  profile["height"] = range_json(p.height);
  profile["samples"] = p.samples;
  profile["min_radius"] = p.min_radius;
  profile["max_attempts"] = p.max_attempts;

  Json camera;
  camera["distance"] = range_json(c.camera.distance);
  camera["elevation_deg"] = range_json(c.camera.elevation_deg);
  camera["azimuth_deg"] = range_json(c.camera.azimuth_deg);
  camera["fov_deg"] = range_json(c.camera.fov_deg);
  camera["width"] = c.camera.width;
  camera["height"] = c.camera.height;

  Json j;
  j["profile"] = std::move(profile);
  j["camera"] = std::move(camera);
  j["fill_fraction"] = range_json(c.fill_fraction);
  j["angular_segments"] = c.angular_segments;
  j["vertical_segments"] = c.vertical_segments;
  j["wall_clearance"] = c.wall_clearance;
  return j;
}

SceneConfig scene_config_from_json(const Json& j) {
  SceneConfig c;
  check_keys(j, {"profile", "camera", "fill_fraction", "angular_segments", "vertical_segments",
                 "wall_clearance"},
             "config");
  if (j.contains("profile")) {
    const Json& p = j.at("profile");
    check_keys(p, {"min_terms", "max_terms", "use_linear", "use_polynomial", "use_sinusoidal",
                   "slope", "min_degree", "max_degree", "poly_coefficient", "sin_amplitude",
                   "sin_frequency", "base_radius", "height", "samples", "min_radius",
                   "max_attempts"},
               "profile");
    ProfileConfig& o = c.profile;
    read_field(p, "min_terms", o.min_terms, "profile");
    read_field(p, "max_terms", o.max_terms, "profile");
    read_field(p, "use_linear", o.use_linear, "profile");
    read_field(p, "use_polynomial", o.use_polynomial, "profile");
    read_field(p, "use_sinusoidal", o.use_sinusoidal, "profile");
    read_range(p, "slope", o.slope, "profile");
    read_field(p, "min_degree", o.min_degree, "profile");
    read_field(p, "max_degree", o.max_degree, "profile");
    read_range(p, "poly_coefficient", o.poly_coefficient, "profile");
    read_range(p, "sin_amplitude", o.sin_amplitude, "profile");
    read_range(p, "sin_frequency", o.sin_frequency, "profile");
    read_range(p, "base_radius", o.base_radius, "profile");
    read_range(p, "height", o.height, "profile");
    read_field(p, "samples", o.samples, "profile");
    read_field(p, "min_radius", o.min_radius, "profile");
    read_field(p, "max_attempts", o.max_attempts, "profile");
  }
  if (j.contains("camera")) {
    const Json& cam = j.at("camera");
    check_keys(cam, {"distance", "elevation_deg", "azimuth_deg", "fov_deg", "width", "height"},
               "camera");
    read_range(cam, "distance", c.camera.distance, "camera");
    read_range(cam, "elevation_deg", c.camera.elevation_deg, "camera");
    read_range(cam, "azimuth_deg", c.camera.azimuth_deg, "camera");
    read_range(cam, "fov_deg", c.camera.fov_deg, "camera");
    read_field(cam, "width", c.camera.width, "camera");
    read_field(cam, "height", c.camera.height, "camera");
  }
  read_range(j, "fill_fraction", c.fill_fraction, "config");
  read_field(j, "angular_segments", c.angular_segments, "config");
  read_field(j, "vertical_segments", c.vertical_segments, "config");
  read_field(j, "wall_clearance", c.wall_clearance, "config");
  validate(c);
  return c;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return scene_config_from_json(j);
}

Json to_json(const PinholeCamera& cam) {
  Json j;
  j["fx"] = cam.fx();
  j["fy"] = cam.fy();
  j["cx"] = cam.cx();
  j["cy"] = cam.cy();
  j["width"] = cam.width();
  j["height"] = cam.height();
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vector_json(cam.rotation().row(r).transpose()));
  j["rotation"] = std::move(rows);
  j["translation"] = vector_json(cam.translation());
  return j;
}

PinholeCamera camera_from_json(const Json& j) {
  try {
    Eigen::Matrix3d rotation;
    const Json& rows = j.at("rotation");
    if (!rows.is_array() || rows.size() != 3) fail(ErrorCode::kMalformedHeader, "rotation must have 3 rows");
    for (int r = 0; r < 3; ++r) rotation.row(r) = vector_from_json(rows[r], "rotation row").transpose();
    return PinholeCamera(j.at("fx").get<double>(), j.at("fy").get<double>(),
                         j.at("cx").get<double>(), j.at("cy").get<double>(),
                         j.at("width").get<Index>(), j.at("height").get<Index>(), rotation,
                         vector_from_json(j.at("translation"), "translation"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, std::string("camera: ") + e.what());
  }
}

Json to_json(const MaterialVector& m) {
  Json j;
  j["rgb"] = Json::array({m.rgb[0], m.rgb[1], m.rgb[2]});
  j["transmission"] = m.transmission;
  j["roughness"] = m.roughness;
  j["metallic"] = m.metallic;
  j["ior"] = m.ior;
  j["ior_physical"] = m.ior_physical();
  return j;
}

Json to_json(const VesselProfile& profile) {
  Json terms = Json::array();
  for (const auto& term : profile.terms()) {
    Json t;
    if (const auto* lin = std::get_if<LinearTerm>(&term)) {
      t["type"] = "linear";
      t["slope"] = lin->slope;
    } else if (const auto* poly = std::get_if<PolynomialTerm>(&term)) {
      t["type"] = "polynomial";
      t["coefficient"] = poly->coefficient;
      t["degree"] = poly->degree;
    } else {
      const auto& sine = std::get<SinusoidalTerm>(term);
      t["type"] = "sinusoidal";
      t["amplitude"] = sine.amplitude;
      t["frequency"] = sine.frequency;
      t["phase"] = sine.phase;
    }
    terms.push_back(std::move(t));
  }
  Json j;
  j["base_radius"] = profile.base_radius();
  j["height"] = profile.height();
  j["samples"] = profile.samples();
  j["min_radius"] = profile.min_radius();
  j["terms"] = std::move(terms);
  return j;
}

const ArtifactEntry* SceneManifest::find(std::string_view role, std::string_view kind) const {
  for (const auto& f : files) {
    if (f.role == role && f.kind == kind) return &f;
  }
  return nullptr;
}

Json manifest_json(const SceneRecord& scene, const SceneConfig& config,
                   const RenderOptions& render, const std::vector<ArtifactEntry>& files) {
  Json j;
  j["format_version"] = kManifestFormatVersion;
  j["tool_version"] = kToolVersion;
  j["seed"] = scene.seed;
  j["config"] = to_json(config);
  j["render"] = render_json(render);
  j["camera"] = to_json(scene.camera);
  j["profile"] = to_json(scene.profile);
  j["fill_fraction"] = scene.fill_fraction;
  Json materials;
  materials["vessel"] = to_json(scene.vessel_material);
  materials["content"] = to_json(scene.content_material);
  j["materials"] = std::move(materials);
  Json meshes;
  meshes["angular_segments"] = scene.angular_segments;
  meshes["vertical_segments"] = scene.vertical_segments;
  meshes["vessel_triangles"] = scene.vessel.triangles.size();
  meshes["content_triangles"] = scene.content.triangles.size();
  meshes["opening_triangles"] = scene.opening.triangles.size();
  j["meshes"] = std::move(meshes);
  Json list = Json::array();
  for (const auto& f : files) {
    Json e;
    e["role"] = f.role;
    e["kind"] = f.kind;
    e["path"] = f.path;
    e["fnv1a64"] = f.hash;
    list.push_back(std::move(e));
  }
  j["files"] = std::move(list);
  return j;
}

SceneManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open manifest " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kMalformedHeader, path.string() + ": " + e.what());
  }
  SceneManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      fail(ErrorCode::kMalformedHeader, path.string() + ": unsupported format_version " +
                                            std::to_string(m.format_version));
    }
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = scene_config_from_json(j.at("config"));
    const Json& r = j.at("render");
    m.render.mask_epsilon = r.at("mask_epsilon").get<double>();
    m.render.normals = r.at("normals").get<bool>();
    m.render.render_ground = r.at("render_ground").get<bool>();
    m.camera = camera_from_json(j.at("camera"));
    for (const auto& e : j.at("files")) {
      m.files.push_back({e.at("role").get<std::string>(), e.at("kind").get<std::string>(),
                         e.at("path").get<std::string>(), e.at("fnv1a64").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedHeader, path.string() + ": " + e.what());
  }
  return m;
}

std::string manifest_name(std::uint64_t seed) { return std::to_string(seed) + "_manifest.json"; }

std::string artifact_name(std::uint64_t seed, std::string_view role, std::string_view kind,
                          std::string_view ext) {
  return std::to_string(seed) + "_" + std::string(role) + "_" + std::string(kind) + "." +
         std::string(ext);
}

}  // namespace xyzmap
