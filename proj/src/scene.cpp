#include "xyzmap/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xyzmap {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    fail(ErrorCode::kInvalidArgument, std::string("invalid range for ") + name);
  }
}

MaterialVector draw_material(Rng& rng) {
  MaterialVector m;
  for (double& c : m.rgb) c = rng.uniform(0.0, 1.0);
  m.transmission = rng.uniform(0.0, 1.0);
  m.roughness = rng.uniform(0.0, 1.0);
  m.metallic = rng.uniform(0.0, 1.0);
  m.ior = MaterialVector::normalize_ior(rng.uniform(MaterialVector::kIorMin, MaterialVector::kIorMax));
  return m;
}

bool same_camera(const PinholeCamera& a, const PinholeCamera& b) {
  return a.fx() == b.fx() && a.fy() == b.fy() && a.cx() == b.cx() && a.cy() == b.cy() &&
         a.width() == b.width() && a.height() == b.height() && a.rotation() == b.rotation() &&
         a.translation() == b.translation();
}

}  // namespace

void validate(const SceneConfig& c) {
  validate(c.profile);
  check_range(c.camera.distance, "camera.distance");
  check_range(c.camera.elevation_deg, "camera.elevation_deg");
  check_range(c.camera.azimuth_deg, "camera.azimuth_deg");
  check_range(c.camera.fov_deg, "camera.fov_deg");
  check_range(c.fill_fraction, "fill_fraction");
  if (!(c.camera.distance.lo > 0)) fail(ErrorCode::kInvalidArgument, "camera distance must be > 0");
  if (!(c.camera.fov_deg.lo > 0 && c.camera.fov_deg.hi < 180)) {
    fail(ErrorCode::kInvalidArgument, "field of view must lie in (0, 180) degrees");
  }
  if (!(c.camera.elevation_deg.lo > -90 && c.camera.elevation_deg.hi < 90)) {
    fail(ErrorCode::kInvalidArgument, "elevation must lie in (-90, 90) degrees");
  }
  if (c.camera.width < 1 || c.camera.height < 1) fail(ErrorCode::kInvalidResolution, "empty image");
  if (!(c.fill_fraction.lo >= 0 && c.fill_fraction.hi <= 1)) {
    fail(ErrorCode::kInvalidArgument, "fill_fraction range must lie in [0, 1]");
  }
  if (c.angular_segments < 3 || c.vertical_segments < 2) {
    fail(ErrorCode::kInvalidResolution, "mesh resolution too low");
  }
  if (!(c.wall_clearance >= 0)) fail(ErrorCode::kInvalidArgument, "negative wall clearance");
}

bool operator==(const SceneRecord& a, const SceneRecord& b) {
  return a.seed == b.seed && same_camera(a.camera, b.camera) && a.profile == b.profile &&
         a.angular_segments == b.angular_segments && a.vertical_segments == b.vertical_segments &&
         a.vessel == b.vessel && a.content == b.content && a.opening == b.opening &&
         a.ground == b.ground && a.vessel_material == b.vessel_material &&
         a.content_material == b.content_material && a.fill_fraction == b.fill_fraction;
}

SceneRecord assemble_scene(std::uint64_t seed, const SceneConfig& config) {
  validate(config);
  Rng rng(seed);
  SceneRecord scene;
  scene.seed = seed;
  scene.profile = generate_profile(rng, config.profile);
  scene.angular_segments = config.angular_segments;
  scene.vertical_segments = config.vertical_segments;
  scene.fill_fraction = rng.uniform(config.fill_fraction.lo, config.fill_fraction.hi);
  scene.vessel = profile_to_mesh(scene.profile, config.angular_segments, config.vertical_segments);
  scene.content = flat_liquid_fill(scene.profile, scene.fill_fraction, config.angular_segments,
                                   config.vertical_segments, config.wall_clearance);
  scene.opening = opening_plane(scene.profile, config.angular_segments);
  scene.vessel_material = draw_material(rng);
  scene.content_material = draw_material(rng);

  const CameraConfig& cc = config.camera;
  const double distance = rng.uniform(cc.distance.lo, cc.distance.hi);
  const double elevation = rng.uniform(cc.elevation_deg.lo, cc.elevation_deg.hi) * kDegToRad;
  const double azimuth = rng.uniform(cc.azimuth_deg.lo, cc.azimuth_deg.hi) * kDegToRad;
  const double fov = rng.uniform(cc.fov_deg.lo, cc.fov_deg.hi) * kDegToRad;

  const Eigen::Vector3d target(0.0, 0.5 * scene.profile.height(), 0.0);
  const Eigen::Vector3d eye =
      target + distance * Eigen::Vector3d(std::cos(elevation) * std::cos(azimuth),
                                          std::sin(elevation),
                                          std::cos(elevation) * std::sin(azimuth));
  const double focal = double(cc.width) / (2.0 * std::tan(0.5 * fov));
  scene.camera = PinholeCamera::look_at(focal, focal, 0.5 * double(cc.width),
                                        0.5 * double(cc.height), cc.width, cc.height, eye, target);
  return scene;
}

std::vector<std::string> check_scene_invariants(const SceneRecord& scene, int containment_samples,
                                                double tolerance) {
  std::vector<std::string> errors;
  const double height = scene.profile.height();
  const double rim = scene.profile.radius(height);
  const int segments = scene.angular_segments;

  if (!(scene.profile.min_radius() > 0)) errors.push_back("profile radius not positive");

  try {
    scene.vessel.validate();
    if (!scene.content.empty()) scene.content.validate();
    scene.opening.validate();
  } catch (const Error& e) {
    errors.push_back(e.what());
    return errors;
  }

  for (const auto& [edge, count] : edge_incidence(scene.vessel)) {
    const bool on_rim = scene.vessel.vertices[edge.first].y() == height &&
                        scene.vessel.vertices[edge.second].y() == height;
    if (count != (on_rim ? 1 : 2)) {
      errors.push_back("vessel edge shared by " + std::to_string(count) + " triangles");
      break;
    }
  }
  for (const auto& [edge, count] : edge_incidence(scene.content)) {
    if (count != 2) {
      errors.push_back("content mesh is not closed");
      break;
    }
  }

  for (const auto& v : scene.opening.vertices) {
    if (v.y() != height) {
      errors.push_back("opening vertex off the rim height");
      break;
    }
    const double r = std::hypot(v.x(), v.z());
    if (r > 1e-15 && std::abs(r - rim) > 1e-12) {
      errors.push_back("opening radius differs from the rim radius");
      break;
    }
  }

  if (!scene.content.empty()) {
    const TriMesh& mesh = scene.content;
    std::vector<double> cumulative;
    double total = 0.0;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
      total += mesh.triangle_area(i);
      cumulative.push_back(total);
    }
    Rng rng(scene.seed ^ 0x9e3779b97f4a7c15ULL);
    const double half_sector = std::numbers::pi / segments;
    for (int s = 0; s < containment_samples; ++s) {
      const double pick = rng.uniform(0.0, total);
      const std::size_t tri = std::min<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin(),
          mesh.triangles.size() - 1);
      double u = rng.uniform(0.0, 1.0), v = rng.uniform(0.0, 1.0);
      if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
      }
      const auto& t = mesh.triangles[tri];
      const Eigen::Vector3d p = mesh.vertices[t[0]] + u * (mesh.vertices[t[1]] - mesh.vertices[t[0]]) +
                                v * (mesh.vertices[t[2]] - mesh.vertices[t[0]]);
      if (p.y() < -tolerance || p.y() > height + tolerance) {
        errors.push_back("content point outside the vessel height range");
        break;
      }
      // Vessel wall at this height and angle: the polygon inscribed in the
      // ring circle.
      double phi = std::atan2(p.z(), p.x());
      if (phi < 0) phi += 2.0 * std::numbers::pi;
      const double sector = std::floor(phi / (2.0 * half_sector));
      const double offset = phi - (2.0 * sector + 1.0) * half_sector;
      const double wall = ring_radius(scene.profile, scene.vertical_segments, p.y()) *
                          std::cos(half_sector) / std::cos(offset);
      if (std::hypot(p.x(), p.z()) > wall + tolerance) {
        errors.push_back("content point outside the vessel wall");
        break;
      }
    }
  }
  return errors;
}

}  // namespace xyzmap
