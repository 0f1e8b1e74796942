#pragma once

// Randomized scene assembly: one vessel with a flat liquid fill, its opening
// disk, random materials and a random camera looking at the vessel.

#include <cstdint>
#include <string>
#include <vector>

#include "xyzmap/geometry.hpp"
#include "xyzmap/mesh.hpp"
#include "xyzmap/metrics.hpp"
#include "xyzmap/profile.hpp"

namespace xyzmap {

struct CameraConfig {
  Range distance{0.3, 0.6};       // meters from the vessel centroid
  Range elevation_deg{10.0, 50.0};
  Range azimuth_deg{0.0, 360.0};
  Range fov_deg{45.0, 60.0};      // horizontal field of view
  Index width = 256;
  Index height = 256;

  friend bool operator==(const CameraConfig&, const CameraConfig&) = default;
};

struct SceneConfig {
  ProfileConfig profile;
  CameraConfig camera;
  Range fill_fraction{0.1, 0.9};
  int angular_segments = kDefaultAngularSegments;
  int vertical_segments = kDefaultVerticalSegments;
  double wall_clearance = kDefaultWallClearance;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

void validate(const SceneConfig& config);

/// Horizontal ground plane n . x = offset.
struct GroundPlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
  double offset = 0.0;

  friend bool operator==(const GroundPlane&, const GroundPlane&) = default;
};

struct SceneRecord {
  std::uint64_t seed = 0;
  PinholeCamera camera;
  VesselProfile profile{{}, 0.05, 0.1, 2};
  int angular_segments = kDefaultAngularSegments;
  int vertical_segments = kDefaultVerticalSegments;
  TriMesh vessel;
  TriMesh content;
  TriMesh opening;
  GroundPlane ground;
  MaterialVector vessel_material;
  MaterialVector content_material;
  double fill_fraction = 0.0;
};

bool operator==(const SceneRecord& a, const SceneRecord& b);

/// Pure function of (seed, config).
SceneRecord assemble_scene(std::uint64_t seed, const SceneConfig& config);

/// Empty when every SceneRecord invariant holds; otherwise one message per
/// violation. Containment samples `containment_samples` random points on the
/// content surface.
std::vector<std::string> check_scene_invariants(const SceneRecord& scene,
                                                int containment_samples = 1000,
                                                double tolerance = 1e-6);

}  // namespace xyzmap
