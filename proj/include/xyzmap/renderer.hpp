#pragma once

// Geometric ray caster producing ground-truth depth, XYZ maps and masks.
// Depth is the optical-axis Z of the first surface hit; nothing is refracted.

#include <optional>

#include "xyzmap/bvh.hpp"
#include "xyzmap/geometry.hpp"
#include "xyzmap/mesh.hpp"
#include "xyzmap/scene.hpp"

namespace xyzmap {

struct RenderOptions {
  double mask_epsilon = 1e-6;
  bool normals = false;
  /// Adds the ground plane as a large quad behind everything else.
  bool render_ground = false;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct RenderOutput {
  DepthMapd vessel_depth;
  DepthMapd content_depth;
  DepthMapd opening_depth;
  XyzMapd vessel_xyz;
  XyzMapd content_xyz;
  XyzMapd opening_xyz;
  SegMask vessel_mask;
  SegMask content_mask;
  SegMask opening_mask;
  /// Unit geometric normals of the full-scene first hit, camera frame.
  std::optional<XyzMapd> normals;
};

/// Per-pixel first hit: depth map plus the hit triangle (-1 on a miss).
struct FirstHits {
  DepthMapd depth;
  Plane<int> triangle;
};

FirstHits cast_camera_rays(const Bvh& bvh, const PinholeCamera& camera, unsigned threads = 0);

/// Throws EmptyScene for a mesh without triangles.
DepthMapd render_depth(const TriMesh& geometry, const PinholeCamera& camera, unsigned threads = 0);

/// Pixels where the two renders differ by more than `epsilon` or where exactly
/// one of them is valid.
SegMask mask_by_depth_difference(const DepthMapd& with_object, const DepthMapd& without_object,
                                 double epsilon);

RenderOutput render_scene(const SceneRecord& scene, const PinholeCamera& camera,
                          const RenderOptions& options = {});
inline RenderOutput render_scene(const SceneRecord& scene, const RenderOptions& options = {}) {
  return render_scene(scene, scene.camera, options);
}

/// Invalidates masked pixels whose back-projected point lies more than
/// `max_distance` meters from the centroid of the masked points.
DepthMapd clean_depth(const DepthMapd& depth, const PinholeCamera& camera, const SegMask& mask,
                      double max_distance = 0.10);

}  // namespace xyzmap
