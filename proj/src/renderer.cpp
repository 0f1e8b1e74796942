#include "xyzmap/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace xyzmap {

namespace {

unsigned resolve_threads(unsigned threads, Index rows) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<Index>(threads, std::max<Index>(rows, 1)));
}

/// Runs fn(row) for every row; rows are split into contiguous bands.
template <typename Fn>
void for_each_row(Index rows, unsigned threads, Fn&& fn) {
  threads = resolve_threads(threads, rows);
  if (threads <= 1) {
    for (Index r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::jthread> workers;
  const Index band = (rows + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const Index begin = t * band;
    const Index end = std::min(rows, begin + band);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] {
      for (Index r = begin; r < end; ++r) fn(r);
    });
  }
}

}  // namespace

FirstHits cast_camera_rays(const Bvh& bvh, const PinholeCamera& camera, unsigned threads) {
  const Index h = camera.height(), w = camera.width();
  Plane<double> depth = Plane<double>::Constant(h, w, invalid_sentinel<double>());
  MaskArray valid = MaskArray::Constant(h, w, false);
  Plane<int> triangle = Plane<int>::Constant(h, w, -1);
  const Eigen::Vector3d origin = camera.center();
  const Eigen::Matrix3d to_world = camera.rotation().transpose();

  for_each_row(h, threads, [&](Index v) {
    for (Index u = 0; u < w; ++u) {
      const Eigen::Vector3d dir_cam = camera.pixel_direction(double(u), double(v));
      const double norm = dir_cam.norm();
      const Ray ray(origin, to_world * (dir_cam / norm));
      const auto hit = bvh.intersect(ray);
      if (!hit) continue;
      // dir_cam has z = 1, so z of the unit direction is 1 / norm.
      depth(v, u) = hit->t / norm;
      valid(v, u) = true;
      triangle(v, u) = static_cast<int>(hit->triangle);
    }
  });
  return {DepthMapd(std::move(depth), std::move(valid)), std::move(triangle)};
}

DepthMapd render_depth(const TriMesh& geometry, const PinholeCamera& camera, unsigned threads) {
  if (geometry.empty()) fail(ErrorCode::kEmptyScene, "nothing to render");
  return cast_camera_rays(Bvh(geometry), camera, threads).depth;
}

SegMask mask_by_depth_difference(const DepthMapd& with_object, const DepthMapd& without_object,
                                 double epsilon) {
  require_same_size(with_object.height(), with_object.width(), without_object.height(),
                    without_object.width(), "depth difference");
  const MaskArray& a = with_object.validity();
  const MaskArray& b = without_object.validity();
  MaskArray out = a != b;
  for (Index r = 0; r < out.rows(); ++r) {
    for (Index c = 0; c < out.cols(); ++c) {
      if (a(r, c) && b(r, c) && std::abs(with_object(r, c) - without_object(r, c)) > epsilon) {
        out(r, c) = true;
      }
    }
  }
  return SegMask(std::move(out));
}

RenderOutput render_scene(const SceneRecord& scene, const PinholeCamera& camera,
                          const RenderOptions& options) {
  if (scene.vessel.empty()) fail(ErrorCode::kEmptyScene, "scene has no vessel");
  const Index h = camera.height(), w = camera.width();
  const DepthMapd nothing(h, w);

  TriMesh ground;
  if (options.render_ground) {
    // Far larger than anything the camera frames.
    ground = ground_quad(100.0, scene.ground.offset);
  }

  std::vector<const TriMesh*> full_parts{&scene.vessel};
  if (!scene.content.empty()) full_parts.push_back(&scene.content);
  if (!ground.empty()) full_parts.push_back(&ground);
  const TriMesh full = merge(full_parts);
  const auto vessel_triangles = static_cast<int>(scene.vessel.triangles.size());

  const FirstHits full_hits = cast_camera_rays(Bvh(full), camera, options.threads);

  std::vector<const TriMesh*> without_vessel_parts;
  if (!scene.content.empty()) without_vessel_parts.push_back(&scene.content);
  if (!ground.empty()) without_vessel_parts.push_back(&ground);
  const TriMesh without_vessel = merge(without_vessel_parts);
  const DepthMapd without_vessel_depth =
      without_vessel.empty() ? nothing : render_depth(without_vessel, camera, options.threads);

  const DepthMapd ground_depth =
      ground.empty() ? nothing : render_depth(ground, camera, options.threads);

  RenderOutput out;
  {
    Plane<double> values = full_hits.depth.values();
    MaskArray valid = full_hits.depth.validity() && (full_hits.triangle >= 0) &&
                      (full_hits.triangle < vessel_triangles);
    out.vessel_depth = DepthMapd(std::move(values), std::move(valid));
  }
  out.content_depth =
      scene.content.empty() ? nothing : render_depth(scene.content, camera, options.threads);
  out.opening_depth = render_depth(scene.opening, camera, options.threads);

  out.vessel_mask = mask_by_depth_difference(full_hits.depth, without_vessel_depth,
                                             options.mask_epsilon);
  out.content_mask = mask_by_depth_difference(without_vessel_depth, ground_depth,
                                              options.mask_epsilon);
  out.opening_mask = mask_by_depth_difference(out.opening_depth, nothing, options.mask_epsilon);

  out.vessel_xyz = depth_to_xyz(out.vessel_depth, camera);
  out.content_xyz = depth_to_xyz(out.content_depth, camera);
  out.opening_xyz = depth_to_xyz(out.opening_depth, camera);

  if (options.normals) {
    XyzMapd::Channels ch;
    for (auto& c : ch) c = Plane<double>::Constant(h, w, invalid_sentinel<double>());
    for (Index v = 0; v < h; ++v) {
      for (Index u = 0; u < w; ++u) {
        const int tri = full_hits.triangle(v, u);
        if (tri < 0) continue;
        const auto& t = full.triangles[tri];
        Eigen::Vector3d n = (full.vertices[t[1]] - full.vertices[t[0]])
                                .cross(full.vertices[t[2]] - full.vertices[t[0]])
                                .normalized();
        n = camera.rotation() * n;
        for (int a = 0; a < 3; ++a) ch[a](v, u) = n[a];
      }
    }
    out.normals = XyzMapd(std::move(ch), full_hits.depth.validity());
  }
  return out;
}

DepthMapd clean_depth(const DepthMapd& depth, const PinholeCamera& camera, const SegMask& mask,
                      double max_distance) {
  require_same_size(depth.height(), depth.width(), mask.height(), mask.width(), "depth vs mask");
  const SegMask region(MaskArray(mask.values() && depth.validity()));
  if (!region.any()) fail(ErrorCode::kEmptyMask, "no valid masked depth to clean");
  const XyzMapd points = depth_to_xyz(depth, camera);
  const Eigen::Vector3d center = detail::centroid(points, region);

  MaskArray valid = depth.validity();
  for (Index r = 0; r < region.height(); ++r) {
    for (Index c = 0; c < region.width(); ++c) {
      if (region(r, c) && (points.point(r, c) - center).norm() > max_distance) valid(r, c) = false;
    }
  }
  return DepthMapd(depth.values(), std::move(valid));
}

}  // namespace xyzmap
