#pragma once

// Shared geometry and map fixtures for the unit tests and the acceptance run.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "xyzmap/bvh.hpp"
#include "xyzmap/geometry.hpp"
#include "xyzmap/mesh.hpp"
#include "xyzmap/profile.hpp"
#include "xyzmap/scene.hpp"

namespace fixture {

using namespace xyzmap;

/// Unit icosphere, outward winding, vertices exactly on the sphere.
inline TriMesh icosphere(int subdivisions, double radius, const Eigen::Vector3d& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                 {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                 {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Eigen::Vector3i> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      return mid[key] = int(v.size()) - 1;
    };
    std::vector<Eigen::Vector3i> next;
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      next.emplace_back(tri[0], a, c);
      next.emplace_back(tri[1], b, a);
      next.emplace_back(tri[2], c, b);
      next.emplace_back(a, b, c);
    }
    f = std::move(next);
  }
  TriMesh mesh;
  for (const auto& p : v) mesh.vertices.push_back(center + radius * p);
  mesh.triangles = f;
  return mesh;
}

inline TriMesh random_soup(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  TriMesh mesh;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d c(u(rng), u(rng), u(rng));
    for (int k = 0; k < 3; ++k) mesh.vertices.push_back(c + 0.2 * Eigen::Vector3d(u(rng), u(rng), u(rng)));
    mesh.triangles.emplace_back(3 * i, 3 * i + 1, 3 * i + 2);
  }
  return mesh;
}

inline SceneRecord cylinder_scene(double radius, double height, int segments) {
  SceneRecord scene;
  scene.profile = VesselProfile({}, radius, height, 64);
  scene.angular_segments = segments;
  scene.vertical_segments = 8;
  scene.vessel = profile_to_mesh(scene.profile, segments, 8);
  scene.opening = opening_plane(scene.profile, segments);
  return scene;
}

/// gt plus a per-axis permutation of 0.02-spaced offsets with +-0.004 jitter:
/// every pair difference of the residual is at least 0.012 away from zero.
inline XyzMapd lattice_offset_prediction(std::mt19937_64& rng, const XyzMapd& gt) {
  const Index n = gt.height() * gt.width();
  std::uniform_real_distribution<double> jitter(-0.004, 0.004);
  XyzMapd::Channels ch = gt.channels();
  for (int a = 0; a < 3; ++a) {
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index(0));
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index i = 0; i < n; ++i) ch[a].data()[i] += 0.02 * double(perm[i]) + jitter(rng);
  }
  return XyzMapd(ch, gt.validity());
}

inline XyzMapd bumped(const XyzMapd& m, int axis, Index r, Index c, double dh) {
  auto ch = m.channels();
  ch[axis](r, c) += dh;
  return XyzMapd(ch, m.validity());
}

/// Rays from a box around the origin; every other one is aimed at a jittered
/// triangle centroid so that hits are common.
inline std::vector<Ray> probe_rays(std::mt19937_64& rng, const TriMesh& mesh, int n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), jitter(-0.05, 0.05);
  std::vector<Ray> rays;
  rays.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d origin = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 2.0;
    Eigen::Vector3d dir(u(rng), u(rng), u(rng));
    if (i % 2 == 1) {
      const auto& t = mesh.triangles[rng() % mesh.triangles.size()];
      const Eigen::Vector3d c = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
      dir = c + Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng)) - origin;
    }
    if (dir.norm() < 1e-9) dir = Eigen::Vector3d::UnitX();
    rays.emplace_back(origin, dir);
  }
  return rays;
}

}  // namespace fixture
