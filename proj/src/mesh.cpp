#include "xyzmap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Geometry>

#include "xyzmap/error.hpp"

namespace xyzmap {

std::string_view to_string(MeshLabel label) {
  switch (label) {
    case MeshLabel::kVessel: return "vessel";
    case MeshLabel::kContent: return "content";
    case MeshLabel::kOpening: return "opening";
    case MeshLabel::kGround: return "ground";
    case MeshLabel::kOther: return "other";
  }
  return "other";
}

double TriMesh::triangle_area(std::size_t i) const {
  const auto& t = triangles[i];
  const Eigen::Vector3d& a = vertices[t[0]];
  return 0.5 * (vertices[t[1]] - a).cross(vertices[t[2]] - a).norm();
}

double TriMesh::surface_area() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < triangles.size(); ++i) sum += triangle_area(i);
  return sum;
}

double TriMesh::signed_volume() const {
  double sum = 0.0;
  for (const auto& t : triangles) {
    sum += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]]));
  }
  return sum / 6.0;
}

void TriMesh::validate(double min_area) const {
  const int n = static_cast<int>(vertices.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n) fail(ErrorCode::kInvalidArgument, "triangle index out of range");
    }
    if (!(triangle_area(i) > min_area)) {
      fail(ErrorCode::kInvalidArgument, "degenerate triangle " + std::to_string(i));
    }
  }
}

TriMesh merge(const std::vector<const TriMesh*>& meshes) {
  TriMesh out;
  if (!meshes.empty()) out.label = meshes.front()->label;
  for (const TriMesh* m : meshes) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m->vertices.begin(), m->vertices.end());
    for (const auto& t : m->triangles) out.triangles.push_back(t.array() + base);
  }
  return out;
}

std::vector<std::pair<std::pair<int, int>, int>> edge_incidence(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++counts[{std::min(a, b), std::max(a, b)}];
    }
  }
  return {counts.begin(), counts.end()};
}

double ring_radius(const VesselProfile& profile, int vertical_segments, double h) {
  const double x = std::clamp(h / profile.height(), 0.0, 1.0) * vertical_segments;
  const int j = std::min(static_cast<int>(x), vertical_segments - 1);
  const double f = x - j;
  const double r0 = profile.radius(profile.height() * j / vertical_segments);
  const double r1 = profile.radius(j + 1 == vertical_segments
                                       ? profile.height()
                                       : profile.height() * (j + 1) / vertical_segments);
  if (f == 0.0) return r0;
  return r0 + f * (r1 - r0);
}

namespace {

void check_resolution(int angular_segments, int vertical_segments) {
  if (angular_segments < 3) fail(ErrorCode::kInvalidResolution, "angular_segments must be >= 3");
  if (vertical_segments < 2) fail(ErrorCode::kInvalidResolution, "vertical_segments must be >= 2");
}

/// Appends one ring of `segments` vertices; returns the index of its first vertex.
int add_ring(TriMesh& mesh, double y, double radius, int segments) {
  const int first = static_cast<int>(mesh.vertices.size());
  for (int k = 0; k < segments; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / segments;
    mesh.vertices.emplace_back(radius * std::cos(theta), y, radius * std::sin(theta));
  }
  return first;
}

/// Outward-facing band between two rings, lower ring first.
void add_band(TriMesh& mesh, int lower, int upper, int segments) {
  for (int k = 0; k < segments; ++k) {
    const int k1 = (k + 1) % segments;
    const int a = lower + k, b = lower + k1, c = upper + k1, d = upper + k;
    mesh.triangles.emplace_back(a, c, b);
    mesh.triangles.emplace_back(a, d, c);
  }
}

/// Fan around a centre vertex; `facing_up` selects +y or -y winding.
void add_cap(TriMesh& mesh, const Eigen::Vector3d& center, int ring, int segments, bool facing_up) {
  const int c = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(center);
  for (int k = 0; k < segments; ++k) {
    const int k1 = (k + 1) % segments;
    if (facing_up) {
      mesh.triangles.emplace_back(c, ring + k1, ring + k);
    } else {
      mesh.triangles.emplace_back(c, ring + k, ring + k1);
    }
  }
}

}  // namespace

TriMesh profile_to_mesh(const VesselProfile& profile, int angular_segments, int vertical_segments) {
  check_resolution(angular_segments, vertical_segments);
  TriMesh mesh;
  mesh.label = MeshLabel::kVessel;
  const double height = profile.height();
  std::vector<int> rings;
  for (int j = 0; j <= vertical_segments; ++j) {
    const double y = j == vertical_segments ? height : height * j / vertical_segments;
    rings.push_back(add_ring(mesh, y, profile.radius(y), angular_segments));
  }
  for (int j = 0; j < vertical_segments; ++j) add_band(mesh, rings[j], rings[j + 1], angular_segments);
  add_cap(mesh, Eigen::Vector3d::Zero(), rings.front(), angular_segments, false);
  return mesh;
}

TriMesh flat_liquid_fill(const VesselProfile& profile, double fill_fraction, int angular_segments,
                         int vertical_segments, double clearance) {
  check_resolution(angular_segments, vertical_segments);
  if (!(fill_fraction >= 0.0 && fill_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "fill_fraction must lie in [0, 1]");
  }
  TriMesh mesh;
  mesh.label = MeshLabel::kContent;
  const double height = profile.height();
  const double bottom = clearance;
  const double top = std::min(fill_fraction * height, height - clearance);
  if (fill_fraction == 0.0 || top - bottom <= 1e-9) return mesh;

  std::vector<double> levels{bottom};
  for (int j = 1; j < vertical_segments; ++j) {
    const double y = height * j / vertical_segments;
    if (y > bottom + 1e-6 && y < top - 1e-6) levels.push_back(y);
  }
  levels.push_back(top);

  std::vector<int> rings;
  for (double y : levels) {
    const double r = ring_radius(profile, vertical_segments, y) - clearance;
    if (!(r > 0)) fail(ErrorCode::kInvalidArgument, "vessel too narrow for the wall clearance");
    rings.push_back(add_ring(mesh, y, r, angular_segments));
  }
  for (std::size_t j = 0; j + 1 < rings.size(); ++j) {
    add_band(mesh, rings[j], rings[j + 1], angular_segments);
  }
  add_cap(mesh, Eigen::Vector3d(0, bottom, 0), rings.front(), angular_segments, false);
  add_cap(mesh, Eigen::Vector3d(0, top, 0), rings.back(), angular_segments, true);
  return mesh;
}

TriMesh opening_plane(const VesselProfile& profile, int angular_segments) {
  if (angular_segments < 3) fail(ErrorCode::kInvalidResolution, "angular_segments must be >= 3");
  TriMesh mesh;
  mesh.label = MeshLabel::kOpening;
  const double height = profile.height();
  const int ring = add_ring(mesh, height, profile.radius(height), angular_segments);
  add_cap(mesh, Eigen::Vector3d(0, height, 0), ring, angular_segments, true);
  return mesh;
}

TriMesh ground_quad(double half_extent, double height) {
  TriMesh mesh;
  mesh.label = MeshLabel::kGround;
  const double e = half_extent;
  mesh.vertices = {{-e, height, -e}, {e, height, -e}, {e, height, e}, {-e, height, e}};
  // +y facing.
  mesh.triangles = {{0, 2, 1}, {0, 3, 2}};
  return mesh;
}

}  // namespace xyzmap
