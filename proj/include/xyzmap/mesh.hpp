#pragma once

// Triangle meshes and the surface-of-revolution builders for vessels, flat
// liquid fills and opening disks. Vessels stand on y = 0 with +y up.

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "xyzmap/profile.hpp"

namespace xyzmap {

enum class MeshLabel : std::uint8_t { kVessel, kContent, kOpening, kGround, kOther };

std::string_view to_string(MeshLabel label);

struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3i> triangles;
  MeshLabel label = MeshLabel::kOther;

  bool empty() const { return triangles.empty(); }
  double triangle_area(std::size_t i) const;
  double surface_area() const;
  /// Divergence-theorem volume; positive for closed, outward-wound meshes.
  double signed_volume() const;
  /// Throws InvalidArgument on out-of-range indices or near-zero-area faces.
  void validate(double min_area = 1e-12) const;

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

/// Concatenates meshes; the result keeps the label of the first.
TriMesh merge(const std::vector<const TriMesh*>& meshes);

/// Edge -> number of incident triangles, keyed by the sorted vertex pair.
std::vector<std::pair<std::pair<int, int>, int>> edge_incidence(const TriMesh& mesh);

inline constexpr int kDefaultAngularSegments = 64;
inline constexpr int kDefaultVerticalSegments = 48;
inline constexpr double kDefaultWallClearance = 1e-4;

/// Radius of the vessel mesh built with `vertical_segments` rings at height h:
/// linear between ring radii.
double ring_radius(const VesselProfile& profile, int vertical_segments, double h);

/// Lateral surface plus bottom disk, open at the rim. Vertices are
/// (r(h) cos t, h, r(h) sin t).
TriMesh profile_to_mesh(const VesselProfile& profile, int angular_segments = kDefaultAngularSegments,
                        int vertical_segments = kDefaultVerticalSegments);

/// Closed solid of revolution standing `clearance` off the vessel walls and
/// bottom, capped by a flat disk at fill_fraction * height (at most
/// height - clearance). Empty for fill_fraction == 0.
TriMesh flat_liquid_fill(const VesselProfile& profile, double fill_fraction,
                         int angular_segments = kDefaultAngularSegments,
                         int vertical_segments = kDefaultVerticalSegments,
                         double clearance = kDefaultWallClearance);

/// Flat disk spanning the rim at y = height.
TriMesh opening_plane(const VesselProfile& profile, int angular_segments = kDefaultAngularSegments);

/// Square in the plane y = height, centred on the y axis.
TriMesh ground_quad(double half_extent, double height = 0.0);

}  // namespace xyzmap
