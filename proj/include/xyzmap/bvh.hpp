#pragma once

// Bounding-volume hierarchy over a triangle mesh with watertight ray/triangle
// intersection. Nearest hit is the smallest t; equal t resolves to the
// smallest triangle index, so BVH and brute-force queries agree exactly.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "xyzmap/mesh.hpp"

namespace xyzmap {

class Ray {
 public:
  /// Direction is normalized; a zero or non-finite direction is rejected.
  Ray(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction);

  const Eigen::Vector3d& origin() const { return origin_; }
  const Eigen::Vector3d& direction() const { return direction_; }

 private:
  Eigen::Vector3d origin_;
  Eigen::Vector3d direction_;
};

struct Hit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  /// Barycentric weights of the triangle's second and third vertex.
  double u = 0.0;
  double v = 0.0;
};

/// Watertight test (Woop, Benthin and Wald 2013); hits require t > 0.
std::optional<Hit> intersect_triangle(const Ray& ray, const Eigen::Vector3d& a,
                                      const Eigen::Vector3d& b, const Eigen::Vector3d& c);

std::optional<Hit> intersect_brute_force(const TriMesh& mesh, const Ray& ray);

class Bvh {
 public:
  static constexpr std::size_t kMaxLeafSize = 8;

  struct Node {
    Eigen::AlignedBox3d box;
    /// Leaf: triangles triangle_order()[first, first + count).
    /// Inner node: child node indices `left` and `right`, count == 0.
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    bool leaf() const { return count > 0; }
  };

  explicit Bvh(const TriMesh& mesh);

  std::optional<Hit> intersect(const Ray& ray) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& triangle_order() const { return order_; }
  std::size_t triangle_count() const { return corners_.size(); }

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<std::array<Eigen::Vector3d, 3>> corners_;
  std::vector<Eigen::Vector3d> centroids_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace xyzmap
