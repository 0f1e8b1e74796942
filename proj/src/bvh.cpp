#include "xyzmap/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "xyzmap/error.hpp"

namespace xyzmap {

Ray::Ray(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) : origin_(origin) {
  const double n = direction.norm();
  if (!(n > 0) || !std::isfinite(n) || !origin.allFinite()) {
    fail(ErrorCode::kDegenerateRay, "ray direction must be finite and non-zero");
  }
  direction_ = direction / n;
}

std::optional<Hit> intersect_triangle(const Ray& ray, const Eigen::Vector3d& a,
                                      const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d& d = ray.direction();
  int kz = 0;
  d.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0) std::swap(kx, ky);

  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Eigen::Vector3d pa = a - ray.origin();
  const Eigen::Vector3d pb = b - ray.origin();
  const Eigen::Vector3d pc = c - ray.origin();

  const double ax = pa[kx] - sx * pa[kz], ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz], by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz], cy = pc[ky] - sy * pc[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return std::nullopt;

  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = sz * pa[kz], bz = sz * pb[kz], cz = sz * pc[kz];
  const double t_scaled = u * az + v * bz + w * cz;
  if ((det > 0 && t_scaled <= 0) || (det < 0 && t_scaled >= 0)) return std::nullopt;

  const double inv = 1.0 / det;
  return Hit{t_scaled * inv, 0, v * inv, w * inv};
}

std::optional<Hit> intersect_brute_force(const TriMesh& mesh, const Ray& ray) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    auto hit = intersect_triangle(ray, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (hit && (!best || hit->t < best->t)) {
      hit->triangle = static_cast<std::uint32_t>(i);
      best = hit;
    }
  }
  return best;
}

namespace {

/// Entry distance of the ray into the box, or nullopt on a miss. The box is
/// padded slightly so the test never rejects a box a triangle test would hit.
std::optional<double> enter_box(const Eigen::AlignedBox3d& box, const Ray& ray, double t_max) {
  double t0 = 0.0, t1 = t_max;
  const Eigen::Vector3d pad =
      Eigen::Vector3d::Constant(1e-12) + 1e-9 * box.sizes().cwiseAbs();
  for (int a = 0; a < 3; ++a) {
    const double lo = box.min()[a] - pad[a];
    const double hi = box.max()[a] + pad[a];
    const double o = ray.origin()[a];
    const double d = ray.direction()[a];
    if (d == 0.0) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double near = (lo - o) / d;
    double far = (hi - o) / d;
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

Bvh::Bvh(const TriMesh& mesh) {
  if (mesh.triangles.empty()) fail(ErrorCode::kEmptyScene, "BVH over an empty mesh");
  corners_.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    corners_.push_back({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]});
    centroids_.push_back((corners_.back()[0] + corners_.back()[1] + corners_.back()[2]) / 3.0);
  }
  order_.resize(corners_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * corners_.size() / kMaxLeafSize + 2);
  build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (const auto& p : corners_[order_[i]]) box.extend(p);
    centroid_box.extend(centroids_[order_[i]]);
  }
  nodes_[index].box = box;

  if (end - begin <= kMaxLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centroids_[a][axis], cb = centroids_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray) const {
  std::optional<Hit> best;
  double best_t = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const auto entry = enter_box(node.box, ray, best_t);
    // Entry equal to best_t can still hold a lower-index tie.
    if (!entry || *entry > best_t) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        auto hit = intersect_triangle(ray, corners_[tri][0], corners_[tri][1], corners_[tri][2]);
        if (!hit) continue;
        if (!best || hit->t < best->t || (hit->t == best->t && tri < best->triangle)) {
          hit->triangle = tri;
          best = hit;
          best_t = hit->t;
        }
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return best;
}

}  // namespace xyzmap
