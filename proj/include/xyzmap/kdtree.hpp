#pragma once

// Exact nearest-neighbour queries over a 3D point set. Implicit balanced
// k-d tree over a permutation of point indices; split axis cycles x, y, z.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace xyzmap {

template <typename Scalar>
using PointCloud = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Squared Euclidean distance, summed x, y, z in that order.
template <typename Scalar>
inline double squared_distance(const PointCloud<Scalar>& a, Eigen::Index i,
                               const PointCloud<Scalar>& b, Eigen::Index j) {
  const double dx = double(a(i, 0)) - double(b(j, 0));
  const double dy = double(a(i, 1)) - double(b(j, 1));
  const double dz = double(a(i, 2)) - double(b(j, 2));
  return dx * dx + dy * dy + dz * dz;
}

template <typename Scalar>
class KdTree {
 public:
  explicit KdTree(const PointCloud<Scalar>& points) : points_(points), order_(points.rows()) {
    std::iota(order_.begin(), order_.end(), Eigen::Index(0));
    build(0, order_.size(), 0);
  }

  struct Nearest {
    Eigen::Index index = -1;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point to row `i` of `queries`. Ties resolve to the smallest index.
  Nearest nearest(const PointCloud<Scalar>& queries, Eigen::Index i) const {
    Nearest best;
    search(queries, i, 0, order_.size(), 0, best);
    return best;
  }

 private:
  void build(std::size_t begin, std::size_t end, int axis) {
    if (end - begin <= 1) return;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                       const Scalar va = points_(a, axis), vb = points_(b, axis);
                       return va < vb || (va == vb && a < b);
                     });
    build(begin, mid, (axis + 1) % 3);
    build(mid + 1, end, (axis + 1) % 3);
  }

  void search(const PointCloud<Scalar>& q, Eigen::Index qi, std::size_t begin, std::size_t end,
              int axis, Nearest& best) const {
    if (begin >= end) return;
    const std::size_t mid = begin + (end - begin) / 2;
    const Eigen::Index idx = order_[mid];
    const double d2 = squared_distance(q, qi, points_, idx);
    if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
      best = {idx, d2};
    }
    const double delta = double(q(qi, axis)) - double(points_(idx, axis));
    const int next = (axis + 1) % 3;
    const bool left_first = delta <= 0;
    if (left_first) {
      search(q, qi, begin, mid, next, best);
    } else {
      search(q, qi, mid + 1, end, next, best);
    }
    // <= keeps equal-distance candidates reachable for the index tie-break.
    if (delta * delta <= best.squared_distance) {
      if (left_first) {
        search(q, qi, mid + 1, end, next, best);
      } else {
        search(q, qi, begin, mid, next, best);
      }
    }
  }

  const PointCloud<Scalar>& points_;
  std::vector<Eigen::Index> order_;
};

}  // namespace xyzmap
