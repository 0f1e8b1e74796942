#pragma once

// Point-set evaluation metrics over masked XYZ maps: MAE, MAD, MaxDst, R^2,
// two-sided Chamfer, similarity alignment of a prediction to GT, mask
// IOU/precision/recall and material-property MAE.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "xyzmap/geometry.hpp"
#include "xyzmap/kdtree.hpp"
#include "xyzmap/losses.hpp"
#include "xyzmap/pair_set.hpp"

namespace xyzmap {

struct EvalReport {
  double mae = 0.0;
  double mad = 0.0;
  double max_dst = 0.0;
  double mae_over_mad = 0.0;
  double mae_over_maxdst = 0.0;
  double chamfer = 0.0;
  double chamfer_over_mad = 0.0;
  double chamfer_over_maxdst = 0.0;
  double r_squared = 0.0;
};

struct SegReport {
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::int64_t intersection = 0;
  std::int64_t union_count = 0;
};

/// Diameter above this many points is computed on a seeded subsample.
inline constexpr Index kMaxDstExactLimit = 5000;

namespace detail {

template <typename Scalar>
void check_mask_within(const XyzMap<Scalar>& map, const SegMask& mask, const char* what) {
  require_same_size(map.height(), map.width(), mask.height(), mask.width(), what);
  if ((mask.values() && !map.validity()).any()) {
    fail(ErrorCode::kInvalidEndpoint, std::string(what) + ": mask covers invalid pixels");
  }
}

template <typename Scalar>
Eigen::Vector3d centroid(const XyzMap<Scalar>& map, const SegMask& mask) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Index n = 0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      for (int a = 0; a < 3; ++a) sum[a] += double(map.channel(a)(r, c));
      ++n;
    }
  }
  return sum / double(n);
}

template <typename Scalar>
double distance_at(const XyzMap<Scalar>& a, const XyzMap<Scalar>& b, Index r, Index c) {
  const double dx = double(a.channel(0)(r, c)) - double(b.channel(0)(r, c));
  const double dy = double(a.channel(1)(r, c)) - double(b.channel(1)(r, c));
  const double dz = double(a.channel(2)(r, c)) - double(b.channel(2)(r, c));
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

template <typename Scalar>
double distance_to(const XyzMap<Scalar>& a, Index r, Index c, const Eigen::Vector3d& p) {
  const double dx = double(a.channel(0)(r, c)) - p[0];
  const double dy = double(a.channel(1)(r, c)) - p[1];
  const double dz = double(a.channel(2)(r, c)) - p[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace detail

/// Masked points as an N x 3 matrix, row-major pixel order.
template <typename Scalar>
PointCloud<Scalar> masked_points(const XyzMap<Scalar>& map, const SegMask& mask) {
  detail::check_mask_within(map, mask, "masked_points");
  PointCloud<Scalar> out(mask.count(), 3);
  Index i = 0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      out.row(i++) = map.point(r, c).transpose();
    }
  }
  return out;
}

/// Mean Euclidean distance between same-pixel predicted and GT points.
template <typename Scalar>
double mae_points(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt, const SegMask& mask) {
  detail::check_mask_within(pred, mask, "mae pred");
  detail::check_mask_within(gt, mask, "mae gt");
  if (!mask.any()) fail(ErrorCode::kEmptyMask, "mae over an empty mask");
  double sum = 0.0;
  Index n = 0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      sum += detail::distance_at(pred, gt, r, c);
      ++n;
    }
  }
  return sum / double(n);
}

/// Mean distance from the masked GT points to their centroid.
template <typename Scalar>
double mad(const XyzMap<Scalar>& gt, const SegMask& mask) {
  detail::check_mask_within(gt, mask, "mad");
  if (!mask.any()) fail(ErrorCode::kEmptyMask, "mad over an empty mask");
  const Eigen::Vector3d center = detail::centroid(gt, mask);
  double sum = 0.0;
  Index n = 0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      sum += detail::distance_to(gt, r, c, center);
      ++n;
    }
  }
  return sum / double(n);
}

/// Largest pairwise distance in a point set. Exact up to `exact_limit`
/// points; beyond that the diameter of a fixed-seed subsample of that size,
/// which is a lower bound.
template <typename Scalar>
double diameter(const PointCloud<Scalar>& points, Index exact_limit = kMaxDstExactLimit) {
  if (points.rows() < 2) fail(ErrorCode::kTooFewPoints, "diameter needs at least 2 points");
  std::vector<Index> idx(points.rows());
  for (Index i = 0; i < points.rows(); ++i) idx[i] = i;
  if (points.rows() > exact_limit) {
    std::mt19937_64 rng(0x5eed'd1a3ULL);
    for (Index i = 0; i < exact_limit; ++i) {
      const Index j = i + Index(rng() % std::uint64_t(points.rows() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(exact_limit);
    std::sort(idx.begin(), idx.end());
  }
  double best = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      best = std::max(best, squared_distance(points, idx[i], points, idx[j]));
    }
  }
  return std::sqrt(best);
}

template <typename Scalar>
double max_dst(const XyzMap<Scalar>& gt, const SegMask& mask,
               Index exact_limit = kMaxDstExactLimit) {
  return diameter(masked_points(gt, mask), exact_limit);
}

/// 1 - RSS / TSS with RSS the squared same-pixel errors and TSS the squared
/// GT distances to the GT centroid.
template <typename Scalar>
double r_squared(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt, const SegMask& mask) {
  detail::check_mask_within(pred, mask, "r_squared pred");
  detail::check_mask_within(gt, mask, "r_squared gt");
  if (!mask.any()) fail(ErrorCode::kEmptyMask, "r_squared over an empty mask");
  const Eigen::Vector3d center = detail::centroid(gt, mask);
  double rss = 0.0, tss = 0.0;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (!mask(r, c)) continue;
      const double e = detail::distance_at(pred, gt, r, c);
      const double t = detail::distance_to(gt, r, c, center);
      rss += e * e;
      tss += t * t;
    }
  }
  if (!(tss > 1e-12)) fail(ErrorCode::kDegenerateGroundTruth, "all GT points coincide");
  return 1.0 - rss / tss;
}

/// Mean directed nearest-neighbour distance from `from` to `to`.
template <typename Scalar>
double directed_chamfer(const PointCloud<Scalar>& from, const PointCloud<Scalar>& to) {
  if (from.rows() == 0 || to.rows() == 0) fail(ErrorCode::kEmptySet, "chamfer of an empty set");
  const KdTree<Scalar> tree(to);
  double sum = 0.0;
  for (Index i = 0; i < from.rows(); ++i) sum += std::sqrt(tree.nearest(from, i).squared_distance);
  return sum / double(from.rows());
}

/// GT->pred plus pred->GT mean nearest-neighbour distances.
template <typename Scalar>
double chamfer(const PointCloud<Scalar>& pred, const PointCloud<Scalar>& gt) {
  if (pred.rows() == 0 || gt.rows() == 0) fail(ErrorCode::kEmptySet, "chamfer of an empty set");
  return directed_chamfer(gt, pred) + directed_chamfer(pred, gt);
}

/// Similarity that maps a prediction onto ground truth: p' = k p + offset.
struct Alignment {
  double k = 1.0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};

/// K over the pairs of `ref_mask`, offset from the centroids of the region.
template <typename Scalar>
Alignment estimate_alignment(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                             const SegMask& ref_mask, std::span<const int> dilations = {},
                             const ScaleOptions& options = {}) {
  if (!ref_mask.any()) fail(ErrorCode::kEmptyMask, "alignment reference region is empty");
  detail::check_mask_within(pred, ref_mask, "align pred ref");
  detail::check_mask_within(gt, ref_mask, "align gt ref");
  const PairSet pairs = dilations.empty() ? build_pair_set(ref_mask)
                                          : build_pair_set(ref_mask, dilations);
  if (pairs.empty()) fail(ErrorCode::kDegenerateScale, "reference region has no pairs");
  Alignment a;
  a.k = scale_factor(pred, gt, pairs, options).k;
  a.offset = detail::centroid(gt, ref_mask) - a.k * detail::centroid(pred, ref_mask);
  return a;
}

/// Applies `alignment` and keeps only `target_mask` (intersected with the
/// prediction's validity).
template <typename Scalar>
XyzMap<Scalar> apply_alignment(const XyzMap<Scalar>& pred, const Alignment& alignment,
                               const SegMask& target_mask) {
  if (!target_mask.any()) fail(ErrorCode::kEmptyMask, "alignment target region is empty");
  detail::check_mask_within(pred, target_mask, "align pred target");
  typename XyzMap<Scalar>::Channels ch;
  for (int a = 0; a < 3; ++a) {
    ch[a] = (pred.channel(a).template cast<double>() * alignment.k + alignment.offset[a])
                .template cast<Scalar>();
  }
  return XyzMap<Scalar>(std::move(ch), MaskArray(target_mask.values() && pred.validity()));
}

/// Scales and translates `pred` onto `gt` using K and the centroid offset
/// estimated over `ref_mask`, then returns the result on `target_mask` only.
template <typename Scalar>
XyzMap<Scalar> align_prediction(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                                const SegMask& ref_mask, const SegMask& target_mask,
                                std::span<const int> dilations = {},
                                const ScaleOptions& options = {}) {
  if (!target_mask.any()) fail(ErrorCode::kEmptyMask, "alignment target region is empty");
  return apply_alignment(pred, estimate_alignment(pred, gt, ref_mask, dilations, options),
                         target_mask);
}

/// The full per-object report; `pred` should already be aligned.
template <typename Scalar>
EvalReport evaluate_points(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                           const SegMask& mask) {
  EvalReport r;
  r.mae = mae_points(pred, gt, mask);
  r.mad = mad(gt, mask);
  const auto gt_points = masked_points(gt, mask);
  r.max_dst = diameter(gt_points);
  r.chamfer = chamfer(masked_points(pred, mask), gt_points);
  r.r_squared = r_squared(pred, gt, mask);
  r.mae_over_mad = r.mae / r.mad;
  r.mae_over_maxdst = r.mae / r.max_dst;
  r.chamfer_over_mad = r.chamfer / r.mad;
  r.chamfer_over_maxdst = r.chamfer / r.max_dst;
  return r;
}

/// Conventions for empty masks: both empty gives 1/1/1; an empty prediction
/// against non-empty GT, or the reverse, gives 0/0/0.
inline SegReport seg_eval(const SegMask& pred, const SegMask& gt) {
  require_same_size(pred.height(), pred.width(), gt.height(), gt.width(), "seg_eval");
  SegReport s;
  const std::int64_t n_pred = pred.count();
  const std::int64_t n_gt = gt.count();
  s.intersection = (pred.values() && gt.values()).count();
  s.union_count = (pred.values() || gt.values()).count();
  if (n_pred == 0 && n_gt == 0) {
    s.iou = s.precision = s.recall = 1.0;
    return s;
  }
  s.iou = double(s.intersection) / double(s.union_count);
  s.precision = n_pred > 0 ? double(s.intersection) / double(n_pred) : 0.0;
  s.recall = n_gt > 0 ? double(s.intersection) / double(n_gt) : 0.0;
  return s;
}

/// Ordered material properties, every component in [0, 1]. IOR is stored
/// normalized from its physical range [1, 2].
struct MaterialVector {
  static constexpr double kIorMin = 1.0;
  static constexpr double kIorMax = 2.0;
  static constexpr std::size_t kSize = 7;

  std::array<double, 3> rgb{};
  double transmission = 0.0;
  double roughness = 0.0;
  double metallic = 0.0;
  double ior = 0.0;

  double ior_physical() const { return kIorMin + ior * (kIorMax - kIorMin); }
  static double normalize_ior(double physical) {
    return (physical - kIorMin) / (kIorMax - kIorMin);
  }

  std::array<double, kSize> to_array() const {
    return {rgb[0], rgb[1], rgb[2], transmission, roughness, metallic, ior};
  }
  static MaterialVector from_values(std::span<const double> values) {
    if (values.size() != kSize) {
      fail(ErrorCode::kDimensionMismatch, "material vector needs 7 components");
    }
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::kInvalidValue, "material component outside [0,1]");
    }
    MaterialVector m;
    m.rgb = {values[0], values[1], values[2]};
    m.transmission = values[3];
    m.roughness = values[4];
    m.metallic = values[5];
    m.ior = values[6];
    return m;
  }

  friend bool operator==(const MaterialVector&, const MaterialVector&) = default;
};

struct MaterialErrors {
  double transmission = 0.0;
  double color = 0.0;
  double metallic = 0.0;
  double roughness = 0.0;
  double ior = 0.0;
};

inline MaterialErrors material_mae(const MaterialVector& pred, const MaterialVector& gt) {
  MaterialErrors e;
  e.transmission = std::abs(pred.transmission - gt.transmission);
  e.color = (std::abs(pred.rgb[0] - gt.rgb[0]) + std::abs(pred.rgb[1] - gt.rgb[1]) +
             std::abs(pred.rgb[2] - gt.rgb[2])) /
            3.0;
  e.metallic = std::abs(pred.metallic - gt.metallic);
  e.roughness = std::abs(pred.roughness - gt.roughness);
  e.ior = std::abs(pred.ior - gt.ior);
  return e;
}

/// Mean of per-sample errors over a set of (pred, gt) material pairs.
inline MaterialErrors material_mae(std::span<const MaterialVector> pred,
                                   std::span<const MaterialVector> gt) {
  if (pred.size() != gt.size()) fail(ErrorCode::kDimensionMismatch, "material set sizes differ");
  if (pred.empty()) fail(ErrorCode::kEmptySet, "no materials to compare");
  MaterialErrors sum;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const MaterialErrors e = material_mae(pred[i], gt[i]);
    sum.transmission += e.transmission;
    sum.color += e.color;
    sum.metallic += e.metallic;
    sum.roughness += e.roughness;
    sum.ior += e.ior;
  }
  const double n = double(pred.size());
  return {sum.transmission / n, sum.color / n, sum.metallic / n, sum.roughness / n, sum.ior / n};
}

}  // namespace xyzmap
