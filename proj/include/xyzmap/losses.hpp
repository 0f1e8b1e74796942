#pragma once

// Pairwise-difference losses on XYZ maps. All of them compare D_{a,i}, the
// signed per-axis difference of pixel pair i, between prediction and ground
// truth, which makes them blind to a global translation of the prediction.
// The scale-invariant variant additionally rescales the predicted differences
// by K = mean|D_gt| / mean|D_pred|.
//
// Reductions run sequentially in pair order (pair-major, axis-minor) so the
// results are bit-reproducible.

#include <cmath>
#include <optional>
#include <utility>

#include "xyzmap/geometry.hpp"
#include "xyzmap/pair_set.hpp"

namespace xyzmap {

struct ScaleFactor {
  double k = 1.0;
  /// Number of (pair, axis) terms with D_gt * D_pred > 0 that entered K.
  std::size_t valid_pair_count = 0;
};

struct ScaleOptions {
  std::size_t min_positive_terms = 8;
  double min_denominator = 1e-12;
  /// The control term switches on outside [lower_bound, upper_bound].
  double upper_bound = 10.0;
  double lower_bound = 0.1;
};

struct LossReport {
  double value = 0.0;
  std::optional<ScaleFactor> k_used;
  bool control_term_active = false;
  std::size_t pair_count = 0;
};

enum class LossKind { kTranslationInvariant, kScaleInvariant };

template <typename Scalar>
using MapGradient = std::array<Plane<Scalar>, 3>;

namespace detail {

inline double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

template <typename Scalar>
void check_loss_inputs(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                       const PairSet& pairs) {
  require_same_size(pred.height(), pred.width(), gt.height(), gt.width(), "pred vs gt");
  require_same_size(pred.height(), pred.width(), pairs.height(), pairs.width(),
                    "pred vs pair set");
  if (pairs.empty()) fail(ErrorCode::kEmptyPairSet, "no pairs to evaluate");
}

struct ScaleSums {
  double gt_sum = 0.0;
  double pred_sum = 0.0;
  std::size_t count = 0;
};

template <typename Scalar>
ScaleSums positive_ratio_sums(const PairDifferences<Scalar>& dg,
                              const PairDifferences<Scalar>& dp) {
  ScaleSums s;
  for (Index i = 0; i < dg.rows(); ++i) {
    for (int a = 0; a < 3; ++a) {
      const double g = double(dg(i, a));
      const double p = double(dp(i, a));
      if (g * p > 0.0) {
        s.gt_sum += std::abs(g);
        s.pred_sum += std::abs(p);
        ++s.count;
      }
    }
  }
  return s;
}

inline ScaleFactor scale_from_sums(const ScaleSums& s, const ScaleOptions& options) {
  if (s.count < options.min_positive_terms) {
    fail(ErrorCode::kDegenerateScale,
         "only " + std::to_string(s.count) + " positive-ratio terms");
  }
  if (!(s.pred_sum / double(s.count) > options.min_denominator)) {
    fail(ErrorCode::kDegenerateScale, "predicted differences vanish");
  }
  const double k = s.gt_sum / s.pred_sum;
  if (!std::isfinite(k) || !(k > 0)) fail(ErrorCode::kDegenerateScale, "non-finite scale");
  return {k, s.count};
}

template <typename Scalar>
MapGradient<Scalar> zero_gradient(Index height, Index width) {
  MapGradient<Scalar> g;
  for (auto& ch : g) ch = Plane<Scalar>::Zero(height, width);
  return g;
}

}  // namespace detail

/// +K above the upper bound, -K below the lower bound, 0 otherwise.
inline double scale_control_term(double k, const ScaleOptions& options = {}) {
  if (k > options.upper_bound) return k;
  if (k < options.lower_bound) return -k;
  return 0.0;
}

/// Mean over pairs and axes of |D_gt - D_pred|.
template <typename Scalar>
LossReport translation_invariant_loss(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                                      const PairSet& pairs) {
  detail::check_loss_inputs(pred, gt, pairs);
  const auto dp = pair_differences(pred, pairs);
  const auto dg = pair_differences(gt, pairs);
  double sum = 0.0;
  for (Index i = 0; i < dg.rows(); ++i) {
    for (int a = 0; a < 3; ++a) sum += std::abs(double(dg(i, a)) - double(dp(i, a)));
  }
  LossReport report;
  report.value = sum / double(3 * pairs.size());
  report.pair_count = pairs.size();
  return report;
}

/// K over the (pair, axis) terms whose GT and predicted differences agree in sign.
template <typename Scalar>
ScaleFactor scale_factor(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                         const PairSet& pairs, const ScaleOptions& options = {}) {
  detail::check_loss_inputs(pred, gt, pairs);
  const auto dp = pair_differences(pred, pairs);
  const auto dg = pair_differences(gt, pairs);
  return detail::scale_from_sums(detail::positive_ratio_sums(dg, dp), options);
}

/// Mean over all pairs and axes of |D_gt - K * D_pred|, plus the scale control
/// term when K leaves [lower_bound, upper_bound]. When `shared` is given (e.g.
/// the vessel's K reused for its content) it replaces the internal K and no
/// control term is added; the object that owns K carries it.
template <typename Scalar>
LossReport scale_invariant_loss(const XyzMap<Scalar>& pred, const XyzMap<Scalar>& gt,
                                const PairSet& pairs, const ScaleOptions& options = {},
                                std::optional<ScaleFactor> shared = std::nullopt) {
  detail::check_loss_inputs(pred, gt, pairs);
  const auto dp = pair_differences(pred, pairs);
  const auto dg = pair_differences(gt, pairs);
  ScaleFactor k;
  if (shared) {
    if (!std::isfinite(shared->k) || !(shared->k > 0)) {
      fail(ErrorCode::kInvalidArgument, "shared scale factor must be positive and finite");
    }
    k = *shared;
  } else {
    k = detail::scale_from_sums(detail::positive_ratio_sums(dg, dp), options);
  }

  double sum = 0.0;
  for (Index i = 0; i < dg.rows(); ++i) {
    for (int a = 0; a < 3; ++a) sum += std::abs(double(dg(i, a)) - k.k * double(dp(i, a)));
  }
  LossReport report;
  report.value = sum / double(3 * pairs.size());
  report.k_used = k;
  report.pair_count = pairs.size();
  if (!shared) {
    const double control = scale_control_term(k.k, options);
    report.control_term_active = control != 0.0;
    report.value += control;
  }
  return report;
}

/// Mean over overlap pixels and axes of
/// |(p_vessel_gt - p_content_gt) - (p_vessel_pred - p_content_pred)|.
template <typename Scalar>
LossReport translation_consistency_loss(const XyzMap<Scalar>& pred_vessel,
                                        const XyzMap<Scalar>& pred_content,
                                        const XyzMap<Scalar>& gt_vessel,
                                        const XyzMap<Scalar>& gt_content,
                                        const SegMask& overlap) {
  for (const XyzMap<Scalar>* m : {&pred_content, &gt_vessel, &gt_content}) {
    require_same_size(pred_vessel.height(), pred_vessel.width(), m->height(), m->width(),
                      "consistency maps");
  }
  require_same_size(pred_vessel.height(), pred_vessel.width(), overlap.height(),
                    overlap.width(), "consistency overlap");
  if (!overlap.any()) fail(ErrorCode::kEmptyMask, "empty vessel/content overlap");
  const MaskArray all_valid = pred_vessel.validity() && pred_content.validity() &&
                              gt_vessel.validity() && gt_content.validity();
  if ((overlap.values() && !all_valid).any()) {
    fail(ErrorCode::kInvalidEndpoint, "overlap pixel is invalid in one of the maps");
  }

  double sum = 0.0;
  std::size_t n = 0;
  for (Index r = 0; r < overlap.height(); ++r) {
    for (Index c = 0; c < overlap.width(); ++c) {
      if (!overlap(r, c)) continue;
      for (int a = 0; a < 3; ++a) {
        const double gt_rel = double(gt_vessel.channel(a)(r, c)) - double(gt_content.channel(a)(r, c));
        const double pr_rel =
            double(pred_vessel.channel(a)(r, c)) - double(pred_content.channel(a)(r, c));
        sum += std::abs(gt_rel - pr_rel);
      }
      ++n;
    }
  }
  LossReport report;
  report.value = sum / double(3 * n);
  report.pair_count = n;
  return report;
}

/// d(loss)/d(pred) at every pixel and axis; zero at pixels no pair touches.
/// For the scale-invariant loss K is held constant in the main term, while the
/// control term differentiates through K. Subgradient sign(0) = 0.
template <typename Scalar>
MapGradient<Scalar> loss_gradient(LossKind kind, const XyzMap<Scalar>& pred,
                                  const XyzMap<Scalar>& gt, const PairSet& pairs,
                                  const ScaleOptions& options = {},
                                  std::optional<ScaleFactor> shared = std::nullopt) {
  detail::check_loss_inputs(pred, gt, pairs);
  const auto dp = pair_differences(pred, pairs);
  const auto dg = pair_differences(gt, pairs);
  const double norm = 1.0 / double(3 * pairs.size());

  // coeff(i, a) = d(loss) / d(D_pred(i, a))
  Eigen::Array<double, Eigen::Dynamic, 3, Eigen::RowMajor> coeff(dp.rows(), 3);
  if (kind == LossKind::kTranslationInvariant) {
    for (Index i = 0; i < dp.rows(); ++i) {
      for (int a = 0; a < 3; ++a) {
        coeff(i, a) = -detail::sign(double(dg(i, a)) - double(dp(i, a))) * norm;
      }
    }
  } else {
    double k = 0.0;
    double control_sign = 0.0;
    double pred_sum = 1.0;
    if (shared) {
      k = shared->k;
    } else {
      const auto sums = detail::positive_ratio_sums(dg, dp);
      k = detail::scale_from_sums(sums, options).k;
      pred_sum = sums.pred_sum;
      control_sign = k > options.upper_bound ? 1.0 : (k < options.lower_bound ? -1.0 : 0.0);
    }
    for (Index i = 0; i < dp.rows(); ++i) {
      for (int a = 0; a < 3; ++a) {
        const double g = double(dg(i, a));
        const double p = double(dp(i, a));
        double c = -k * detail::sign(g - k * p) * norm;
        if (control_sign != 0.0 && g * p > 0.0) {
          // K = sum|D_gt| / sum|D_pred| over the positive-ratio terms.
          c += control_sign * (-k * detail::sign(p) / pred_sum);
        }
        coeff(i, a) = c;
      }
    }
  }

  auto grad = detail::zero_gradient<Scalar>(pred.height(), pred.width());
  const Index w = pred.width();
  const auto& list = pairs.pairs();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Index r1 = list[i].first / w, c1 = list[i].first % w;
    const Index r2 = list[i].second / w, c2 = list[i].second % w;
    for (int a = 0; a < 3; ++a) {
      const Scalar c = Scalar(coeff(static_cast<Index>(i), a));
      grad[a](r1, c1) += c;
      grad[a](r2, c2) -= c;
    }
  }
  return grad;
}

/// Gradients of translation_consistency_loss with respect to the predicted
/// vessel and content maps.
template <typename Scalar>
std::pair<MapGradient<Scalar>, MapGradient<Scalar>> translation_consistency_gradient(
    const XyzMap<Scalar>& pred_vessel, const XyzMap<Scalar>& pred_content,
    const XyzMap<Scalar>& gt_vessel, const XyzMap<Scalar>& gt_content, const SegMask& overlap) {
  const LossReport report =
      translation_consistency_loss(pred_vessel, pred_content, gt_vessel, gt_content, overlap);
  const double norm = 1.0 / double(3 * report.pair_count);
  auto gv = detail::zero_gradient<Scalar>(overlap.height(), overlap.width());
  auto gc = detail::zero_gradient<Scalar>(overlap.height(), overlap.width());
  for (Index r = 0; r < overlap.height(); ++r) {
    for (Index c = 0; c < overlap.width(); ++c) {
      if (!overlap(r, c)) continue;
      for (int a = 0; a < 3; ++a) {
        const double gt_rel = double(gt_vessel.channel(a)(r, c)) - double(gt_content.channel(a)(r, c));
        const double pr_rel =
            double(pred_vessel.channel(a)(r, c)) - double(pred_content.channel(a)(r, c));
        const double s = -detail::sign(gt_rel - pr_rel) * norm;
        gv[a](r, c) = Scalar(s);
        gc[a](r, c) = Scalar(-s);
      }
    }
  }
  return {std::move(gv), std::move(gc)};
}

}  // namespace xyzmap
