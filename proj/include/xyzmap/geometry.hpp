#pragma once

// Per-pixel map types (depth, XYZ, masks), the pinhole camera, and the
// depth <-> XYZ conversions. Map types are templated on the scalar type in
// the same way Eigen's dense types are; `XyzMapd` / `XyzMapf` etc. are the
// usual instantiations.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "xyzmap/error.hpp"

namespace xyzmap {

using Eigen::Index;

template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Stored in every invalid pixel. Never read by any operation.
template <typename Scalar>
constexpr Scalar invalid_sentinel() {
  return std::numeric_limits<Scalar>::quiet_NaN();
}

inline void require_same_size(Index rows_a, Index cols_a, Index rows_b, Index cols_b,
                              const char* what) {
  if (rows_a != rows_b || cols_a != cols_b) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(rows_a) + "x" + std::to_string(cols_a) +
             " vs " + std::to_string(rows_b) + "x" + std::to_string(cols_b));
  }
}

class SegMask {
 public:
  SegMask() = default;
  SegMask(Index height, Index width, bool value = false)
      : values_(MaskArray::Constant(height, width, value)) {}
  explicit SegMask(MaskArray values) : values_(std::move(values)) {}

  Index height() const { return values_.rows(); }
  Index width() const { return values_.cols(); }
  bool operator()(Index row, Index col) const { return values_(row, col); }
  void set(Index row, Index col, bool value = true) { values_(row, col) = value; }

  const MaskArray& values() const { return values_; }
  Index count() const { return values_.count(); }
  bool any() const { return values_.size() > 0 && values_.any(); }

  friend bool operator==(const SegMask& a, const SegMask& b) {
    return a.height() == b.height() && a.width() == b.width() &&
           (a.values_ == b.values_).all();
  }

 private:
  MaskArray values_;
};

inline SegMask operator&(const SegMask& a, const SegMask& b) {
  require_same_size(a.height(), a.width(), b.height(), b.width(), "mask intersection");
  return SegMask(MaskArray(a.values() && b.values()));
}

inline SegMask operator|(const SegMask& a, const SegMask& b) {
  require_same_size(a.height(), a.width(), b.height(), b.width(), "mask union");
  return SegMask(MaskArray(a.values() || b.values()));
}

/// Optical-axis depth per pixel plus a validity mask.
template <typename Scalar_>
class DepthMap {
 public:
  using Scalar = Scalar_;

  DepthMap() = default;
  DepthMap(Index height, Index width)
      : values_(Plane<Scalar>::Constant(height, width, invalid_sentinel<Scalar>())),
        valid_(MaskArray::Constant(height, width, false)) {}

  /// Valid pixels must hold finite, strictly positive depth.
  DepthMap(Plane<Scalar> values, MaskArray valid)
      : values_(std::move(values)), valid_(std::move(valid)) {
    require_same_size(values_.rows(), values_.cols(), valid_.rows(), valid_.cols(),
                      "depth values vs mask");
    for (Index r = 0; r < values_.rows(); ++r) {
      for (Index c = 0; c < values_.cols(); ++c) {
        if (!valid_(r, c)) {
          values_(r, c) = invalid_sentinel<Scalar>();
        } else if (!std::isfinite(values_(r, c))) {
          fail(ErrorCode::kInvalidValue, "non-finite depth at a valid pixel");
        } else if (!(values_(r, c) > Scalar(0))) {
          fail(ErrorCode::kNonPositiveDepth, "depth <= 0 at a valid pixel");
        }
      }
    }
  }

  /// Validity inferred from the values: finite and > 0.
  static DepthMap from_values(Plane<Scalar> values) {
    MaskArray valid = values.isFinite() && (values > Scalar(0));
    return DepthMap(std::move(values), std::move(valid));
  }

  Index height() const { return values_.rows(); }
  Index width() const { return values_.cols(); }
  Scalar operator()(Index row, Index col) const { return values_(row, col); }
  bool valid(Index row, Index col) const { return valid_(row, col); }
  const Plane<Scalar>& values() const { return values_; }
  const MaskArray& validity() const { return valid_; }
  SegMask mask() const { return SegMask(valid_); }

 private:
  Plane<Scalar> values_;
  MaskArray valid_;
};

/// Per-pixel 3D coordinates, one plane per axis, plus a validity mask.
template <typename Scalar_>
class XyzMap {
 public:
  using Scalar = Scalar_;
  using Point = Eigen::Matrix<Scalar, 3, 1>;
  using Channels = std::array<Plane<Scalar>, 3>;

  XyzMap() = default;
  XyzMap(Index height, Index width) : valid_(MaskArray::Constant(height, width, false)) {
    for (auto& ch : channels_) {
      ch = Plane<Scalar>::Constant(height, width, invalid_sentinel<Scalar>());
    }
  }

  XyzMap(Channels channels, MaskArray valid)
      : channels_(std::move(channels)), valid_(std::move(valid)) {
    for (const auto& ch : channels_) {
      require_same_size(ch.rows(), ch.cols(), valid_.rows(), valid_.cols(),
                        "xyz channel vs mask");
    }
    for (Index r = 0; r < valid_.rows(); ++r) {
      for (Index c = 0; c < valid_.cols(); ++c) {
        for (auto& ch : channels_) {
          if (!valid_(r, c)) {
            ch(r, c) = invalid_sentinel<Scalar>();
          } else if (!std::isfinite(ch(r, c))) {
            fail(ErrorCode::kInvalidValue, "non-finite coordinate at a valid pixel");
          }
        }
      }
    }
  }

  XyzMap(Plane<Scalar> x, Plane<Scalar> y, Plane<Scalar> z, MaskArray valid)
      : XyzMap(Channels{std::move(x), std::move(y), std::move(z)}, std::move(valid)) {}

  /// Every pixel valid and equal to `point`.
  static XyzMap constant(Index height, Index width, const Point& point) {
    Channels ch;
    for (int a = 0; a < 3; ++a) ch[a] = Plane<Scalar>::Constant(height, width, point[a]);
    return XyzMap(std::move(ch), MaskArray::Constant(height, width, true));
  }

  Index height() const { return valid_.rows(); }
  Index width() const { return valid_.cols(); }
  const Plane<Scalar>& channel(int axis) const { return channels_[axis]; }
  const Channels& channels() const { return channels_; }
  Point point(Index row, Index col) const {
    return Point(channels_[0](row, col), channels_[1](row, col), channels_[2](row, col));
  }
  bool valid(Index row, Index col) const { return valid_(row, col); }
  const MaskArray& validity() const { return valid_; }
  SegMask mask() const { return SegMask(valid_); }

 private:
  Channels channels_;
  MaskArray valid_;
};

using DepthMapd = DepthMap<double>;
using DepthMapf = DepthMap<float>;
using XyzMapd = XyzMap<double>;
using XyzMapf = XyzMap<float>;

/// p -> scale * p + offset on valid pixels.
template <typename Scalar>
XyzMap<Scalar> affine(const XyzMap<Scalar>& map, Scalar scale,
                      const Eigen::Matrix<Scalar, 3, 1>& offset) {
  typename XyzMap<Scalar>::Channels ch;
  for (int a = 0; a < 3; ++a) {
    ch[a] = (map.validity()).select(map.channel(a) * scale + offset[a], map.channel(a));
  }
  return XyzMap<Scalar>(std::move(ch), map.validity());
}

template <typename Scalar>
XyzMap<Scalar> translated(const XyzMap<Scalar>& map, const Eigen::Matrix<Scalar, 3, 1>& offset) {
  typename XyzMap<Scalar>::Channels ch;
  for (int a = 0; a < 3; ++a) {
    ch[a] = map.validity().select(map.channel(a) + offset[a], map.channel(a));
  }
  return XyzMap<Scalar>(std::move(ch), map.validity());
}

template <typename Scalar>
XyzMap<Scalar> with_mask(const XyzMap<Scalar>& map, const SegMask& keep) {
  require_same_size(map.height(), map.width(), keep.height(), keep.width(), "map vs mask");
  return XyzMap<Scalar>(map.channels(), MaskArray(map.validity() && keep.values()));
}

template <typename NewScalar, typename Scalar>
XyzMap<NewScalar> cast(const XyzMap<Scalar>& map) {
  typename XyzMap<NewScalar>::Channels ch;
  for (int a = 0; a < 3; ++a) ch[a] = map.channel(a).template cast<NewScalar>();
  return XyzMap<NewScalar>(std::move(ch), map.validity());
}

/// Intrinsics (pixels) plus a world-to-camera rigid transform. Camera frame:
/// x right, y down, z along the optical axis.
class PinholeCamera {
 public:
  PinholeCamera() = default;
  PinholeCamera(double fx, double fy, double cx, double cy, Index width, Index height,
                const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity(),
                const Eigen::Vector3d& translation = Eigen::Vector3d::Zero())
      : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height),
        rotation_(rotation), translation_(translation) {
    if (!(fx > 0) || !(fy > 0)) fail(ErrorCode::kInvalidCamera, "focal lengths must be > 0");
    if (width <= 0 || height <= 0) fail(ErrorCode::kInvalidCamera, "empty image size");
    if (!(cx >= 0 && cx < double(width) && cy >= 0 && cy < double(height))) {
      fail(ErrorCode::kInvalidCamera, "principal point outside the image");
    }
    if (!translation.allFinite()) fail(ErrorCode::kInvalidCamera, "non-finite translation");
    const double ortho = (rotation * rotation.transpose() - Eigen::Matrix3d::Identity())
                             .cwiseAbs()
                             .maxCoeff();
    if (!(ortho <= 1e-9) || !(std::abs(rotation.determinant() - 1.0) <= 1e-9)) {
      fail(ErrorCode::kInvalidCamera, "rotation is not a proper orthonormal matrix");
    }
  }

  /// Camera at `eye` looking at `target`; `up` is the world up direction.
  static PinholeCamera look_at(double fx, double fy, double cx, double cy, Index width,
                               Index height, const Eigen::Vector3d& eye,
                               const Eigen::Vector3d& target,
                               const Eigen::Vector3d& up = Eigen::Vector3d::UnitY()) {
    const Eigen::Vector3d forward = (target - eye).normalized();
    Eigen::Vector3d right = forward.cross(up);
    if (right.norm() < 1e-12) {
      // Looking along `up`: any perpendicular works.
      right = forward.cross(std::abs(forward.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                        : Eigen::Vector3d::UnitZ());
    }
    right.normalize();
    const Eigen::Vector3d down = forward.cross(right);
    Eigen::Matrix3d rotation;
    rotation.row(0) = right.transpose();
    rotation.row(1) = down.transpose();
    rotation.row(2) = forward.transpose();
    return PinholeCamera(fx, fy, cx, cy, width, height, rotation, -rotation * eye);
  }

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  Index width() const { return width_; }
  Index height() const { return height_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d center() const { return -rotation_.transpose() * translation_; }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation_ * world + translation_;
  }
  Eigen::Vector3d to_world(const Eigen::Vector3d& cam) const {
    return rotation_.transpose() * (cam - translation_);
  }
  /// Unnormalized camera-frame direction through pixel (col, row), z = 1.
  Eigen::Vector3d pixel_direction(double col, double row) const {
    return Eigen::Vector3d((col - cx_) / fx_, (row - cy_) / fy_, 1.0);
  }

 private:
  double fx_ = 1, fy_ = 1, cx_ = 0, cy_ = 0;
  Index width_ = 1, height_ = 1;
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Back-projects every valid pixel into the camera frame.
template <typename Scalar>
XyzMap<Scalar> depth_to_xyz(const DepthMap<Scalar>& depth, const PinholeCamera& camera) {
  require_same_size(depth.height(), depth.width(), camera.height(), camera.width(),
                    "depth vs camera");
  const Index h = depth.height(), w = depth.width();
  typename XyzMap<Scalar>::Channels ch;
  for (auto& c : ch) c = Plane<Scalar>::Constant(h, w, invalid_sentinel<Scalar>());
  const Scalar fx = Scalar(camera.fx()), fy = Scalar(camera.fy());
  const Scalar cx = Scalar(camera.cx()), cy = Scalar(camera.cy());
  for (Index v = 0; v < h; ++v) {
    for (Index u = 0; u < w; ++u) {
      if (!depth.valid(v, u)) continue;
      const Scalar z = depth(v, u);
      ch[0](v, u) = (Scalar(u) - cx) * z / fx;
      ch[1](v, u) = (Scalar(v) - cy) * z / fy;
      ch[2](v, u) = z;
    }
  }
  return XyzMap<Scalar>(std::move(ch), depth.validity());
}

/// Inverse of depth_to_xyz for camera-frame maps: depth is the Z channel.
template <typename Scalar>
DepthMap<Scalar> xyz_to_depth(const XyzMap<Scalar>& xyz, const PinholeCamera& camera) {
  require_same_size(xyz.height(), xyz.width(), camera.height(), camera.width(),
                    "xyz vs camera");
  if ((xyz.validity() && !(xyz.channel(2) > Scalar(0))).any()) {
    fail(ErrorCode::kNonPositiveDepth, "valid pixel with Z <= 0");
  }
  return DepthMap<Scalar>(xyz.channel(2), xyz.validity());
}

}  // namespace xyzmap
