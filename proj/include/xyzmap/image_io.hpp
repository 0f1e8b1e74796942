#pragma once

// PFM float maps, PGM masks and OBJ meshes.
//
// PFM: "Pf" (one channel) or "PF" (three channels), width and height, then a
// negative scale for little-endian payloads; rows run bottom to top. Invalid
// pixels hold -inf in depth maps and a quiet NaN in XYZ maps, and every map
// is accompanied by its validity mask in a sibling PGM (`<stem>_valid.pgm`).
// PGM masks: binary P5 with maxval 255, 0 = background, 255 = set; any value
// >= 128 reads as set.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "xyzmap/geometry.hpp"
#include "xyzmap/mesh.hpp"

namespace xyzmap {

/// Raw decoded PFM payload, rows top to bottom, channels interleaved.
struct PfmImage {
  Index width = 0;
  Index height = 0;
  int channels = 1;
  std::vector<float> data;
};

PfmImage read_pfm_raw(const std::filesystem::path& path);
void write_pfm_raw(const std::filesystem::path& path, const PfmImage& image);

std::filesystem::path validity_path(const std::filesystem::path& map_path);

void write_pgm(const std::filesystem::path& path, const SegMask& mask);
SegMask read_pgm(const std::filesystem::path& path);

void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

namespace detail {
inline float depth_sentinel() { return -std::numeric_limits<float>::infinity(); }
inline float xyz_sentinel() { return std::numeric_limits<float>::quiet_NaN(); }
}  // namespace detail

/// Values are stored as float32; a double map round-trips exactly when its
/// values are representable in float.
template <typename Scalar>
void write_pfm(const std::filesystem::path& path, const DepthMap<Scalar>& map) {
  PfmImage img{map.width(), map.height(), 1, {}};
  img.data.resize(static_cast<std::size_t>(map.width() * map.height()));
  for (Index r = 0; r < map.height(); ++r) {
    for (Index c = 0; c < map.width(); ++c) {
      img.data[r * map.width() + c] = map.valid(r, c) ? float(map(r, c)) : detail::depth_sentinel();
    }
  }
  write_pfm_raw(path, img);
  write_pgm(validity_path(path), map.mask());
}

template <typename Scalar>
void write_pfm(const std::filesystem::path& path, const XyzMap<Scalar>& map) {
  PfmImage img{map.width(), map.height(), 3, {}};
  img.data.resize(static_cast<std::size_t>(3 * map.width() * map.height()));
  for (Index r = 0; r < map.height(); ++r) {
    for (Index c = 0; c < map.width(); ++c) {
      for (int a = 0; a < 3; ++a) {
        img.data[3 * (r * map.width() + c) + a] =
            map.valid(r, c) ? float(map.channel(a)(r, c)) : detail::xyz_sentinel();
      }
    }
  }
  write_pfm_raw(path, img);
  write_pgm(validity_path(path), map.mask());
}

/// Validity comes from the sibling PGM when present, otherwise from the
/// values (finite and > 0).
template <typename Scalar>
DepthMap<Scalar> read_depth_pfm(const std::filesystem::path& path) {
  const PfmImage img = read_pfm_raw(path);
  if (img.channels != 1) fail(ErrorCode::kMalformedHeader, path.string() + ": expected a 1-channel PFM");
  Plane<Scalar> values(img.height, img.width);
  for (Index r = 0; r < img.height; ++r) {
    for (Index c = 0; c < img.width; ++c) values(r, c) = Scalar(img.data[r * img.width + c]);
  }
  const auto mask_path = validity_path(path);
  if (!std::filesystem::exists(mask_path)) return DepthMap<Scalar>::from_values(std::move(values));
  SegMask valid = read_pgm(mask_path);
  require_same_size(valid.height(), valid.width(), img.height, img.width, "PFM vs validity mask");
  return DepthMap<Scalar>(std::move(values), valid.values());
}

template <typename Scalar>
XyzMap<Scalar> read_xyz_pfm(const std::filesystem::path& path) {
  const PfmImage img = read_pfm_raw(path);
  if (img.channels != 3) fail(ErrorCode::kMalformedHeader, path.string() + ": expected a 3-channel PFM");
  typename XyzMap<Scalar>::Channels ch;
  for (auto& c : ch) c.resize(img.height, img.width);
  for (Index r = 0; r < img.height; ++r) {
    for (Index c = 0; c < img.width; ++c) {
      for (int a = 0; a < 3; ++a) ch[a](r, c) = Scalar(img.data[3 * (r * img.width + c) + a]);
    }
  }
  const auto mask_path = validity_path(path);
  MaskArray valid;
  if (std::filesystem::exists(mask_path)) {
    valid = read_pgm(mask_path).values();
    require_same_size(valid.rows(), valid.cols(), img.height, img.width, "PFM vs validity mask");
  } else {
    valid = ch[0].isFinite() && ch[1].isFinite() && ch[2].isFinite();
  }
  return XyzMap<Scalar>(std::move(ch), std::move(valid));
}

}  // namespace xyzmap
