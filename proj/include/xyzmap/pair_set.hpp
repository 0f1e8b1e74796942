#pragma once

// Enumeration of in-mask pixel pairs at a set of dilations, and the signed
// per-axis coordinate differences over those pairs. Differences are computed
// the way a dilated [1, 0, ..., 0, -1] convolution would: one shifted-block
// subtraction per (dilation, direction), then gathered in pair order.

#include <cstdint>
#include <span>
#include <vector>

#include "xyzmap/geometry.hpp"

namespace xyzmap {

enum class PairDirection : std::uint8_t { kHorizontal, kVertical };

/// Flat row-major pixel indices; `second` is `first` shifted by the block's
/// dilation along its direction.
struct PixelPair {
  Index first;
  Index second;

  friend bool operator==(const PixelPair&, const PixelPair&) = default;
};

/// Contiguous run of pairs sharing one (dilation, direction).
struct PairBlock {
  int dilation;
  PairDirection direction;
  std::size_t begin;
  std::size_t end;
};

class PairSet {
 public:
  static constexpr int kAxisCount = 3;

  Index height() const { return mask_.height(); }
  Index width() const { return mask_.width(); }
  const SegMask& mask() const { return mask_; }
  const std::vector<int>& dilations() const { return dilations_; }
  const std::vector<PixelPair>& pairs() const { return pairs_; }
  const std::vector<PairBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

 private:
  friend PairSet build_pair_set(const SegMask& mask, std::span<const int> dilations);

  SegMask mask_;
  std::vector<int> dilations_;
  std::vector<PixelPair> pairs_;
  std::vector<PairBlock> blocks_;
};

/// {1, 2, 4, ..., 64}, dropping steps that do not fit inside the image.
std::vector<int> default_dilations(Index height, Index width);

/// Pairs (p, p + d) with both pixels in the mask, for every dilation d in
/// ascending order; horizontal before vertical, row-major within each block.
PairSet build_pair_set(const SegMask& mask, std::span<const int> dilations);
PairSet build_pair_set(const SegMask& mask);

/// In-mask validity of the pair origins of one block: true at (r, c) when both
/// (r, c) and its shifted partner are set.
MaskArray block_pair_mask(const MaskArray& mask, int dilation, PairDirection direction);

/// Row i holds D_{a,i} = map_a(first_i) - map_a(second_i) for a = X, Y, Z.
template <typename Scalar>
using PairDifferences = Eigen::Array<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

template <typename Scalar>
PairDifferences<Scalar> pair_differences(const XyzMap<Scalar>& map, const PairSet& pairs) {
  require_same_size(map.height(), map.width(), pairs.height(), pairs.width(),
                    "map vs pair set");
  PairDifferences<Scalar> out(static_cast<Index>(pairs.size()), 3);
  const Index h = map.height(), w = map.width();
  for (const PairBlock& block : pairs.blocks()) {
    if (block.begin == block.end) continue;
    const int d = block.dilation;
    const bool horizontal = block.direction == PairDirection::kHorizontal;
    const Index rows = horizontal ? h : h - d;
    const Index cols = horizontal ? w - d : w;
    const Index dr = horizontal ? 0 : d;
    const Index dc = horizontal ? d : 0;

    const MaskArray in_mask = block_pair_mask(pairs.mask().values(), d, block.direction);
    const MaskArray endpoints_valid = map.validity().topLeftCorner(rows, cols) &&
                                      map.validity().block(dr, dc, rows, cols);
    if ((in_mask && !endpoints_valid).any()) {
      fail(ErrorCode::kInvalidEndpoint, "pair references an invalid pixel");
    }

    std::array<Plane<Scalar>, 3> diff;
    for (int a = 0; a < 3; ++a) {
      diff[a] = map.channel(a).topLeftCorner(rows, cols) - map.channel(a).block(dr, dc, rows, cols);
    }
    std::size_t i = block.begin;
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        if (!in_mask(r, c)) continue;
        for (int a = 0; a < 3; ++a) out(static_cast<Index>(i), a) = diff[a](r, c);
        ++i;
      }
    }
  }
  return out;
}

}  // namespace xyzmap
