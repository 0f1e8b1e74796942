#include "xyzmap/pair_set.hpp"

#include <algorithm>

namespace xyzmap {

std::vector<int> default_dilations(Index height, Index width) {
  const Index extent = std::max(height, width);
  std::vector<int> out;
  for (int d = 1; d <= 64; d *= 2) {
    if (d < extent) out.push_back(d);
  }
  return out;
}

MaskArray block_pair_mask(const MaskArray& mask, int dilation, PairDirection direction) {
  const Index h = mask.rows(), w = mask.cols();
  if (direction == PairDirection::kHorizontal) {
    if (dilation >= w) return MaskArray(h, 0);
    return mask.leftCols(w - dilation) && mask.rightCols(w - dilation);
  }
  if (dilation >= h) return MaskArray(0, w);
  return mask.topRows(h - dilation) && mask.bottomRows(h - dilation);
}

PairSet build_pair_set(const SegMask& mask, std::span<const int> dilations) {
  if (!mask.any()) fail(ErrorCode::kEmptyMask, "pair set over an empty mask");
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    if (dilations[i] <= 0 || (i > 0 && dilations[i] <= dilations[i - 1])) {
      fail(ErrorCode::kInvalidArgument, "dilations must be positive and strictly increasing");
    }
  }

  PairSet set;
  set.mask_ = mask;
  set.dilations_.assign(dilations.begin(), dilations.end());
  const Index w = mask.width();
  for (int d : dilations) {
    for (PairDirection dir : {PairDirection::kHorizontal, PairDirection::kVertical}) {
      const MaskArray origins = block_pair_mask(mask.values(), d, dir);
      const Index offset = dir == PairDirection::kHorizontal ? d : Index(d) * w;
      PairBlock block{d, dir, set.pairs_.size(), 0};
      for (Index r = 0; r < origins.rows(); ++r) {
        for (Index c = 0; c < origins.cols(); ++c) {
          if (!origins(r, c)) continue;
          const Index first = r * w + c;
          set.pairs_.push_back({first, first + offset});
        }
      }
      block.end = set.pairs_.size();
      set.blocks_.push_back(block);
    }
  }
  return set;
}

PairSet build_pair_set(const SegMask& mask) {
  const auto dilations = default_dilations(mask.height(), mask.width());
  return build_pair_set(mask, dilations);
}

}  // namespace xyzmap
