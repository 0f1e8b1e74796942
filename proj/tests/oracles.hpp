#pragma once

// Independent reference implementations and random fixtures for the tests.
// Everything here is written the slow, obvious way: direct scans over pixel
// coordinates instead of shifted blocks, all-pairs searches instead of trees.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "xyzmap/geometry.hpp"
#include "xyzmap/losses.hpp"
#include "xyzmap/metrics.hpp"

namespace oracle {

using namespace xyzmap;

struct Pair {
  Index r1, c1, r2, c2;
};

/// Scans the mask for every (dilation, direction) offset; same ordering
/// convention as the library.
inline std::vector<Pair> pairs(const SegMask& mask, const std::vector<int>& dilations) {
  std::vector<Pair> out;
  for (int d : dilations) {
    for (int dir = 0; dir < 2; ++dir) {
      const Index dr = dir == 0 ? 0 : d, dc = dir == 0 ? d : 0;
      for (Index r = 0; r < mask.height(); ++r) {
        for (Index c = 0; c < mask.width(); ++c) {
          const Index r2 = r + dr, c2 = c + dc;
          if (r2 >= mask.height() || c2 >= mask.width()) continue;
          if (mask(r, c) && mask(r2, c2)) out.push_back({r, c, r2, c2});
        }
      }
    }
  }
  return out;
}

inline double diff(const XyzMapd& m, const Pair& p, int a) {
  return m.channel(a)(p.r1, p.c1) - m.channel(a)(p.r2, p.c2);
}

inline double translation_loss(const XyzMapd& pred, const XyzMapd& gt, const std::vector<Pair>& ps) {
  double sum = 0.0;
  for (const auto& p : ps) {
    for (int a = 0; a < 3; ++a) sum += std::abs(diff(gt, p, a) - diff(pred, p, a));
  }
  return sum / double(3 * ps.size());
}

struct K {
  double k;
  std::size_t terms;
};

inline K scale(const XyzMapd& pred, const XyzMapd& gt, const std::vector<Pair>& ps) {
  double g = 0.0, q = 0.0;
  std::size_t n = 0;
  for (const auto& p : ps) {
    for (int a = 0; a < 3; ++a) {
      const double dg = diff(gt, p, a), dp = diff(pred, p, a);
      if (dg * dp > 0) {
        g += std::abs(dg);
        q += std::abs(dp);
        ++n;
      }
    }
  }
  return {g / q, n};
}

/// Main term with K supplied, no control term.
inline double scale_main(const XyzMapd& pred, const XyzMapd& gt, const std::vector<Pair>& ps,
                         double k) {
  double sum = 0.0;
  for (const auto& p : ps) {
    for (int a = 0; a < 3; ++a) sum += std::abs(diff(gt, p, a) - k * diff(pred, p, a));
  }
  return sum / double(3 * ps.size());
}

inline double control(double k) { return k > 10.0 ? k : (k < 0.1 ? -k : 0.0); }

inline double scale_loss(const XyzMapd& pred, const XyzMapd& gt, const std::vector<Pair>& ps) {
  const double k = scale(pred, gt, ps).k;
  return scale_main(pred, gt, ps, k) + control(k);
}

inline double dist(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline std::vector<Eigen::Vector3d> points(const XyzMapd& m, const SegMask& mask) {
  std::vector<Eigen::Vector3d> out;
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) {
      if (mask(r, c)) out.push_back(m.point(r, c));
    }
  }
  return out;
}

inline double mae(const XyzMapd& pred, const XyzMapd& gt, const SegMask& mask) {
  const auto p = points(pred, mask), g = points(gt, mask);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += dist(p[i], g[i]);
  return sum / double(p.size());
}

inline Eigen::Vector3d centroid(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& p : pts) {
    for (int a = 0; a < 3; ++a) s[a] += p[a];
  }
  return s / double(pts.size());
}

inline double mad(const XyzMapd& gt, const SegMask& mask) {
  const auto g = points(gt, mask);
  const Eigen::Vector3d c = centroid(g);
  double sum = 0.0;
  for (const auto& p : g) sum += dist(p, c);
  return sum / double(g.size());
}

inline double diameter(const std::vector<Eigen::Vector3d>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1], dz = pts[i][2] - pts[j][2];
      best = std::max(best, dx * dx + dy * dy + dz * dz);
    }
  }
  return std::sqrt(best);
}

inline double r_squared(const XyzMapd& pred, const XyzMapd& gt, const SegMask& mask) {
  const auto p = points(pred, mask), g = points(gt, mask);
  const Eigen::Vector3d c = centroid(g);
  double rss = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = dist(p[i], g[i]), t = dist(g[i], c);
    rss += e * e;
    tss += t * t;
  }
  return 1.0 - rss / tss;
}

inline double directed(const std::vector<Eigen::Vector3d>& from, const std::vector<Eigen::Vector3d>& to) {
  double sum = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    sum += std::sqrt(best);
  }
  return sum / double(from.size());
}

inline double chamfer(const std::vector<Eigen::Vector3d>& pred, const std::vector<Eigen::Vector3d>& gt) {
  return directed(gt, pred) + directed(pred, gt);
}

/// Mean of the chi distribution with 3 degrees of freedom: 2 sqrt(2 / pi).
inline double chi3_mean() { return 2.0 * std::sqrt(2.0 / M_PI); }

// ---- random fixtures -------------------------------------------------------

inline SegMask random_mask(std::mt19937_64& rng, Index h, Index w, double density) {
  std::bernoulli_distribution on(density);
  SegMask m(h, w);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) m.set(r, c, on(rng));
  }
  if (!m.any()) m.set(rng() % h, rng() % w);
  return m;
}

/// Valid everywhere; values uniform in [lo, hi].
inline XyzMapd random_map(std::mt19937_64& rng, Index h, Index w, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  XyzMapd::Channels ch;
  for (auto& c : ch) {
    c.resize(h, w);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
  }
  return XyzMapd(std::move(ch), MaskArray::Constant(h, w, true));
}

/// Values on the grid k / 2^10, |k| <= 2^12: sums and differences of such
/// numbers with similar offsets are exact in double.
inline XyzMapd dyadic_map(std::mt19937_64& rng, Index h, Index w) {
  std::uniform_int_distribution<int> k(-4096, 4096);
  XyzMapd::Channels ch;
  for (auto& c : ch) {
    c.resize(h, w);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = std::ldexp(double(k(rng)), -10);
  }
  return XyzMapd(std::move(ch), MaskArray::Constant(h, w, true));
}

inline XyzMapd add_noise(std::mt19937_64& rng, const XyzMapd& m, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  XyzMapd::Channels ch = m.channels();
  for (Index r = 0; r < m.height(); ++r) {
    for (Index c = 0; c < m.width(); ++c) {
      if (!m.valid(r, c)) continue;
      for (auto& p : ch) p(r, c) += n(rng);
    }
  }
  return XyzMapd(std::move(ch), m.validity());
}

}  // namespace oracle
