#include "xyzmap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "xyzmap/error.hpp"

namespace xyzmap {

double term_derivative(const ProfileTerm& term, double h, double height) {
  return std::visit(
      [&](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LinearTerm>) {
          return t.slope;
        } else if constexpr (std::is_same_v<T, PolynomialTerm>) {
          return t.coefficient * std::pow(h / height, t.degree);
        } else {
          const double w = 2.0 * std::numbers::pi * t.frequency / height;
          return t.amplitude * w * std::cos(w * h + t.phase);
        }
      },
      term);
}

VesselProfile::VesselProfile(std::vector<ProfileTerm> terms, double base_radius, double height,
                             int samples)
    : terms_(std::move(terms)), base_radius_(base_radius), height_(height) {
  if (!(height > 0) || !std::isfinite(height)) fail(ErrorCode::kInvalidArgument, "profile height must be > 0");
  if (!std::isfinite(base_radius)) fail(ErrorCode::kInvalidArgument, "non-finite base radius");
  if (samples < 2) fail(ErrorCode::kInvalidArgument, "profile needs at least 2 knots");

  knots_.resize(samples);
  const double step = height / double(samples - 1);
  auto slope_at = [&](double h) {
    double s = 0.0;
    for (const auto& t : terms_) s += term_derivative(t, h, height);
    return s;
  };
  knots_[0] = base_radius;
  double prev = slope_at(0.0);
  for (int j = 1; j < samples; ++j) {
    const double next = slope_at(j == samples - 1 ? height : j * step);
    knots_[j] = knots_[j - 1] + 0.5 * step * (prev + next);
    prev = next;
  }
}

double VesselProfile::radius(double h) const {
  const double x = std::clamp(h / height_, 0.0, 1.0) * double(knots_.size() - 1);
  const auto j = std::min<std::size_t>(static_cast<std::size_t>(x), knots_.size() - 2);
  const double f = x - double(j);
  if (f == 0.0) return knots_[j];
  if (f == 1.0) return knots_[j + 1];
  return knots_[j] + f * (knots_[j + 1] - knots_[j]);
}

double VesselProfile::derivative(double h) const {
  double s = 0.0;
  for (const auto& t : terms_) s += term_derivative(t, h, height_);
  return s;
}

double VesselProfile::min_radius() const { return *std::min_element(knots_.begin(), knots_.end()); }

void validate(const ProfileConfig& c) {
  auto check_range = [](const Range& r, const char* name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      fail(ErrorCode::kInvalidArgument, std::string("invalid range for ") + name);
    }
  };
  check_range(c.slope, "slope");
  check_range(c.poly_coefficient, "poly_coefficient");
  check_range(c.sin_amplitude, "sin_amplitude");
  check_range(c.sin_frequency, "sin_frequency");
  check_range(c.base_radius, "base_radius");
  check_range(c.height, "height");
  if (c.min_terms < 1 || c.max_terms < c.min_terms) fail(ErrorCode::kInvalidArgument, "term count range");
  if (c.min_degree < 0 || c.max_degree < c.min_degree) fail(ErrorCode::kInvalidArgument, "degree range");
  if (!c.use_linear && !c.use_polynomial && !c.use_sinusoidal) {
    fail(ErrorCode::kInvalidArgument, "no derivative term kind enabled");
  }
  if (!(c.height.lo > 0)) fail(ErrorCode::kInvalidArgument, "height must be > 0");
  if (c.samples < 2) fail(ErrorCode::kInvalidArgument, "samples must be >= 2");
  if (c.max_attempts < 1) fail(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
}

namespace {

ProfileTerm draw_term(Rng& rng, const ProfileConfig& c, double base_radius) {
  std::vector<int> kinds;
  if (c.use_linear) kinds.push_back(0);
  if (c.use_polynomial) kinds.push_back(1);
  if (c.use_sinusoidal) kinds.push_back(2);
  const int kind = kinds[rng.uniform_int(0, std::int64_t(kinds.size()) - 1)];
  switch (kind) {
    case 0:
      return LinearTerm{rng.uniform(c.slope.lo, c.slope.hi)};
    case 1: {
      const int degree = int(rng.uniform_int(c.min_degree, c.max_degree));
      return PolynomialTerm{rng.uniform(c.poly_coefficient.lo, c.poly_coefficient.hi), degree};
    }
    default: {
      const double amplitude = base_radius * rng.uniform(c.sin_amplitude.lo, c.sin_amplitude.hi);
      const double frequency = rng.uniform(c.sin_frequency.lo, c.sin_frequency.hi);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      return SinusoidalTerm{amplitude, frequency, phase};
    }
  }
}

}  // namespace

VesselProfile generate_profile(Rng& rng, const ProfileConfig& c) {
  validate(c);
  for (int attempt = 0; attempt < c.max_attempts; ++attempt) {
    const double base_radius = rng.uniform(c.base_radius.lo, c.base_radius.hi);
    const double height = rng.uniform(c.height.lo, c.height.hi);
    const int count = int(rng.uniform_int(c.min_terms, c.max_terms));
    std::vector<ProfileTerm> terms;
    for (int i = 0; i < count; ++i) terms.push_back(draw_term(rng, c, base_radius));
    VesselProfile profile(std::move(terms), base_radius, height, c.samples);
    if (profile.min_radius() > c.min_radius) return profile;
  }
  fail(ErrorCode::kGenerationFailed,
       "no profile above the minimum radius after " + std::to_string(c.max_attempts) + " draws");
}

VesselProfile generate_profile(std::uint64_t seed, const ProfileConfig& config) {
  Rng rng(seed);
  return generate_profile(rng, config);
}

}  // namespace xyzmap
