#pragma once

// Vessel profiles: radius as a function of height, obtained by integrating a
// random sum of linear, polynomial and sinusoidal derivative terms.

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "xyzmap/random.hpp"

namespace xyzmap {

/// dr/dh += slope.
struct LinearTerm {
  double slope = 0.0;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// dr/dh += coefficient * (h / height)^degree.
struct PolynomialTerm {
  double coefficient = 0.0;
  int degree = 2;
  friend bool operator==(const PolynomialTerm&, const PolynomialTerm&) = default;
};

/// r(h) gains amplitude * (sin(2 pi f h / height + phase) - sin(phase)), i.e.
/// dr/dh += amplitude * 2 pi f / height * cos(2 pi f h / height + phase).
/// Amplitude is in meters, frequency in cycles per vessel height.
struct SinusoidalTerm {
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;
  friend bool operator==(const SinusoidalTerm&, const SinusoidalTerm&) = default;
};

using ProfileTerm = std::variant<LinearTerm, PolynomialTerm, SinusoidalTerm>;

double term_derivative(const ProfileTerm& term, double h, double height);

class VesselProfile {
 public:
  /// Integrates the derivative with the trapezoid rule over `samples` evenly
  /// spaced knots on [0, height], starting from `base_radius`.
  VesselProfile(std::vector<ProfileTerm> terms, double base_radius, double height,
                int samples);

  const std::vector<ProfileTerm>& terms() const { return terms_; }
  double base_radius() const { return base_radius_; }
  double height() const { return height_; }
  int samples() const { return static_cast<int>(knots_.size()); }
  const std::vector<double>& knot_radii() const { return knots_; }

  /// Piecewise-linear through the knots; h is clamped to [0, height].
  double radius(double h) const;
  double derivative(double h) const;
  double min_radius() const;

  friend bool operator==(const VesselProfile&, const VesselProfile&) = default;

 private:
  std::vector<ProfileTerm> terms_;
  double base_radius_;
  double height_;
  std::vector<double> knots_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct ProfileConfig {
  int min_terms = 1;
  int max_terms = 4;
  bool use_linear = true;
  bool use_polynomial = true;
  bool use_sinusoidal = true;
  Range slope{-0.5, 0.5};
  int min_degree = 2;
  int max_degree = 3;
  Range poly_coefficient{-0.3, 0.3};
  /// Fraction of base_radius.
  Range sin_amplitude{0.0, 0.3};
  Range sin_frequency{0.5, 4.0};
  Range base_radius{0.02, 0.08};
  Range height{0.05, 0.25};
  int samples = 1024;
  double min_radius = 0.005;
  int max_attempts = 100;

  friend bool operator==(const ProfileConfig&, const ProfileConfig&) = default;
};

void validate(const ProfileConfig& config);

/// Draws profiles until one keeps r(h) > min_radius everywhere; throws
/// GenerationFailed once max_attempts draws have been rejected.
VesselProfile generate_profile(Rng& rng, const ProfileConfig& config);
VesselProfile generate_profile(std::uint64_t seed, const ProfileConfig& config);

}  // namespace xyzmap
