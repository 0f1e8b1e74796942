#include <numbers>

#include <gtest/gtest.h>

#include "xyzmap/mesh.hpp"
#include "xyzmap/profile.hpp"
#include "xyzmap/scene.hpp"

namespace {

using namespace xyzmap;

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIoError;
}

VesselProfile cylinder(double r, double h, int samples = 1024) { return VesselProfile({}, r, h, samples); }

TEST(Profile, ZeroDerivativeIsCylinder) {
  const auto p = cylinder(0.04, 0.2);
  for (double r : p.knot_radii()) EXPECT_EQ(r, 0.04);
  EXPECT_EQ(p.radius(0.123), 0.04);
  const VesselProfile zero_slope({LinearTerm{0.0}}, 0.04, 0.2, 64);
  for (double r : zero_slope.knot_radii()) EXPECT_EQ(r, 0.04);
}

TEST(Profile, ConstantDerivativeIsCone) {
  const double a = -0.13, r0 = 0.05, height = 0.2;
  const VesselProfile p({LinearTerm{a}}, r0, height, 1024);
  for (int i = 0; i <= 100; ++i) {
    const double h = height * i / 100.0;
    const double exact = r0 + a * h;
    ASSERT_LE(std::abs(p.radius(h) - exact), 1e-6 * exact);
  }
}

TEST(Profile, PolynomialAndSinusoidIntegrate) {
  // Closed forms: coefficient * h^(d+1) / ((d+1) height^d) and
  // amplitude * (sin(w h + phase) - sin(phase)). The tolerance is the
  // trapezoid error plus the error of interpolating between knots.
  const double height = 0.15, r0 = 0.05;
  const int samples = 4096;
  const PolynomialTerm poly{0.2, 3};
  const SinusoidalTerm wave{0.01, 2.5, 0.7};
  const VesselProfile p({poly, wave}, r0, height, samples);
  const double w = 2 * kPi * wave.frequency / height;
  const double step = height / (samples - 1);
  const double d2 = poly.coefficient * poly.degree / height + wave.amplitude * w * w;
  const double d3 = poly.coefficient * poly.degree * (poly.degree - 1) / (height * height) +
                    wave.amplitude * w * w * w;
  const double bound = height * step * step / 12 * d3 + step * step / 8 * d2;
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double h = height * i / 500.0;
    const double exact = r0 + poly.coefficient * std::pow(h, 4) / (4 * std::pow(height, 3)) +
                         wave.amplitude * (std::sin(w * h + wave.phase) - std::sin(wave.phase));
    worst = std::max(worst, std::abs(p.radius(h) - exact));
  }
  EXPECT_LE(worst, bound);
  EXPECT_LE(bound, 1e-5 * r0);
}

TEST(Profile, DeterministicPerSeed) {
  const ProfileConfig config;
  for (std::uint64_t seed : {1ull, 2ull, 77ull, 123456789ull}) {
    EXPECT_EQ(generate_profile(seed, config), generate_profile(seed, config));
  }
  EXPECT_FALSE(generate_profile(1, config) == generate_profile(2, config));
}

TEST(Profile, AcceptedProfilesStayAboveMinimumOnFineGrid) {
  const ProfileConfig config;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = generate_profile(seed, config);
    ASSERT_GE(p.terms().size(), 1u);
    ASSERT_LE(p.terms().size(), 4u);
    for (int i = 0; i < 10000; ++i) {
      ASSERT_GT(p.radius(p.height() * i / 9999.0), config.min_radius) << "seed " << seed;
    }
  }
}

TEST(Profile, RetryBudgetExhausted) {
  ProfileConfig config;
  config.use_polynomial = config.use_sinusoidal = false;
  config.min_terms = config.max_terms = 1;
  config.slope = {-0.5, -0.5};
  config.base_radius = {0.02, 0.02};
  config.height = {0.1, 0.1};
  config.max_attempts = 1;
  EXPECT_EQ(code_of([&] { generate_profile(7, config); }), ErrorCode::kGenerationFailed);
  config.use_linear = false;
  EXPECT_EQ(code_of([&] { generate_profile(7, config); }), ErrorCode::kInvalidArgument);
}

TEST(ProfileMesh, CylinderLateralArea) {
  const auto mesh = profile_to_mesh(cylinder(1.0, 2.0), 256, 8);
  const double cap = kPi * 1.0;  // bottom disk, approximately
  double disk = 0.0;
  const std::size_t lateral = 2 * 256 * 8;
  for (std::size_t i = lateral; i < mesh.triangles.size(); ++i) disk += mesh.triangle_area(i);
  EXPECT_NEAR(disk, cap, 1e-3 * cap);
  const double side = mesh.surface_area() - disk;
  EXPECT_NEAR(side, 2 * kPi * 2.0, 1e-3 * 2 * kPi * 2.0);
}

TEST(ProfileMesh, VerticesLieOnProfile) {
  const ProfileConfig config;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = generate_profile(seed, config);
    const auto mesh = profile_to_mesh(p, 48, 32);
    mesh.validate();
    for (std::size_t i = 0; i + 1 < mesh.vertices.size(); ++i) {
      const auto& v = mesh.vertices[i];
      const double r = p.radius(v.y());
      ASSERT_NEAR(v.x() * v.x() + v.z() * v.z(), r * r, 1e-9);
    }
    // The last vertex is the centre of the bottom disk.
    EXPECT_EQ(mesh.vertices.back(), Eigen::Vector3d::Zero());
  }
}

TEST(ProfileMesh, InvalidResolution) {
  const auto p = cylinder(0.05, 0.1);
  EXPECT_EQ(code_of([&] { profile_to_mesh(p, 2, 8); }), ErrorCode::kInvalidResolution);
  EXPECT_EQ(code_of([&] { profile_to_mesh(p, 8, 1); }), ErrorCode::kInvalidResolution);
  EXPECT_EQ(code_of([&] { opening_plane(p, 2); }), ErrorCode::kInvalidResolution);
}

TEST(ProfileMesh, WatertightBelowRim) {
  const ProfileConfig config;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = generate_profile(seed, config);
    const int segments = 40;
    const auto mesh = profile_to_mesh(p, segments, 16);
    int rim = 0;
    for (const auto& [edge, count] : edge_incidence(mesh)) {
      const bool on_rim = mesh.vertices[edge.first].y() == p.height() &&
                          mesh.vertices[edge.second].y() == p.height();
      if (on_rim) {
        ASSERT_EQ(count, 1);
        ++rim;
      } else {
        ASSERT_EQ(count, 2);
      }
    }
    EXPECT_EQ(rim, segments);
  }
}

TEST(LiquidFill, EmptyAtZero) {
  EXPECT_TRUE(flat_liquid_fill(cylinder(0.05, 0.1), 0.0).empty());
  EXPECT_EQ(code_of([] { flat_liquid_fill(cylinder(0.05, 0.1), 1.5); }), ErrorCode::kInvalidArgument);
}

TEST(LiquidFill, CylinderVolume) {
  const double r = 1.0, H = 2.0;
  for (double f : {0.1, 0.35, 0.8, 1.0}) {
    const auto mesh = flat_liquid_fill(cylinder(r, H), f, 256, 32);
    const double expected = kPi * r * r * f * H;
    EXPECT_NEAR(mesh.signed_volume(), expected, 5e-3 * expected) << "fill " << f;
  }
}

TEST(LiquidFill, ClosedAndTopAtRimMinusClearance) {
  const ProfileConfig config;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = generate_profile(seed, config);
    const auto mesh = flat_liquid_fill(p, 1.0, 32, 16, 1e-4);
    double top = -1;
    for (const auto& v : mesh.vertices) top = std::max(top, v.y());
    EXPECT_EQ(top, p.height() - 1e-4);
    for (const auto& [edge, count] : edge_incidence(mesh)) ASSERT_EQ(count, 2);
    EXPECT_GT(mesh.signed_volume(), 0.0);
  }
}

TEST(LiquidFill, VolumeMonotoneInFill) {
  const ProfileConfig config;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = generate_profile(seed, config);
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double v = flat_liquid_fill(p, i / 40.0, 48, 24).signed_volume();
      ASSERT_GE(v, prev - 1e-15);
      prev = v;
    }
  }
}

TEST(OpeningPlane, DiskAreaAndRim) {
  const auto disk = opening_plane(cylinder(1.0, 0.5), 256);
  EXPECT_NEAR(disk.surface_area(), kPi, 1e-3 * kPi);
  const ProfileConfig config;
  const auto p = generate_profile(3, config);
  const auto rim = opening_plane(p, 64);
  for (std::size_t i = 0; i < rim.vertices.size(); ++i) {
    const auto& v = rim.vertices[i];
    EXPECT_EQ(v.y(), p.height());
    if (i + 1 < rim.vertices.size()) {
      EXPECT_NEAR(std::hypot(v.x(), v.z()), p.radius(p.height()), 1e-12);
    }
  }
}

TEST(Scene, DeterministicPerSeed) {
  const SceneConfig config;
  for (std::uint64_t seed : {0ull, 5ull, 99ull}) {
    EXPECT_TRUE(assemble_scene(seed, config) == assemble_scene(seed, config));
  }
  EXPECT_FALSE(assemble_scene(1, config) == assemble_scene(2, config));
}

TEST(Scene, HundredSeedsSatisfyInvariants) {
  const SceneConfig config;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto scene = assemble_scene(seed, config);
    const auto issues = check_scene_invariants(scene);
    ASSERT_TRUE(issues.empty()) << "seed " << seed << ": " << issues.front();
    for (double v : scene.vessel_material.to_array()) ASSERT_TRUE(v >= 0 && v <= 1);
    for (double v : scene.content_material.to_array()) ASSERT_TRUE(v >= 0 && v <= 1);
    ASSERT_GE(scene.fill_fraction, config.fill_fraction.lo);
    ASSERT_LE(scene.fill_fraction, config.fill_fraction.hi);
  }
}

TEST(Scene, InvariantCheckerCatchesEscapedContent) {
  auto scene = assemble_scene(4, SceneConfig{});
  for (auto& v : scene.content.vertices) v.x() += 0.5;
  EXPECT_FALSE(check_scene_invariants(scene).empty());
}

TEST(Scene, ZeroWidthCameraRangesFixPose) {
  SceneConfig config;
  config.camera.distance = {0.4, 0.4};
  config.camera.elevation_deg = {30, 30};
  config.camera.azimuth_deg = {45, 45};
  config.camera.fov_deg = {50, 50};
  const auto a = assemble_scene(1, config), b = assemble_scene(2, config);
  EXPECT_EQ(a.camera.fx(), b.camera.fx());
  EXPECT_EQ(a.camera.rotation(), b.camera.rotation());
  // Same direction from the vessel: the target differs only with the vessel size.
  const Eigen::Vector3d dir(std::cos(kPi / 6) * std::cos(kPi / 4), std::sin(kPi / 6),
                            std::cos(kPi / 6) * std::sin(kPi / 4));
  EXPECT_NEAR((-a.camera.rotation().row(2).transpose() - dir).norm(), 0.0, 1e-12);
}

TEST(Scene, InvalidConfig) {
  SceneConfig config;
  config.camera.width = 0;
  EXPECT_EQ(code_of([&] { assemble_scene(1, config); }), ErrorCode::kInvalidResolution);
  config = SceneConfig{};
  config.fill_fraction = {0.5, 1.2};
  EXPECT_EQ(code_of([&] { assemble_scene(1, config); }), ErrorCode::kInvalidArgument);
}

}  // namespace
