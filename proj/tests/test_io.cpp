#include <filesystem>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xyzmap/image_io.hpp"
#include "xyzmap/manifest.hpp"
#include "xyzmap/pipeline.hpp"
#include "xyzmap/report.hpp"

namespace {

using namespace xyzmap;
namespace fs = std::filesystem;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIoError;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("xyzmap_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

XyzMapf random_xyz(std::mt19937_64& rng, Index h, Index w) {
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  std::bernoulli_distribution valid(0.8);
  XyzMapf::Channels ch;
  for (auto& c : ch) c.resize(h, w);
  MaskArray m(h, w);
  for (Index i = 0; i < h * w; ++i) {
    m.data()[i] = valid(rng);
    for (auto& c : ch) c.data()[i] = u(rng);
  }
  return XyzMapf(ch, m);
}

DepthMapf random_depth(std::mt19937_64& rng, Index h, Index w) {
  std::uniform_real_distribution<float> u(0.01f, 10.0f);
  std::bernoulli_distribution valid(0.7);
  Plane<float> v(h, w);
  MaskArray m(h, w);
  for (Index i = 0; i < h * w; ++i) {
    v.data()[i] = u(rng);
    m.data()[i] = valid(rng);
  }
  return DepthMapf(v, m);
}

template <typename Map>
bool same_bits(const Map& a, const Map& b) {
  if (a.height() != b.height() || a.width() != b.width()) return false;
  return (a.validity() == b.validity()).all();
}

TEST_F(IoTest, PfmRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Index h = 1 + rng() % 40, w = 1 + rng() % 40;
    const auto xyz = random_xyz(rng, h, w);
    write_pfm(dir_ / "m.pfm", xyz);
    const auto back = read_xyz_pfm<float>(dir_ / "m.pfm");
    ASSERT_TRUE(same_bits(xyz, back));
    for (int a = 0; a < 3; ++a) {
      ASSERT_TRUE((xyz.channel(a) == back.channel(a) || !xyz.validity()).all());
    }
    const auto depth = random_depth(rng, h, w);
    write_pfm(dir_ / "d.pfm", depth);
    const auto dback = read_depth_pfm<float>(dir_ / "d.pfm");
    ASSERT_TRUE(same_bits(depth, dback));
    ASSERT_TRUE((depth.values() == dback.values() || !depth.validity()).all());
    // Writing the read-back map reproduces the same bytes.
    const std::string first = slurp(dir_ / "d.pfm");
    write_pfm(dir_ / "d.pfm", dback);
    ASSERT_EQ(slurp(dir_ / "d.pfm"), first);
  }
}

TEST_F(IoTest, PfmLayoutAndSentinels) {
  Plane<double> v(2, 3);
  v << 1, 2, 3, 4, 5, 6;
  MaskArray m = MaskArray::Constant(2, 3, true);
  m(0, 0) = false;
  write_pfm(dir_ / "d.pfm", DepthMapd(v, m));
  const std::string bytes = slurp(dir_ / "d.pfm");
  const std::string header = "Pf\n3 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  ASSERT_EQ(bytes.size(), header.size() + 6 * sizeof(float));
  std::vector<float> payload(6);
  std::memcpy(payload.data(), bytes.data() + header.size(), 6 * sizeof(float));
  // Bottom row first.
  EXPECT_EQ(payload[0], 4.0f);
  EXPECT_EQ(payload[2], 6.0f);
  EXPECT_EQ(payload[4], 2.0f);
  EXPECT_EQ(payload[3], -std::numeric_limits<float>::infinity());
  EXPECT_TRUE(fs::exists(dir_ / "d_valid.pgm"));

  // Without the sibling mask, validity comes from the values.
  fs::remove(dir_ / "d_valid.pgm");
  const auto back = read_depth_pfm<double>(dir_ / "d.pfm");
  EXPECT_TRUE((back.validity() == m).all());

  write_pfm(dir_ / "x.pfm", XyzMapd::constant(2, 2, {1, 2, 3}));
  EXPECT_EQ(slurp(dir_ / "x.pfm").substr(0, 3), "PF\n");
}

TEST_F(IoTest, PfmErrors) {
  write_pfm(dir_ / "x.pfm", XyzMapd::constant(3, 3, {1, 2, 3}));
  EXPECT_EQ(code_of([&] { read_depth_pfm<double>(dir_ / "x.pfm"); }), ErrorCode::kMalformedHeader);

  write_pfm(dir_ / "d.pfm", DepthMapd::from_values(Plane<double>::Constant(4, 4, 1.0)));
  EXPECT_EQ(code_of([&] { read_xyz_pfm<double>(dir_ / "d.pfm"); }), ErrorCode::kMalformedHeader);

  const std::string bytes = slurp(dir_ / "x.pfm");
  spit(dir_ / "t.pfm", bytes.substr(0, bytes.size() - 5));
  EXPECT_EQ(code_of([&] { read_pfm_raw(dir_ / "t.pfm"); }), ErrorCode::kTruncatedPayload);

  spit(dir_ / "bad.pfm", "P6\n3 3\n-1.0\n");
  EXPECT_EQ(code_of([&] { read_pfm_raw(dir_ / "bad.pfm"); }), ErrorCode::kMalformedHeader);
  spit(dir_ / "bad.pfm", "Pf\n3 x\n-1.0\n");
  EXPECT_EQ(code_of([&] { read_pfm_raw(dir_ / "bad.pfm"); }), ErrorCode::kMalformedHeader);
  spit(dir_ / "bad.pfm", "Pf\n3 3\n0\n");
  EXPECT_EQ(code_of([&] { read_pfm_raw(dir_ / "bad.pfm"); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([&] { read_pfm_raw(dir_ / "missing.pfm"); }), ErrorCode::kIoError);
}

TEST_F(IoTest, PfmBigEndianPayload) {
  // Positive scale means big-endian floats.
  std::string bytes = "Pf\n2 1\n1.0\n";
  for (float f : {1.5f, -2.0f}) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(char((u >> s) & 0xff));
  }
  spit(dir_ / "be.pfm", bytes);
  const auto img = read_pfm_raw(dir_ / "be.pfm");
  ASSERT_EQ(img.data.size(), 2u);
  EXPECT_EQ(img.data[0], 1.5f);
  EXPECT_EQ(img.data[1], -2.0f);
}

TEST_F(IoTest, PgmValues) {
  SegMask mask(3, 4);
  mask.set(1, 2);
  mask.set(0, 0);
  write_pgm(dir_ / "m.pgm", mask);
  EXPECT_EQ(slurp(dir_ / "m.pgm").substr(0, 11), "P5\n4 3\n255\n");
  EXPECT_TRUE(read_pgm(dir_ / "m.pgm") == mask);

  spit(dir_ / "full.pgm", "P5\n2 2\n255\n" + std::string(4, char(255)));
  EXPECT_EQ(read_pgm(dir_ / "full.pgm").count(), 4);
  spit(dir_ / "zero.pgm", "P5\n2 2\n255\n" + std::string(4, char(0)));
  EXPECT_FALSE(read_pgm(dir_ / "zero.pgm").any());
  spit(dir_ / "mid.pgm", "P5\n# comment\n3 1\n255\n" + std::string{char(200), char(127), char(128)});
  const auto mid = read_pgm(dir_ / "mid.pgm");
  EXPECT_TRUE(mid(0, 0));
  EXPECT_FALSE(mid(0, 1));
  EXPECT_TRUE(mid(0, 2));
}

TEST_F(IoTest, PgmErrors) {
  spit(dir_ / "a.pgm", "P2\n2 2\n255\n0 0 0 0");
  EXPECT_EQ(code_of([&] { read_pgm(dir_ / "a.pgm"); }), ErrorCode::kMalformedHeader);
  spit(dir_ / "b.pgm", "P5\n2 2\n65535\n");
  EXPECT_EQ(code_of([&] { read_pgm(dir_ / "b.pgm"); }), ErrorCode::kMalformedHeader);
  spit(dir_ / "c.pgm", "P5\n2 2\n255\n\x01");
  EXPECT_EQ(code_of([&] { read_pgm(dir_ / "c.pgm"); }), ErrorCode::kTruncatedPayload);
}

TEST_F(IoTest, PgmRandomRoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Index h = 1 + rng() % 50, w = 1 + rng() % 50;
    const auto mask = oracle::random_mask(rng, h, w, 0.5);
    write_pgm(dir_ / "r.pgm", mask);
    ASSERT_TRUE(read_pgm(dir_ / "r.pgm") == mask);
  }
}

TEST_F(IoTest, ObjExport) {
  TriMesh mesh = ground_quad(1.0);
  write_obj(dir_ / "q.obj", mesh);
  std::istringstream in(slurp(dir_ / "q.obj"));
  int v = 0, f = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) {
      ++f;
      EXPECT_EQ(line.find(" 0"), std::string::npos);  // one-based indices
    }
  }
  EXPECT_EQ(v, 4);
  EXPECT_EQ(f, 2);
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, JsonRoundTrip) {
  SceneConfig config;
  config.profile.slope = {-0.25, 0.125};
  config.profile.max_attempts = 17;
  config.camera.width = 123;
  config.camera.fov_deg = {40.5, 41.0};
  config.fill_fraction = {0.3, 0.3};
  config.angular_segments = 32;
  const Json j = to_json(config);
  EXPECT_TRUE(scene_config_from_json(j) == config);
  EXPECT_TRUE(scene_config_from_json(Json::parse(j.dump(2))) == config);
  EXPECT_TRUE(scene_config_from_json(Json::object()) == SceneConfig{});
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  Json j = to_json(SceneConfig{});
  j["profile"]["slop"] = 1;
  EXPECT_EQ(code_of([&] { scene_config_from_json(j); }), ErrorCode::kInvalidArgument);
  j = to_json(SceneConfig{});
  j["camera"]["width"] = "wide";
  EXPECT_EQ(code_of([&] { scene_config_from_json(j); }), ErrorCode::kInvalidArgument);
  j = to_json(SceneConfig{});
  j["fill_fraction"] = Json::array({0.9, 0.1});
  EXPECT_EQ(code_of([&] { scene_config_from_json(j); }), ErrorCode::kInvalidArgument);
}

TEST(Camera, JsonRoundTripIsExact) {
  const auto scene = assemble_scene(9, SceneConfig{});
  const PinholeCamera back = camera_from_json(Json::parse(to_json(scene.camera).dump(2)));
  EXPECT_EQ(back.fx(), scene.camera.fx());
  EXPECT_EQ(back.cx(), scene.camera.cx());
  EXPECT_EQ(back.width(), scene.camera.width());
  EXPECT_EQ(back.rotation(), scene.camera.rotation());
  EXPECT_EQ(back.translation(), scene.camera.translation());
}

TEST_F(IoTest, ManifestStableAndReadable) {
  SceneConfig config;
  config.camera.width = config.camera.height = 48;
  const auto a = generate_scene(21, config, {}, dir_ / "a");
  const auto b = generate_scene(21, config, {}, dir_ / "b");
  EXPECT_EQ(a.filename(), manifest_name(21));
  EXPECT_EQ(fnv1a_hex(slurp(a)), fnv1a_hex(slurp(b)));
  EXPECT_EQ(slurp(a), slurp(b));

  const SceneManifest m = read_manifest(a);
  EXPECT_EQ(m.seed, 21u);
  EXPECT_TRUE(m.config == config);
  const auto* xyz = m.find("content", "xyz");
  ASSERT_NE(xyz, nullptr);
  EXPECT_EQ(xyz->path, artifact_name(21, "content", "xyz", "pfm"));
  EXPECT_EQ(xyz->hash, file_hash(dir_ / "a" / xyz->path));
  for (const auto& f : m.files) EXPECT_TRUE(fs::exists(dir_ / "a" / f.path)) << f.path;
  EXPECT_TRUE(verify_replay(a, dir_ / "scratch").empty());

  Json j = Json::parse(slurp(a));
  j["format_version"] = 99;
  spit(dir_ / "v99.json", j.dump(2));
  EXPECT_EQ(code_of([&] { read_manifest(dir_ / "v99.json"); }), ErrorCode::kMalformedHeader);
}

TEST_F(IoTest, ReplayDetectsTampering) {
  SceneConfig config;
  config.camera.width = config.camera.height = 32;
  const auto path = generate_scene(3, config, {}, dir_);
  Json j = Json::parse(slurp(path));
  j["files"][0]["fnv1a64"] = "0000000000000000";
  spit(path, j.dump(2));
  EXPECT_FALSE(verify_replay(path, dir_ / "scratch").empty());
}

TEST(Report, AggregatesAreRowMeans) {
  ReportDocument doc;
  doc.mode = EvalMode::kVesselScale;
  doc.tool_version = kToolVersion;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (std::uint64_t seed : {5u, 2u, 9u}) {
    for (const char* object : {"content", "vessel"}) {
      ReportRow row;
      row.seed = seed;
      row.object = object;
      EvalReport e;
      e.mae = u(rng);
      e.mad = u(rng);
      e.max_dst = 2.0;
      e.mae_over_mad = e.mae / e.mad;
      e.r_squared = u(rng);
      row.eval = e;
      doc.rows.push_back(row);
    }
  }
  ReportRow missing;
  missing.seed = 1;
  missing.object = "vessel";
  missing.status = RowStatus::kMissing;
  missing.message = "MissingPrediction";
  doc.rows.push_back(missing);
  finalize(doc);

  EXPECT_EQ(doc.rows.front().seed, 1u);
  EXPECT_EQ(doc.rows[1].object, "vessel");
  EXPECT_EQ(doc.rows[2].object, "content");
  for (const auto& agg : doc.aggregates) {
    double sum = 0.0, ratio = 0.0;
    int n = 0;
    for (const auto& row : doc.rows) {
      if (row.object != agg.object || row.status != RowStatus::kOk) continue;
      sum += row.eval->mae;
      ratio += row.eval->mae_over_mad;
      ++n;
    }
    EXPECT_EQ(agg.rows, 3);
    EXPECT_NEAR(agg.eval->mae, sum / n, 1e-12);
    EXPECT_NEAR(agg.eval->mae_over_mad, ratio / n, 1e-12);
  }
  EXPECT_EQ(exit_code(doc), kExitPartial);

  std::ostringstream csv, text;
  write_csv(csv, doc);
  write_text(text, doc);
  EXPECT_EQ(csv.str().rfind("# mode=vessel-scale", 0), 0u);
  EXPECT_NE(csv.str().find("ratios=per-image-mean"), std::string::npos);
  EXPECT_NE(text.str().find("MAE/MAD %"), std::string::npos);
  EXPECT_NE(text.str().find("Chamfer/MaxDst %"), std::string::npos);
}

TEST(Parsers, SeedsDilationsResolution) {
  EXPECT_EQ(parse_seeds("3,1-4,10"), (std::vector<std::uint64_t>{1, 2, 3, 4, 10}));
  EXPECT_EQ(code_of([] { parse_seeds("4-1"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { parse_seeds("x"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_dilations("1,2,8"), (std::vector<int>{1, 2, 8}));
  EXPECT_EQ(code_of([] { parse_dilations("2,1"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_resolution("256"), (std::pair<Index, Index>{256, 256}));
  EXPECT_EQ(parse_resolution("320x240"), (std::pair<Index, Index>{320, 240}));
  EXPECT_EQ(code_of([] { parse_resolution("0"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_loss_kind("translation"), LossKind::kTranslationInvariant);
  EXPECT_EQ(parse_eval_mode("content-scale"), EvalMode::kContentScale);
  EXPECT_EQ(code_of([] { parse_eval_mode("both"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
