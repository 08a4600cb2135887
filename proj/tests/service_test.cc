// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/service.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include "polyscene/errors.h"
#include "polyscene/obj.h"
#include "polyscene/png.h"
#include "polyscene/registry.h"
#include "test_util.h"

namespace polyscene::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing_util::TempDir;

constexpr const char* kCubeId = "ps-golden-cube";

scenegen::Scene cube_scene() {
  return testing_util::mesh_scene({make_box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5})},
                                  kCubeId);
}

render::CameraIntrinsics tiny() {
  render::CameraIntrinsics intr;
  intr.width = 4;
  intr.height = 3;
  return intr;
}

// Fills the image with a lighting-dependent color so responses are stable.
render::Image stub_render(const scenegen::Scene&, const render::CameraPose&,
                          const render::LightingConfig& l,
                          const render::CameraIntrinsics& intr,
                          const render::RenderOptions&) {
  const render::Rgb fill = l.mode == render::Lighting::kFixedSpotlight
                               ? render::Rgb{1, 2, 3}
                               : render::Rgb{4, 5, 6};
  return render::Image(intr.width, intr.height, fill);
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() : registry_(tmp_.path() / "scenes") {
    registered_ = registry_.register_scene(cube_scene());
  }

  ServiceConfig config() const {
    ServiceConfig c;
    c.intrinsics = tiny();
    return c;
  }

  TempDir tmp_;
  SceneRegistry registry_;
  std::string registered_;
};

fs::path data_dir() {
  const char* env = std::getenv("POLYSCENE_TEST_DATA");
  return env ? fs::path(env) : fs::path(__FILE__).parent_path() / "data";
}

TEST_F(ServiceTest, GoldenTranscript) {
  RenderService service(registry_, config(), stub_render);
  std::ifstream in(data_dir() / "wire_transcript.jsonl");
  ASSERT_TRUE(in) << "missing transcript";
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++cases;
    const json entry = json::parse(line);
    const std::string request = entry["request"].is_string()
                                    ? entry["request"].get<std::string>()
                                    : entry["request"].dump();
    std::vector<std::string> progress;
    const RenderResponse r =
        service.handle(request, [&](const std::string& m) { progress.push_back(m); });
    json wire = json::parse(to_wire(r));
    SCOPED_TRACE(request);
    EXPECT_EQ(progress, entry.value("progress", std::vector<std::string>{}));
    if (entry.contains("image_fill")) {
      ASSERT_TRUE(wire.contains("image"));
      const auto fill = entry["image_fill"].get<std::vector<int>>();
      const render::Image img = render::decode_png(base64_decode(wire["image"].get<std::string>()));
      EXPECT_EQ(img, render::Image(4, 3, render::Rgb{std::uint8_t(fill[0]),
                                                     std::uint8_t(fill[1]),
                                                     std::uint8_t(fill[2])}));
      wire.erase("image");
    } else {
      EXPECT_FALSE(r.success());
    }
    EXPECT_EQ(wire, entry["response"]);
  }
  EXPECT_EQ(cases, 13);
}

TEST_F(ServiceTest, RegistryIdAndSceneIdBothResolve) {
  RenderService service(registry_, config(), stub_render);
  const std::string req = R"(,"lighting":"fixed","random_cam":true})";
  EXPECT_EQ(service.handle(R"({"ID":")" + registered_ + "\"" + req).status, "SUCCESS");
  EXPECT_EQ(service.handle(R"({"ID":")" + std::string(kCubeId) + "\"" + req).status,
            "SUCCESS");
}

TEST_F(ServiceTest, CompatStatusAndFailures) {
  ServiceConfig c = config();
  c.compat_200 = true;
  RenderService compat(registry_, c, stub_render);
  const std::string req =
      R"({"ID":"ps-golden-cube","lighting":"fixed","random_cam":true})";
  EXPECT_EQ(compat.handle(req).status, "200");

  RenderService broken(registry_, config(),
                       [](auto&&...) -> render::Image { throw std::runtime_error("gpu on fire"); });
  const RenderResponse f = broken.handle(req);
  EXPECT_EQ(f.status, "FAILURE: gpu on fire");
  EXPECT_EQ(to_wire(f), R"({"status":"FAILURE: gpu on fire"})");

  ServiceConfig quick = config();
  quick.timeout = std::chrono::milliseconds(20);
  RenderService slow(registry_, quick, [](auto&&... args) {
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    return stub_render(args...);
  });
  EXPECT_EQ(slow.handle(req).status, "FAILURE: render timed out");
}

TEST_F(ServiceTest, RealRendererTimesOut) {
  ServiceConfig c = config();
  c.intrinsics = render::CameraIntrinsics{};
  c.timeout = std::chrono::milliseconds(0);
  RenderService service(registry_, c);
  const RenderResponse r = service.handle(
      R"({"ID":"ps-golden-cube","lighting":"fixed","random_cam":true})");
  EXPECT_EQ(r.status, "FAILURE: render timed out");
}

TEST_F(ServiceTest, SeededRandomCamerasAreReproducible) {
  ServiceConfig c = config();
  c.seed = 7;
  RenderService a(registry_, c, stub_render);
  RenderService b(registry_, c, stub_render);
  const std::string req =
      R"({"ID":"ps-golden-cube","lighting":"fixed","random_cam":true})";
  std::set<std::string> poses;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const RenderResponse ra = a.handle(req);
    const RenderResponse rb = b.handle(req);
    ASSERT_TRUE(ra.cam_pose && rb.cam_pose);
    EXPECT_EQ(*ra.cam_pose, *rb.cam_pose);
    RngStream rng(RngStream::derive_seed(7, i));
    EXPECT_EQ(*ra.cam_pose, render::sample_camera_pose(rng));
    EXPECT_NEAR(geom::norm(ra.cam_pose->position), render::kCameraRadius, 1e-12);
    poses.insert(pose_json(*ra.cam_pose).dump());
  }
  EXPECT_EQ(poses.size(), 4u);
}

TEST_F(ServiceTest, ExplicitPoseRendersLikeDirectCall) {
  RenderService service(registry_, config());
  const RenderResponse r = service.handle(
      R"({"ID":"ps-golden-cube","lighting":"homogeneous","random_cam":false,)"
      R"("camera":[0,0,5,1,0,0,0]})");
  ASSERT_TRUE(r.success());
  const auto scene = registry_.lookup(kCubeId);
  const render::Image direct = render::render(
      *scene, {{0, 0, 5}, {1, 0, 0, 0}},
      render::LightingConfig::for_mode(render::Lighting::kHomogeneous), tiny());
  EXPECT_EQ(render::decode_png(base64_decode(*r.image)), direct);
}

TEST(Validation, KeyAliasesAndPrecedence) {
  auto parsed = parse_request(
      R"({"id":"a","lighting":"homogeneous","light_fixed":true,"random":"TRUE"})");
  ASSERT_TRUE(std::holds_alternative<RenderRequest>(parsed));
  const auto& req = std::get<RenderRequest>(parsed);
  EXPECT_EQ(req.id, "a");
  EXPECT_EQ(req.lighting, "homogeneous");
  auto valid = validate_request(req);
  ASSERT_TRUE(std::holds_alternative<ValidRequest>(valid));
  EXPECT_EQ(std::get<ValidRequest>(valid).lighting, render::Lighting::kHomogeneous);
  EXPECT_FALSE(std::get<ValidRequest>(valid).camera);
}

TEST(Validation, CameraIgnoredForRandomRequests) {
  auto parsed = parse_request(
      R"({"ID":"a","lighting":"fixed","random_cam":true,"camera":[0,0,5,0,0,0,0]})");
  auto valid = validate_request(std::get<RenderRequest>(parsed));
  ASSERT_TRUE(std::holds_alternative<ValidRequest>(valid));
  EXPECT_FALSE(std::get<ValidRequest>(valid).camera);
}

TEST(Validation, QuaternionNormalization) {
  RenderRequest req{"a", "fixed", false, std::array<double, 7>{0, 0, 5, 0, 3, 4, 0}};
  const auto valid = std::get<ValidRequest>(validate_request(req));
  EXPECT_NEAR(valid.camera->orientation.x, 0.6, 1e-15);
  EXPECT_NEAR(valid.camera->orientation.y, 0.8, 1e-15);
  req.camera = {0, 0, 5, 1e-10, 0, 0, 0};
  EXPECT_EQ(std::get<std::vector<std::string>>(validate_request(req)),
            std::vector<std::string>{"degenerate quaternion"});
  req.camera = {0, 0, NAN, 1, 0, 0, 0};
  EXPECT_EQ(std::get<std::vector<std::string>>(validate_request(req)),
            std::vector<std::string>{"camera values must be finite"});
}

TEST(Base64, Rfc4648Vectors) {
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},          {"f", "Zg=="},         {"fo", "Zm8="},
      {"foo", "Zm9v"},   {"foob", "Zm9vYg=="},  {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, encoded] : vectors) {
    const std::vector<std::uint8_t> bytes(plain, plain + std::strlen(plain));
    EXPECT_EQ(base64_encode(bytes), encoded);
    EXPECT_EQ(base64_decode(encoded), bytes);
  }
  EXPECT_THROW(base64_decode("Zm9"), ParseError);
  EXPECT_THROW(base64_decode("@@@@"), ParseError);
}

TEST(Registry, PersistsAndResolves) {
  TempDir tmp;
  const fs::path dir = tmp.path() / "reg";
  std::string id;
  {
    SceneRegistry reg(dir);
    id = reg.register_scene(cube_scene());
    EXPECT_TRUE(std::regex_match(id, std::regex("[0-9a-f]{32}")));
    EXPECT_TRUE(fs::exists(reg.obj_path(id)));
    EXPECT_EQ(reg.ids(), std::vector<std::string>{id});
    EXPECT_EQ(reg.lookup("ps-missing"), nullptr);
  }
  SceneRegistry reopened(dir);
  SceneRegistry other(dir);
  ASSERT_NE(reopened.lookup(id), nullptr);
  EXPECT_EQ(reopened.lookup(id)->objects.size(), 1u);
  EXPECT_EQ(reopened.lookup(kCubeId), reopened.lookup(id));
  // A record written by another instance is found on a miss.
  scenegen::Scene second = cube_scene();
  second.id = "ps-second";
  const std::string id2 = other.register_scene(second);
  ASSERT_NE(reopened.lookup(id2), nullptr);
  EXPECT_NE(reopened.lookup("ps-second"), nullptr);
  EXPECT_EQ(reopened.ids().size(), 2u);
}

TEST(Registry, LookupReturnsIdenticalScene) {
  TempDir tmp;
  SceneRegistry reg(tmp.path());
  const scenegen::Scene scene = scenegen::generate_scene(
      {.num_objects = 2, .layout = scenegen::Layout::kTouching}, 5);
  const std::string a = reg.register_scene(scene);
  const std::string b = reg.register_scene(scene);
  EXPECT_NE(a, b);
  EXPECT_EQ(dataset::export_obj(*reg.lookup(a)), dataset::export_obj(scene));
  EXPECT_EQ(dataset::export_obj(*SceneRegistry(tmp.path()).lookup(b)),
            dataset::export_obj(scene));
}

TEST(Registry, TenThousandRegistrationsNeverCollide) {
  TempDir tmp;
  SceneRegistry reg(tmp.path());
  const auto scene = testing_util::mesh_scene(
      {make_box({-0.1, -0.1, -0.1}, {0.1, 0.1, 0.1})}, "ps-small");
  std::set<std::string> ids;
  for (int i = 0; i < 10000; ++i) ids.insert(reg.register_scene(scene));
  EXPECT_EQ(ids.size(), 10000u);
  EXPECT_EQ(reg.ids().size(), 10000u);
}

}  // namespace
}  // namespace polyscene::service
