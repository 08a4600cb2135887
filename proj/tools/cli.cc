// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.h"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polyscene/dataset.h"
#include "polyscene/errors.h"
#include "polyscene/obj.h"
#include "polyscene/png.h"
#include "polyscene/registry.h"
#include "polyscene/scenegen.h"
#include "polyscene/server.h"
#include "polyscene/service.h"

namespace polyscene::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

fs::path resolve_data_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("POLYSCENE_DATA"); env && *env) return env;
  return "polyscene-data";
}

namespace {

struct Options {
  std::optional<std::string> data_dir;

  // Scene parameters.
  int objects = 1;
  std::string layout = "separate";
  std::string lighting = "fixed";
  int views = 1;
  std::optional<std::uint64_t> seed;
  int max_attempts = scenegen::kDefaultMaxAttempts;
  std::string resolution = "1920x1080";
  bool supersample = false;

  std::optional<std::string> id;
  std::optional<std::string> out;
  std::optional<std::string> archive;

  bool random = false;
  std::optional<std::string> camera;
  std::optional<std::string> annotation;

  std::string input;

  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  bool compat_200 = false;
  int timeout_s = 60;

  int samples = 1000;
  std::string format = "json";
};

render::CameraIntrinsics parse_resolution(const std::string& text) {
  const auto x = text.find_first_of("xX");
  render::CameraIntrinsics intr;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    intr.width = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    intr.height = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw InvalidArgument("resolution must look like WIDTHxHEIGHT (got '" +
                          text + "')");
  }
  intr.validate();
  return intr;
}

scenegen::UserParams user_params(const Options& o) {
  scenegen::UserParams u;
  u.num_objects = o.objects;
  u.num_views = o.views;
  const auto layout = scenegen::parse_layout(o.layout);
  if (!layout) throw InvalidArgument("unknown layout '" + o.layout + "'");
  u.layout = *layout;
  const auto lighting = scenegen::parse_lighting(o.lighting);
  if (!lighting) throw InvalidArgument("unknown lighting '" + o.lighting + "'");
  u.lighting = *lighting;
  u.validate();
  return u;
}

std::uint64_t seed_or_random(const Options& o) {
  if (o.seed) return *o.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

scenegen::Scene load_scene(const service::SceneRegistry& registry,
                           const std::string& id) {
  auto scene = registry.lookup(id);
  if (!scene) throw InvalidArgument("unknown scene id '" + id + "'");
  return *scene;
}

int cmd_generate(const Options& o, std::ostream& out) {
  const auto user = user_params(o);
  const std::uint64_t seed = seed_or_random(o);
  const fs::path data = resolve_data_dir(o.data_dir);
  const auto scene = scenegen::generate_scene(user, seed, o.max_attempts);
  service::SceneRegistry registry(data / "scenes");
  const std::string id = registry.register_scene(scene);
  const fs::path obj = o.out ? fs::path(*o.out) : registry.obj_path(id);
  if (o.out) dataset::write_file(obj, dataset::export_obj(scene));
  const auto& src = std::get<scenegen::GeneratedSource>(scene.source);
  ordered_json j;
  j["id"] = id;
  j["scene_id"] = scene.id;
  j["obj"] = obj.string();
  j["seed"] = seed;
  j["attempts"] = src.attempts;
  j["num_planes"] = src.params.num_planes;
  j["prob_intersection"] = src.params.prob_intersection;
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_dataset(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path data = resolve_data_dir(o.data_dir);
  service::SceneRegistry registry(data / "scenes");
  const std::uint64_t seed = seed_or_random(o);
  dataset::DatasetJob job;
  const auto lighting = scenegen::parse_lighting(o.lighting);
  if (!lighting) throw InvalidArgument("unknown lighting '" + o.lighting + "'");
  if (o.views < 1) throw InvalidArgument("num_views must be >= 1");
  job.intrinsics = parse_resolution(o.resolution);
  std::string id;
  if (o.id) {
    job.scene = load_scene(registry, *o.id);
    id = *o.id;
  } else {
    job.scene = scenegen::generate_scene(user_params(o), seed, o.max_attempts);
    id = registry.register_scene(job.scene);
  }
  job.scene.user_params.num_views = o.views;
  job.num_views = o.views;
  job.lighting = *lighting;
  job.seed = seed;
  job.render_options.supersample = o.supersample;
  job.output_dir = o.out ? fs::path(*o.out) : data / "datasets" / job.scene.id;
  const auto manifest = dataset::run_dataset_job(job);
  for (const auto& f : manifest.failures) {
    err << "polyscene: view " << f.view_index << " failed: " << f.reason << "\n";
  }
  const fs::path archive = dataset::package_dataset(
      job.output_dir,
      o.archive ? std::optional<fs::path>(*o.archive) : std::nullopt);
  ordered_json j;
  j["id"] = id;
  j["scene_id"] = job.scene.id;
  j["seed"] = seed;
  j["output_dir"] = job.output_dir.string();
  j["archive"] = archive.string();
  j["views"] = manifest.views.size();
  j["failures"] = manifest.failures.size();
  out << j.dump(2) << "\n";
  return kOk;
}

std::array<double, 7> parse_camera(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
  if (parts.size() != 7) {
    throw InvalidArgument("--camera needs 7 comma-separated values x,y,z,qw,qx,qy,qz");
  }
  std::array<double, 7> c{};
  for (std::size_t i = 0; i < 7; ++i) {
    try {
      std::size_t used = 0;
      c[i] = std::stod(parts[i], &used);
      while (used < parts[i].size() &&
             std::isspace(static_cast<unsigned char>(parts[i][used]))) {
        ++used;
      }
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad camera value '" + parts[i] + "'");
    }
  }
  return c;
}

int cmd_view(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path data = resolve_data_dir(o.data_dir);
  service::SceneRegistry registry(data / "scenes");
  ordered_json req;
  std::string lighting = o.lighting;
  std::optional<std::array<double, 7>> camera;
  std::optional<std::string> id = o.id;
  if (o.annotation) {
    const auto bytes = dataset::read_file(*o.annotation);
    json parsed;
    try {
      parsed = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
      throw ParseError(0, std::string("annotation: ") + e.what());
    }
    const auto a = dataset::annotation_from_json(parsed);
    const auto& t = a.camera_transform;
    camera = {t.translation.x, t.translation.y, t.translation.z, t.rotation.w,
              t.rotation.x,    t.rotation.y,    t.rotation.z};
    if (!id) id = a.scene_id;
    lighting = std::string(scenegen::to_string(a.user_params.lighting));
  }
  if (o.camera) camera = parse_camera(*o.camera);
  if (!id) throw InvalidArgument("--id is required");
  if (o.random == camera.has_value()) {
    throw InvalidArgument("give exactly one of --random or --camera/--annotation");
  }
  req["ID"] = *id;
  req["lighting"] = lighting;
  req["random_cam"] = o.random;
  if (camera) req["camera"] = *camera;

  service::ServiceConfig config;
  config.intrinsics = parse_resolution(o.resolution);
  config.seed = o.seed;
  config.timeout = std::chrono::seconds(o.timeout_s);
  service::RenderService svc(registry, config);
  const auto r = svc.handle(req.dump());
  if (!r.success()) {
    err << "polyscene: " << r.status << "\n";
    return r.status.rfind("INVALID", 0) == 0 ? kValidation : kIo;
  }
  const fs::path png = o.out ? fs::path(*o.out) : fs::path(*id + "_view.png");
  dataset::write_file(png, service::base64_decode(*r.image));
  ordered_json j;
  j["status"] = r.status;
  j["image_file"] = png.string();
  j["cam_pose"] = service::pose_json(*r.cam_pose);
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_import(const Options& o, std::ostream& out, std::ostream& err) {
  const auto bytes = dataset::read_file(o.input);
  const auto scene = dataset::import_obj(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
      fs::path(o.input).filename().string());
  for (const auto& w : scene.warnings) err << "polyscene: warning: " << w << "\n";
  service::SceneRegistry registry(resolve_data_dir(o.data_dir) / "scenes");
  const std::string id = registry.register_scene(scene);
  ordered_json j;
  j["id"] = id;
  j["scene_id"] = scene.id;
  j["objects"] = scene.objects.size();
  j["layout"] = scenegen::to_string(scene.user_params.layout);
  j["warnings"] = scene.warnings;
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  service::SceneRegistry registry(resolve_data_dir(o.data_dir) / "scenes");
  service::ServiceConfig config;
  config.intrinsics = parse_resolution(o.resolution);
  config.compat_200 = o.compat_200;
  config.timeout = std::chrono::seconds(o.timeout_s);
  config.seed = o.seed;
  service::RenderService svc(registry, config);

  // Block termination signals in every thread; this one waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Server server(svc, o.address, o.port);
  out << "polyscene: listening on " << o.address << ":" << server.port()
      << " (data " << registry.directory().string() << ")" << std::endl;
  std::thread acceptor([&server] { server.run(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  acceptor.join();
  return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  scenegen::CalibrationOptions c;
  c.samples = o.samples;
  if (o.seed) c.seed = *o.seed;
  if (c.samples < 1) throw InvalidArgument("samples must be >= 1");
  const auto table = scenegen::calibrate(c);
  std::string text;
  if (o.format == "cpp") {
    for (const auto& e : table) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "    {Layout::k%s, %d, %d, %.3f, %.3f},\n",
                    e.layout == scenegen::Layout::kSeparate   ? "Separate"
                    : e.layout == scenegen::Layout::kTouching ? "Touching"
                                                              : "Intersecting",
                    e.num_objects, e.num_planes, e.prob_intersection,
                    e.success_rate);
      text += buf;
    }
  } else if (o.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& e : table) {
      arr.push_back({{"layout", scenegen::to_string(e.layout)},
                     {"num_objects", e.num_objects},
                     {"num_planes", e.num_planes},
                     {"prob_intersection", e.prob_intersection},
                     {"success_rate", e.success_rate}});
    }
    text = arr.dump(2) + "\n";
  } else {
    throw InvalidArgument("--format must be json or cpp");
  }
  if (o.out) {
    dataset::write_file(*o.out, text);
  } else {
    out << text;
  }
  return kOk;
}

void add_scene_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--objects", o.objects, "Number of objects (>= 1)");
  cmd->add_option("--layout", o.layout, "separate, touching or intersecting");
  cmd->add_option("--seed", o.seed, "64-bit seed; random when omitted");
  cmd->add_option("--max-attempts", o.max_attempts, "Generator attempt budget");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"Polyhedral scene generator", "polyscene"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags win");
  app.add_option("--data-dir", o.data_dir,
                 "Data directory (default $POLYSCENE_DATA or ./polyscene-data)");

  auto* generate = app.add_subcommand("generate", "Generate a scene, write OBJ, print its ID");
  add_scene_flags(generate, o);
  generate->add_option("--lighting", o.lighting, "Recorded lighting: fixed or homogeneous");
  generate->add_option("--views", o.views, "Recorded number of views");
  generate->add_option("--out", o.out, "Also write the OBJ here");

  auto* dataset = app.add_subcommand("dataset", "Generate a scene and render a dataset archive");
  add_scene_flags(dataset, o);
  dataset->add_option("--lighting", o.lighting, "fixed or homogeneous");
  dataset->add_option("--views", o.views, "Number of rendered views");
  dataset->add_option("--id", o.id, "Use a registered scene instead of generating one");
  dataset->add_option("--out", o.out, "Output directory");
  dataset->add_option("--archive", o.archive, "Archive path (default <out>.zip)");
  dataset->add_option("--resolution", o.resolution, "WIDTHxHEIGHT");
  dataset->add_flag("--supersample", o.supersample, "2x2 supersampling");

  auto* view = app.add_subcommand("view", "Render one view of a registered scene");
  view->add_option("--id", o.id, "Registry ID or scene ID");
  view->add_flag("--random", o.random, "Random camera on the radius-5 sphere");
  view->add_option("--camera", o.camera, "Pose x,y,z,qw,qx,qy,qz");
  view->add_option("--annotation", o.annotation, "Take ID, pose and lighting from an annotation file");
  view->add_option("--lighting", o.lighting, "fixed or homogeneous");
  view->add_option("--seed", o.seed, "Seed for --random");
  view->add_option("--out", o.out, "PNG path (default <id>_view.png)");
  view->add_option("--resolution", o.resolution, "WIDTHxHEIGHT");
  view->add_option("--timeout", o.timeout_s, "Render timeout in seconds");

  auto* import = app.add_subcommand("import", "Register a scene from an OBJ file");
  import->add_option("path", o.input, "OBJ file")->required();

  auto* serve = app.add_subcommand("serve", "Run the render service");
  serve->add_option("--address", o.address, "Listen address");
  serve->add_option("--port", o.port, "Listen port");
  serve->add_flag("--compat-200", o.compat_200, "Report success as \"200\"");
  serve->add_option("--resolution", o.resolution, "WIDTHxHEIGHT");
  serve->add_option("--timeout", o.timeout_s, "Per-request render timeout in seconds");
  serve->add_option("--seed", o.seed, "Seed random cameras deterministically");

  auto* calibrate = app.add_subcommand("calibrate", "Rebuild the parameter conversion table");
  calibrate->add_option("--samples", o.samples, "Arrangements per plane count");
  calibrate->add_option("--seed", o.seed, "Sweep seed");
  calibrate->add_option("--format", o.format, "json or cpp");
  calibrate->add_option("--out", o.out, "Write the table here");

  std::vector<std::string> argv_storage{"polyscene"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*generate) return cmd_generate(o, out);
    if (*dataset) return cmd_dataset(o, out, err);
    if (*view) return cmd_view(o, out, err);
    if (*import) return cmd_import(o, out, err);
    if (*serve) return cmd_serve(o, out);
    if (*calibrate) return cmd_calibrate(o, out);
  } catch (const GenerationExhausted& e) {
    err << "polyscene: " << e.what() << "\n";
    return kExhausted;
  } catch (const IoError& e) {
    err << "polyscene: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "polyscene: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "polyscene: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}

}  // namespace polyscene::cli
