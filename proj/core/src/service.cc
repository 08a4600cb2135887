// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/service.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polyscene/errors.h"
#include "polyscene/png.h"

namespace polyscene::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 7> kCamKeys = {
    "cam_x", "cam_y", "cam_z", "cam_qw", "cam_qx", "cam_qy", "cam_qz"};
constexpr std::array<const char*, 7> kCameraObjectKeys = {"x",  "y",  "z", "qw",
                                                          "qx", "qy", "qz"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Booleans may arrive as JSON booleans or as "true" / "false" strings.
std::optional<bool> as_bool(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    if (s == "true") return true;
    if (s == "false") return false;
  }
  return std::nullopt;
}

const json* first_of(const json& j, std::initializer_list<const char*> keys,
                     const char** found) {
  for (const char* k : keys) {
    if (auto it = j.find(k); it != j.end()) {
      *found = k;
      return &*it;
    }
  }
  return nullptr;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

RenderResponse invalid(const std::string& reason) {
  return {"INVALID: " + reason, std::nullopt, std::nullopt};
}

RenderResponse failure(const std::string& reason) {
  return {"FAILURE: " + reason, std::nullopt, std::nullopt};
}

}  // namespace

std::variant<RenderRequest, std::vector<std::string>> parse_request(
    std::string_view text) {
  const json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::vector<std::string>{"malformed JSON"};
  if (!j.is_object()) {
    return std::vector<std::string>{"request must be a JSON object"};
  }
  RenderRequest req;
  std::vector<std::string> errors;
  const char* key = nullptr;

  if (const json* v = first_of(j, {"ID", "id"}, &key)) {
    if (v->is_string()) {
      req.id = v->get<std::string>();
    } else {
      errors.push_back(std::string("field '") + key + "' must be a string");
    }
  }

  if (const json* v = first_of(j, {"lighting"}, &key)) {
    if (v->is_string()) {
      req.lighting = v->get<std::string>();
    } else {
      errors.push_back("field 'lighting' must be a string");
    }
  } else if (const json* f = first_of(j, {"light_fixed"}, &key)) {
    if (auto b = as_bool(*f)) {
      req.lighting = *b ? "fixed" : "homogeneous";
    } else {
      errors.push_back("field 'light_fixed' must be a boolean");
    }
  }

  if (const json* v = first_of(j, {"random_cam", "random"}, &key)) {
    if (auto b = as_bool(*v)) {
      req.random = *b;
    } else {
      errors.push_back(std::string("field '") + key + "' must be a boolean");
    }
  }

  const bool has_cam_keys = std::any_of(
      kCamKeys.begin(), kCamKeys.end(), [&](const char* k) { return j.contains(k); });
  if (has_cam_keys) {
    std::array<double, 7> cam{};
    bool ok = true;
    for (std::size_t i = 0; i < kCamKeys.size(); ++i) {
      auto it = j.find(kCamKeys[i]);
      if (it == j.end()) {
        errors.push_back(std::string("incomplete camera: missing '") +
                         kCamKeys[i] + "'");
        ok = false;
      } else if (!it->is_number()) {
        errors.push_back(std::string("field '") + kCamKeys[i] +
                         "' must be a number");
        ok = false;
      } else {
        cam[i] = it->get<double>();
      }
    }
    if (ok) req.camera = cam;
  } else if (auto it = j.find("camera"); it != j.end() && !it->is_null()) {
    std::array<double, 7> cam{};
    bool ok = true;
    if (it->is_array() && it->size() == 7) {
      for (std::size_t i = 0; i < 7; ++i) {
        if (!(*it)[i].is_number()) ok = false;
        else cam[i] = (*it)[i].get<double>();
      }
    } else if (it->is_object()) {
      for (std::size_t i = 0; i < 7; ++i) {
        auto f = it->find(kCameraObjectKeys[i]);
        if (f == it->end() || !f->is_number()) ok = false;
        else cam[i] = f->get<double>();
      }
    } else {
      ok = false;
    }
    if (ok) {
      req.camera = cam;
    } else {
      errors.push_back("field 'camera' must hold 7 numbers x, y, z, qw, qx, qy, qz");
    }
  }

  if (!errors.empty()) return errors;
  return req;
}

std::variant<ValidRequest, std::vector<std::string>> validate_request(
    const RenderRequest& req) {
  std::vector<std::string> errors;
  ValidRequest out;
  if (!req.id || req.id->empty()) {
    errors.push_back("missing field 'ID'");
  } else {
    out.id = *req.id;
  }
  if (!req.lighting) {
    errors.push_back("missing field 'lighting'");
  } else if (auto l = scenegen::parse_lighting(*req.lighting)) {
    out.lighting = *l;
  } else {
    errors.push_back("unknown lighting '" + *req.lighting + "'");
  }
  if (!req.random) {
    errors.push_back("missing field 'random_cam'");
  } else if (!*req.random) {
    if (!req.camera) {
      errors.push_back("camera required");
    } else {
      const auto& c = *req.camera;
      const bool finite = std::all_of(c.begin(), c.end(),
                                      [](double v) { return std::isfinite(v); });
      geom::Quaternion q{c[3], c[4], c[5], c[6]};
      const double n = q.norm();
      if (!finite) {
        errors.push_back("camera values must be finite");
      } else if (!(n > 1e-9)) {
        errors.push_back("degenerate quaternion");
      } else {
        // Leave unit quaternions untouched so equal inputs render equally.
        if (std::abs(n - 1.0) > 1e-12) q = q.normalized();
        out.camera = render::CameraPose{{c[0], c[1], c[2]}, q};
      }
    }
  }
  if (!errors.empty()) return errors;
  return out;
}

ordered_json pose_json(const render::CameraPose& pose) {
  return {{"cam_x", pose.position.x},     {"cam_y", pose.position.y},
          {"cam_z", pose.position.z},     {"cam_qw", pose.orientation.w},
          {"cam_qx", pose.orientation.x}, {"cam_qy", pose.orientation.y},
          {"cam_qz", pose.orientation.z}};
}

std::string to_wire(const RenderResponse& r) {
  ordered_json j;
  j["status"] = r.status;
  if (r.image) j["image"] = *r.image;
  if (r.cam_pose) j["cam_pose"] = pose_json(*r.cam_pose);
  return j.dump();
}

RenderService::RenderService(const SceneRegistry& registry, ServiceConfig config,
                             Renderer renderer)
    : registry_(registry), config_(std::move(config)), renderer_(std::move(renderer)) {
  config_.intrinsics.validate();
  if (!renderer_) {
    renderer_ = [](const scenegen::Scene& s, const render::CameraPose& p,
                   const render::LightingConfig& l,
                   const render::CameraIntrinsics& i,
                   const render::RenderOptions& o) {
      return render::render(s, p, l, i, o);
    };
  }
}

render::CameraPose RenderService::random_pose() {
  std::uint64_t seed;
  if (config_.seed) {
    seed = RngStream::derive_seed(*config_.seed, counter_++);
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  RngStream rng(seed);
  return render::sample_camera_pose(rng);
}

RenderResponse RenderService::handle(
    std::string_view message,
    const std::function<void(const std::string&)>& progress) {
  auto parsed = parse_request(message);
  if (auto* errors = std::get_if<std::vector<std::string>>(&parsed)) {
    return invalid(join(*errors));
  }
  auto validated = validate_request(std::get<RenderRequest>(parsed));
  if (auto* errors = std::get_if<std::vector<std::string>>(&validated)) {
    return invalid(join(*errors));
  }
  const ValidRequest& req = std::get<ValidRequest>(validated);

  std::shared_ptr<const scenegen::Scene> scene;
  try {
    scene = registry_.lookup(req.id);
  } catch (const std::exception& e) {
    return failure(std::string("registry: ") + e.what());
  }
  if (!scene) return invalid("unknown id");

  try {
    const render::CameraPose pose = req.camera ? *req.camera : random_pose();
    if (progress) {
      progress(to_wire({std::string(kStatusRendering), std::nullopt, std::nullopt}));
    }
    render::RenderOptions options;
    options.threads = config_.render_threads;
    options.deadline = std::chrono::steady_clock::now() + config_.timeout;
    const render::Image image =
        renderer_(*scene, pose, render::LightingConfig::for_mode(req.lighting),
                  config_.intrinsics, options);
    if (std::chrono::steady_clock::now() > *options.deadline) {
      throw RenderTimeout("render exceeded its deadline");
    }
    RenderResponse r;
    r.status = std::string(config_.compat_200 ? kStatusLegacySuccess : kStatusSuccess);
    r.image = base64_encode(render::encode_png(image));
    r.cam_pose = pose;
    return r;
  } catch (const RenderTimeout&) {
    return failure("render timed out");
  } catch (const std::exception& e) {
    return failure(e.what());
  }
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError(0, "base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ParseError(0, "invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace polyscene::service
