// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyscene/registry.h"
#include "polyscene/render.h"

namespace polyscene::service {

/// Request fields as found on the wire, before validation. Accepted keys:
/// "ID" or "id"; "lighting" (string) or "light_fixed" (bool or "true" /
/// "false"), with "lighting" taking precedence; "random_cam" or "random"
/// (bool or string); the camera as cam_x, cam_y, cam_z, cam_qw, cam_qx,
/// cam_qy, cam_qz or as "camera" (array of 7 numbers or an object with
/// keys x, y, z, qw, qx, qy, qz).
struct RenderRequest {
  std::optional<std::string> id;
  std::optional<std::string> lighting;
  std::optional<bool> random;
  std::optional<std::array<double, 7>> camera;
};

/// A request that passed validation.
struct ValidRequest {
  std::string id;
  render::Lighting lighting = render::Lighting::kFixedSpotlight;
  /// Absent for random cameras.
  std::optional<render::CameraPose> camera;
};

/// Parses wire JSON. Returns violations for malformed JSON or mistyped
/// fields; never throws.
std::variant<RenderRequest, std::vector<std::string>> parse_request(
    std::string_view text);

/// Checks field presence, the lighting name, the camera presence rule and
/// that the quaternion can be normalized. Never throws.
std::variant<ValidRequest, std::vector<std::string>> validate_request(
    const RenderRequest& req);

/// Wire form of a pose: {"cam_x", ..., "cam_qz"}.
nlohmann::ordered_json pose_json(const render::CameraPose& pose);

struct RenderResponse {
  std::string status;
  /// Base64 PNG; present on success.
  std::optional<std::string> image;
  /// Present on success.
  std::optional<render::CameraPose> cam_pose;

  bool success() const { return image.has_value(); }
};

std::string to_wire(const RenderResponse& r);

inline constexpr std::string_view kStatusSuccess = "SUCCESS";
inline constexpr std::string_view kStatusLegacySuccess = "200";
inline constexpr std::string_view kStatusRendering = "RENDERING";

struct ServiceConfig {
  render::CameraIntrinsics intrinsics;
  /// Report success as "200" instead of "SUCCESS".
  bool compat_200 = false;
  std::chrono::milliseconds timeout{60000};
  /// Seeds random cameras deterministically (request n uses sub-stream n);
  /// the OS random source is used when unset.
  std::optional<std::uint64_t> seed;
  int render_threads = 0;
};

using Renderer = std::function<render::Image(
    const scenegen::Scene&, const render::CameraPose&,
    const render::LightingConfig&, const render::CameraIntrinsics&,
    const render::RenderOptions&)>;

class RenderService {
 public:
  /// `renderer` defaults to render::render.
  RenderService(const SceneRegistry& registry, ServiceConfig config,
                Renderer renderer = {});

  /// Handles one wire message and returns the terminal response.
  /// `progress` receives non-terminal status texts (already serialized).
  RenderResponse handle(std::string_view message,
                        const std::function<void(const std::string&)>& progress = {});

  const ServiceConfig& config() const { return config_; }

 private:
  render::CameraPose random_pose();

  const SceneRegistry& registry_;
  ServiceConfig config_;
  Renderer renderer_;
  std::atomic<std::uint64_t> counter_{0};
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ParseError on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace polyscene::service
