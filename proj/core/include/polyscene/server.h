// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "polyscene/service.h"

namespace polyscene::service {

/// Serves a RenderService on one TCP port. A websocket connection carries
/// one JSON request per text message; each request gets a RENDERING
/// progress message and then its terminal response, in request order.
/// Plain HTTP `POST /render` (or `POST /api/`) takes the same JSON body and
/// returns only the terminal response. `GET /health` answers "ok".
class Server {
 public:
  /// Binds immediately; port 0 picks a free port.
  Server(RenderService& service, const std::string& address,
         unsigned short port);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;

  /// Accepts connections until stop() is called.
  void run();
  /// Closes the listener and all open connections, then waits for them.
  void stop();

 private:
  struct State;
  std::shared_ptr<State> state_;
};

}  // namespace polyscene::service
