// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/server.h"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <iostream>
#include <list>
#include <mutex>
#include <thread>

#include "polyscene/errors.h"

namespace polyscene::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct Server::State {
  explicit State(RenderService& s) : service(s), acceptor(io) {}

  RenderService& service;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  struct Worker {
    std::shared_ptr<tcp::socket> socket;
    std::shared_ptr<std::atomic<bool>> done;
    std::thread thread;
  };
  std::list<Worker> workers;

  // Joins connections that already finished. Caller holds `mutex`.
  void reap() {
    for (auto it = workers.begin(); it != workers.end();) {
      if (*it->done) {
        it->thread.join();
        it = workers.erase(it);
      } else {
        ++it;
      }
    }
  }
};

namespace {

void serve_websocket(RenderService& service, tcp::socket& socket,
                     http::request<http::string_body>& req) {
  websocket::stream<tcp::socket&> ws(socket);
  ws.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
    res.set(http::field::server, "polyscene");
  }));
  ws.accept(req);
  ws.text(true);
  for (;;) {
    beast::flat_buffer buffer;
    beast::error_code ec;
    ws.read(buffer, ec);
    if (ec) return;  // closed by peer or by stop()
    const std::string message = beast::buffers_to_string(buffer.data());
    const RenderResponse r = service.handle(message, [&](const std::string& p) {
      ws.write(asio::buffer(p));
    });
    ws.write(asio::buffer(to_wire(r)));
  }
}

http::response<http::string_body> http_reply(
    const http::request<http::string_body>& req, http::status status,
    std::string body, const char* type) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::server, "polyscene");
  res.set(http::field::content_type, type);
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

void serve_connection(RenderService& service, tcp::socket& socket) {
  beast::flat_buffer buffer;
  for (;;) {
    http::request<http::string_body> req;
    beast::error_code ec;
    http::read(socket, buffer, req, ec);
    if (ec) return;
    if (websocket::is_upgrade(req)) {
      serve_websocket(service, socket, req);
      return;
    }
    http::response<http::string_body> res;
    const std::string target(req.target());
    if (req.method() == http::verb::post &&
        (target == "/render" || target == "/api" || target == "/api/")) {
      res = http_reply(req, http::status::ok, to_wire(service.handle(req.body())),
                       "application/json");
    } else if (req.method() == http::verb::get && target == "/health") {
      res = http_reply(req, http::status::ok, "ok", "text/plain");
    } else {
      res = http_reply(req, http::status::not_found, "not found", "text/plain");
    }
    http::write(socket, res, ec);
    if (ec || !res.keep_alive()) return;
  }
}

}  // namespace

Server::Server(RenderService& service, const std::string& address,
               unsigned short port)
    : state_(std::make_shared<State>(service)) {
  beast::error_code ec;
  const auto addr = asio::ip::make_address(address, ec);
  if (ec) throw InvalidArgument("bad listen address '" + address + "'");
  const tcp::endpoint endpoint(addr, port);
  auto& acc = state_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw IoError("cannot listen on " + address + ":" + std::to_string(port) +
                  ": " + ec.message());
  }
}

Server::~Server() { stop(); }

unsigned short Server::port() const {
  return state_->acceptor.local_endpoint().port();
}

void Server::run() {
  auto state = state_;
  while (!state->stopping) {
    auto socket = std::make_shared<tcp::socket>(state->io);
    beast::error_code ec;
    state->acceptor.accept(*socket, ec);
    if (ec) {
      if (state->stopping) break;
      continue;
    }
    std::lock_guard lock(state->mutex);
    if (state->stopping) break;
    state->reap();
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::thread t([state, socket, done] {
      try {
        serve_connection(state->service, *socket);
      } catch (const std::exception& e) {
        std::cerr << "polyscene: connection error: " << e.what() << "\n";
      }
      beast::error_code ignored;
      socket->shutdown(tcp::socket::shutdown_both, ignored);
      *done = true;
    });
    state->workers.push_back({socket, done, std::move(t)});
  }
}

void Server::stop() {
  if (!state_ || state_->stopping.exchange(true)) return;
  beast::error_code ec;
  // Unblock accept(): shutdown() on the listening socket wakes it on Linux.
  ::shutdown(state_->acceptor.native_handle(), SHUT_RDWR);
  std::list<State::Worker> workers;
  {
    std::lock_guard lock(state_->mutex);
    for (auto& w : state_->workers) {
      w.socket->shutdown(tcp::socket::shutdown_both, ec);
    }
    workers.swap(state_->workers);
  }
  for (auto& w : workers) w.thread.join();
}

}  // namespace polyscene::service
