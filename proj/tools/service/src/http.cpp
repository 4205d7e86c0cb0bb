// Copyright 2026 The alpha-auction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alpha_auction/service/http.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::service {
namespace {

constexpr const char* kJson = "application/json";

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

ListenAddress ListenAddress::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw DomainError(fmt::format("listen address '{}' is not host:port", text));
  }
  const auto port = parse_number<int>(std::string(text.substr(colon + 1)));
  if (!port || *port < 0 || *port > 65535) {
    throw DomainError(fmt::format("listen address '{}' has no valid port", text));
  }
  return {std::string(text.substr(0, colon)), *port};
}

ListenAddress listen_address_from_env() {
  const char* value = std::getenv(std::string(kListenEnv).c_str());
  return ListenAddress::parse(value != nullptr && *value != '\0' ? value : kDefaultListen);
}

struct HttpService::Impl {
  Impl(ServiceHub& h, std::chrono::milliseconds tick, std::chrono::milliseconds wait)
      : hub(h), tick_interval(tick), max_poll_wait(wait) {
    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"ok":true})", kJson);
    });
    server.Post("/api/message", [this](const httplib::Request& req, httplib::Response& res) {
      const auto reply = hub.handle_text(req.body);
      res.set_content(reply, kJson);
    });
    server.Get("/api/poll", [this](const httplib::Request& req, httplib::Response& res) {
      const auto since = parse_number<std::uint64_t>(req.get_param_value("since"));
      const auto wait_ms = req.has_param("wait_ms")
                               ? parse_number<std::int64_t>(req.get_param_value("wait_ms"))
                               : std::optional<std::int64_t>(max_poll_wait.count());
      if (!since || !wait_ms || *wait_ms < 0) {
        res.status = 400;
        res.set_content(WireMessage::error("since and wait_ms must be non-negative integers")
                            .dump(),
                        kJson);
        return;
      }
      const auto wait = std::min(std::chrono::milliseconds(*wait_ms), max_poll_wait);
      const auto messages = hub.poll(req.get_param_value("session_id"),
                                     req.get_param_value("seat_token"), *since, wait);
      Json list = Json::array();
      for (const auto& message : messages) list.push_back(message.to_json());
      res.set_content(list.dump(), kJson);
    });
    server.Get(R"(/api/sessions/([A-Za-z0-9_.-]+)/periods\.csv)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_artifact(hub.period_csv(req.matches[1]), "text/csv", res);
               });
    server.Get(R"(/api/sessions/([A-Za-z0-9_.-]+)/events\.jsonl)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_artifact(hub.event_log(req.matches[1]), "application/x-ndjson", res);
               });
  }

  static void serve_artifact(const std::optional<std::string>& body, const char* type,
                             httplib::Response& res) {
    if (!body) {
      res.status = 404;
      res.set_content(WireMessage::error("no finished session with that id").dump(), kJson);
      return;
    }
    res.set_content(*body, type);
  }

  ServiceHub& hub;
  std::chrono::milliseconds tick_interval;
  std::chrono::milliseconds max_poll_wait;
  httplib::Server server;
  std::mutex mutex;
  std::condition_variable stopped;
  bool stopping = false;
};

HttpService::HttpService(ServiceHub& hub, std::chrono::milliseconds tick_interval,
                         std::chrono::milliseconds max_poll_wait)
    : impl_(std::make_unique<Impl>(hub, tick_interval, max_poll_wait)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const ListenAddress& address) {
  const int port = address.port == 0
                       ? impl_->server.bind_to_any_port(address.host)
                       : (impl_->server.bind_to_port(address.host, address.port)
                              ? address.port
                              : -1);
  if (port <= 0) {
    throw Error(fmt::format("cannot listen on {}:{}", address.host, address.port));
  }
  return port;
}

void HttpService::run() {
  std::thread ticker([this] {
    std::unique_lock lock(impl_->mutex);
    while (!impl_->stopping) {
      impl_->stopped.wait_for(lock, impl_->tick_interval);
      lock.unlock();
      impl_->hub.tick();
      lock.lock();
    }
  });
  impl_->server.listen_after_bind();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->stopped.notify_all();
  ticker.join();
}

void HttpService::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->stopped.notify_all();
  impl_->server.stop();
}

}  // namespace alpha_auction::service
