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

#ifndef ALPHA_AUCTION_SERVICE_HTTP_HPP_
#define ALPHA_AUCTION_SERVICE_HTTP_HPP_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "alpha_auction/service/hub.hpp"

namespace alpha_auction::service {

inline constexpr std::string_view kListenEnv = "ALPHA_AUCTION_LISTEN";
inline constexpr std::string_view kDefaultListen = "127.0.0.1:8080";

struct ListenAddress {
  std::string host;
  int port;

  // "host:port"; DomainError otherwise.
  static ListenAddress parse(std::string_view text);
};

// ALPHA_AUCTION_LISTEN when set, else 127.0.0.1:8080.
ListenAddress listen_address_from_env();

// HTTP transport for a hub.
//
//   POST /api/message                 one WireMessage in, one out
//   GET  /api/poll?session_id=&seat_token=&since=&wait_ms=
//                                     JSON array of WireMessages
//   GET  /api/sessions/<id>/periods.csv
//   GET  /api/sessions/<id>/events.jsonl
//   GET  /api/health
//
// A background thread calls hub.tick() every `tick_interval`.
class HttpService {
 public:
  explicit HttpService(ServiceHub& hub,
                       std::chrono::milliseconds tick_interval = std::chrono::milliseconds(250),
                       std::chrono::milliseconds max_poll_wait = std::chrono::seconds(25));
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Port 0 binds any free port. Returns the bound port; Error on failure.
  int bind(const ListenAddress& address);
  // Serves until stop(). Call after bind.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace alpha_auction::service

#endif  // ALPHA_AUCTION_SERVICE_HTTP_HPP_
