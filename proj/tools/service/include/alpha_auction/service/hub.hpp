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

#ifndef ALPHA_AUCTION_SERVICE_HUB_HPP_
#define ALPHA_AUCTION_SERVICE_HUB_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alpha_auction/service/wire.hpp"

namespace alpha_auction::service {

using Clock = std::chrono::steady_clock;

struct HubOptions {
  // Finished sessions are written here as <id>.csv and <id>.events.jsonl.
  // Empty: nothing is written.
  std::filesystem::path output_dir;
  // When set, admin messages must carry it in seat_token.
  std::string admin_token;
  // Seat tokens come from this seed; 0 draws one from std::random_device.
  std::uint64_t token_seed = 0;
  std::function<Clock::time_point()> clock = [] { return Clock::now(); };
};

// Hosts many sessions behind the message protocol. Each session has its
// own lock, so sessions progress independently; within a session every
// input is applied in arrival order.
//
// A session with human seats starts once every seat has joined. From then
// on each pending human seat has `timeout_seconds` per period before it is
// auto-confirmed (see tick).
class ServiceHub {
 public:
  explicit ServiceHub(HubOptions options = {});
  ~ServiceHub();
  ServiceHub(const ServiceHub&) = delete;
  ServiceHub& operator=(const ServiceHub&) = delete;

  // Applies one request and returns the reply. Failures come back as
  // kind=error with the state untouched.
  WireMessage handle(const WireMessage& request);
  // Same for an encoded request; a malformed one yields an error reply.
  std::string handle_text(std::string_view body);

  // Messages for a seat newer than version `since`: a feedback message
  // when a period closed after `since`, then the seat state. Blocks up to
  // `wait` for a change; empty when nothing changed.
  std::vector<WireMessage> poll(const std::string& session_id,
                                const std::string& seat_token,
                                std::uint64_t since,
                                std::chrono::milliseconds wait);

  // Auto-confirms every human seat whose deadline has passed.
  void tick();

  // Canonical period CSV and event log of a finished session.
  std::optional<std::string> period_csv(const std::string& session_id) const;
  std::optional<std::string> event_log(const std::string& session_id) const;

  std::vector<std::string> session_ids() const;
  // Writes every session (finished or not) to output_dir and wakes pollers.
  void shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace alpha_auction::service

#endif  // ALPHA_AUCTION_SERVICE_HUB_HPP_
