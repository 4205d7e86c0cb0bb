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

#ifndef ALPHA_AUCTION_SERVICE_WIRE_HPP_
#define ALPHA_AUCTION_SERVICE_WIRE_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "alpha_auction/session.hpp"

namespace alpha_auction::service {

using Json = nlohmann::ordered_json;

enum class Kind : std::uint8_t {
  kJoin,
  kState,
  kSubmitBid,
  kHypothesize,
  kConfirm,
  kRevise,
  kFeedback,
  kAdminCreate,
  kAdminStatus,
  kError,
};

std::string_view to_string(Kind kind);
// DataError for an unknown tag.
Kind parse_kind(std::string_view text);

// One message in either direction. Encoded as a JSON object
// {"kind", "session_id", "seat_token", "payload"}.
struct WireMessage {
  Kind kind = Kind::kError;
  std::string session_id;
  std::string seat_token;
  Json payload = Json::object();

  std::string dump() const;
  Json to_json() const;
  // DataError when the text is not a well-formed message.
  static WireMessage parse(std::string_view text);
  static WireMessage from_json(const Json& json);

  static WireMessage error(std::string_view message, std::string session_id = {});
};

// Payload encoders. Rationals are written with format_rational and ranges
// with Amount::to_string so a client can render them verbatim.
Json encode(const session::WhatIfRow& row);
Json encode(const session::WhatIfTable& table);
Json encode(const session::RawOutcome& outcome);
Json encode(const session::Hypothesis& hypothesis);
Json encode(const session::TranscriptEntry& entry);
Json encode(const session::Feedback& feedback);
// The seat's own view: no partner identity and no unconfirmed partner bid.
Json encode_state(const session::SessionConfig& config,
                  const session::SeatState& state);

}  // namespace alpha_auction::service

#endif  // ALPHA_AUCTION_SERVICE_WIRE_HPP_
