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

#include "alpha_auction/service/wire.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::service {
namespace {

constexpr std::array<std::pair<Kind, std::string_view>, 10> kKindNames{{
    {Kind::kJoin, "join"},
    {Kind::kState, "state"},
    {Kind::kSubmitBid, "submit_bid"},
    {Kind::kHypothesize, "hypothesize"},
    {Kind::kConfirm, "confirm"},
    {Kind::kRevise, "revise"},
    {Kind::kFeedback, "feedback"},
    {Kind::kAdminCreate, "admin_create"},
    {Kind::kAdminStatus, "admin_status"},
    {Kind::kError, "error"},
}};

}  // namespace

std::string_view to_string(Kind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "error";
}

Kind parse_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw DataError(fmt::format("unknown message kind '{}'", text));
}

Json WireMessage::to_json() const {
  Json out;
  out["kind"] = to_string(kind);
  out["session_id"] = session_id;
  out["seat_token"] = seat_token;
  out["payload"] = payload;
  return out;
}

std::string WireMessage::dump() const { return to_json().dump(); }

WireMessage WireMessage::from_json(const Json& json) {
  if (!json.is_object()) throw DataError("message must be a JSON object");
  const auto kind = json.find("kind");
  if (kind == json.end() || !kind->is_string()) {
    throw DataError("message has no kind");
  }
  WireMessage message;
  message.kind = parse_kind(kind->get<std::string>());
  const auto text_field = [&json](const char* key) {
    const auto field = json.find(key);
    if (field == json.end() || field->is_null()) return std::string();
    if (!field->is_string()) throw DataError(fmt::format("{} must be a string", key));
    return field->get<std::string>();
  };
  message.session_id = text_field("session_id");
  message.seat_token = text_field("seat_token");
  const auto payload = json.find("payload");
  if (payload != json.end() && !payload->is_null()) {
    if (!payload->is_object()) throw DataError("payload must be an object");
    message.payload = *payload;
  }
  return message;
}

WireMessage WireMessage::parse(std::string_view text) {
  Json json;
  try {
    json = Json::parse(text);
  } catch (const nlohmann::json::exception& error) {
    throw DataError(fmt::format("malformed message: {}", error.what()));
  }
  return from_json(json);
}

WireMessage WireMessage::error(std::string_view message, std::string session_id) {
  WireMessage out;
  out.kind = Kind::kError;
  out.session_id = std::move(session_id);
  out.payload["message"] = message;
  return out;
}

Json encode(const session::WhatIfRow& row) {
  Json out;
  out["case"] = session::to_string(row.which);
  out["possible"] = row.possible;
  out["win_probability"] = format_rational(row.win_probability);
  out["transfer"] = row.transfer.to_string();
  out["points"] = row.points.to_string();
  return out;
}

Json encode(const session::WhatIfTable& table) {
  Json rows = Json::array();
  for (const auto& row : table) rows.push_back(encode(row));
  return rows;
}

Json encode(const session::RawOutcome& outcome) {
  Json out;
  out["own_wins"] = outcome.own_wins;
  out["transfer"] = format_rational(outcome.transfer);
  out["own_points"] = format_rational(outcome.own_points);
  out["other_points"] = format_rational(outcome.other_points);
  return out;
}

Json encode(const session::Hypothesis& hypothesis) {
  Json out;
  out["outcome"] = encode(hypothesis.outcome);
  out["alternative"] =
      hypothesis.alternative ? encode(*hypothesis.alternative) : Json(nullptr);
  out["weight"] = format_rational(hypothesis.weight);
  return out;
}

Json encode(const session::TranscriptEntry& entry) {
  Json out;
  out["bid"] = entry.bid;
  out["guess"] = entry.guess ? Json(*entry.guess) : Json(nullptr);
  out["shown"] = entry.shown ? encode(*entry.shown) : Json(nullptr);
  return out;
}

Json encode(const session::Feedback& feedback) {
  Json out;
  out["period"] = feedback.period;
  out["role"] = to_string(feedback.role);
  out["own_bid"] = feedback.own_bid;
  out["other_bid"] = feedback.other_bid;
  out["own_wins"] = feedback.own_wins;
  out["transfer"] = format_rational(feedback.transfer);
  out["points"] = format_rational(feedback.points);
  return out;
}

Json encode_state(const session::SessionConfig& config,
                  const session::SeatState& state) {
  const auto& view = state.view;
  Json out;
  out["phase"] = session::to_string(state.phase);
  out["version"] = state.version;
  out["period"] = view.period;
  out["periods"] = config.periods;
  out["auction"] = auction_label(view.alpha);
  out["alpha"] = format_rational(view.alpha);
  out["gamma"] = format_rational(view.gamma);
  // Before period 1 opens the view is empty.
  out["role"] = view.period > 0 ? Json(to_string(view.role)) : Json(nullptr);
  out["item_a"] = view.item_a;
  out["item_b_own"] = view.item_b_own;
  out["item_b_other"] = view.item_b_other;
  out["bid_min"] = 0;
  out["bid_max"] = view.bid_cap;
  Json transcript = Json::array();
  for (const auto& entry : state.transcript) transcript.push_back(encode(entry));
  out["transcript"] = transcript;
  if (state.phase == session::Phase::kReviewing && !state.transcript.empty()) {
    const auto values = session::PeriodValues{
        view.item_a,
        view.role == Role::kLow ? view.item_b_own : view.item_b_other,
        view.role == Role::kHigh ? view.item_b_own : view.item_b_other};
    out["table"] = encode(session::what_if_table(values, view.alpha, view.gamma,
                                                 view.role,
                                                 state.transcript.back().bid));
  } else {
    out["table"] = nullptr;
  }
  out["feedback"] =
      state.last_feedback ? encode(*state.last_feedback) : Json(nullptr);
  out["paid_period"] = state.paid_period ? Json(*state.paid_period) : Json(nullptr);
  out["cash"] = state.cash ? Json(format_rational(*state.cash)) : Json(nullptr);
  return out;
}

}  // namespace alpha_auction::service
