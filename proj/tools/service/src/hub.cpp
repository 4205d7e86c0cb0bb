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

#include "alpha_auction/service/hub.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::service {
namespace {

using session::Phase;

struct SeatRef {
  std::string session_id;
  int subject;
};

struct Entry {
  explicit Entry(session::SessionConfig config) : machine(std::move(config)) {}

  std::mutex mutex;
  std::condition_variable changed;
  session::SessionMachine machine;
  std::vector<std::string> tokens;  // empty for bot seats
  std::vector<bool> joined;
  std::vector<Clock::time_point> deadline;
  std::vector<int> deadline_period;
  std::vector<int> feedback_period;
  std::vector<std::uint64_t> feedback_version;
  bool persisted = false;
  std::optional<bool> replay_ok;
};

int integer_field(const Json& payload, const char* key) {
  const auto field = payload.find(key);
  if (field == payload.end() || !field->is_number_integer()) {
    throw DataError(fmt::format("{} must be an integer", key));
  }
  return field->get<int>();
}

std::optional<int> optional_integer(const Json& payload, const char* key) {
  const auto field = payload.find(key);
  if (field == payload.end() || field->is_null()) return std::nullopt;
  return integer_field(payload, key);
}

std::string text_field(const Json& payload, const char* key, std::string fallback) {
  const auto field = payload.find(key);
  if (field == payload.end() || field->is_null()) return fallback;
  if (field->is_number()) return field->dump();
  if (!field->is_string()) throw DataError(fmt::format("{} must be a string", key));
  return field->get<std::string>();
}

std::string joined_lines(const std::vector<std::string>& lines) {
  std::ostringstream out;
  session::write_event_log(out, lines);
  return out.str();
}

std::string csv_of(const session::SessionMachine& machine) {
  std::ostringstream out;
  session::write_period_csv(out, machine.config(), machine.records());
  return out.str();
}

bool is_pending(Phase phase) {
  return phase == Phase::kBidding || phase == Phase::kReviewing;
}

}  // namespace

struct ServiceHub::Impl {
  explicit Impl(HubOptions opts)
      : options(std::move(opts)),
        token_rng(options.token_seed != 0 ? options.token_seed
                                          : (std::uint64_t{std::random_device{}()} << 32) ^
                                                std::random_device{}()) {}

  std::shared_ptr<Entry> find_session(const std::string& id) const {
    std::shared_lock lock(map_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw DataError(fmt::format("unknown session '{}'", id));
    return it->second;
  }

  std::pair<std::shared_ptr<Entry>, int> find_seat(const std::string& session_id,
                                                   const std::string& token) const {
    std::shared_lock lock(map_mutex);
    const auto seat = seats.find(token);
    if (token.empty() || seat == seats.end() ||
        (!session_id.empty() && seat->second.session_id != session_id)) {
      throw DataError("unknown seat token");
    }
    return {sessions.at(seat->second.session_id), seat->second.subject};
  }

  std::string new_token() {
    std::lock_guard lock(token_mutex);
    return fmt::format("{:016x}{:016x}", token_rng.next(), token_rng.next());
  }

  void check_admin(const WireMessage& request) const {
    if (!options.admin_token.empty() && request.seat_token != options.admin_token) {
      throw PreconditionError("admin token required");
    }
  }

  // Caller holds entry.mutex.
  void refresh(Entry& entry) {
    const auto& machine = entry.machine;
    const auto now = options.clock();
    for (int s = 0; s < machine.config().n_subjects; ++s) {
      const auto i = static_cast<std::size_t>(s);
      if (entry.tokens[i].empty()) continue;
      const auto state = machine.seat_state(s);
      if (state.last_feedback && state.last_feedback->period != entry.feedback_period[i]) {
        entry.feedback_period[i] = state.last_feedback->period;
        entry.feedback_version[i] = state.version;
      }
      if (machine.started() && is_pending(state.phase) &&
          entry.deadline_period[i] != state.view.period) {
        entry.deadline_period[i] = state.view.period;
        entry.deadline[i] =
            now + std::chrono::duration_cast<Clock::duration>(
                      std::chrono::duration<double>(machine.config().timeout_seconds));
      }
    }
    if (machine.finished() && !entry.persisted) {
      entry.replay_ok =
          session::replay_events(machine.event_log()).event_log == machine.event_log();
      persist(entry);
    }
    entry.changed.notify_all();
  }

  // Caller holds entry.mutex.
  void persist(Entry& entry) {
    entry.persisted = entry.machine.finished();
    if (options.output_dir.empty()) return;
    std::filesystem::create_directories(options.output_dir);
    const auto& id = entry.machine.config().session_id;
    std::ofstream(options.output_dir / (id + ".csv"), std::ios::binary) << csv_of(entry.machine);
    std::ofstream(options.output_dir / (id + ".events.jsonl"), std::ios::binary)
        << joined_lines(entry.machine.event_log());
  }

  Json status(Entry& entry) const {
    const auto& machine = entry.machine;
    const auto& config = machine.config();
    Json out;
    out["session_id"] = config.session_id;
    out["auction"] = auction_label(config.alpha);
    out["session_type"] = config.session_type;
    out["n_subjects"] = config.n_subjects;
    out["periods"] = config.periods;
    out["period"] = machine.current_period();
    out["started"] = machine.started();
    out["finished"] = machine.finished();
    out["valid"] = machine.valid();
    const auto humans =
        std::count_if(entry.tokens.begin(), entry.tokens.end(),
                      [](const std::string& t) { return !t.empty(); });
    out["humans"] = humans;
    out["joined"] = std::count(entry.joined.begin(), entry.joined.end(), true);
    out["pending"] = machine.pending_seats().size();
    out["replay_ok"] = entry.replay_ok ? Json(*entry.replay_ok) : Json(nullptr);
    return out;
  }

  session::SessionConfig parse_config(const Json& payload) {
    const auto type = integer_field(payload, "session_type");
    const auto n = integer_field(payload, "n_subjects");
    std::string id = text_field(payload, "session_id", "");
    if (id.empty()) {
      std::unique_lock lock(map_mutex);
      do {
        id = fmt::format("s{}", next_id++);
      } while (sessions.count(id) != 0);
    }
    auto config = session::SessionConfig::make(
        id, parse_alpha(text_field(payload, "auction", "")), type, n,
        static_cast<std::uint64_t>(optional_integer(payload, "seed").value_or(0)));
    if (const auto periods = optional_integer(payload, "periods")) config.periods = *periods;
    config.gamma = parse_rational(text_field(payload, "gamma", "1"));
    config.point_rate =
        parse_rational(text_field(payload, "point_rate", format_rational(config.point_rate)));
    config.show_up =
        parse_rational(text_field(payload, "show_up", format_rational(config.show_up)));
    if (payload.contains("timeout_seconds")) {
      const auto& t = payload.at("timeout_seconds");
      if (!t.is_number() || !(t.get<double>() > 0)) {
        throw DataError("timeout_seconds must be a positive number");
      }
      config.timeout_seconds = t.get<double>();
    }

    std::vector<std::string> labels;
    if (payload.contains("seats")) {
      const auto& list = payload.at("seats");
      if (!list.is_array()) throw DataError("seats must be an array");
      for (const auto& seat : list) {
        if (!seat.is_string()) throw DataError("seat entries must be strings");
        labels.push_back(seat.get<std::string>());
      }
      if (static_cast<int>(labels.size()) != n) {
        throw PreconditionError(
            fmt::format("seat list has {} entries for {} subjects", labels.size(), n));
      }
    } else {
      const int humans = optional_integer(payload, "humans").value_or(0);
      if (humans < 0 || humans > n) throw DomainError("humans must lie in [0, n_subjects]");
      const auto bot = text_field(payload, "bot", "uniform");
      for (int s = 0; s < n; ++s) labels.push_back(s < humans ? "human" : bot);
    }
    for (const auto& label : labels) {
      config.seats.push_back(label == "human"
                                 ? session::SeatAssignment{}
                                 : session::SeatAssignment{session::BotPolicy::parse(label)});
    }
    config.validate();
    return config;
  }

  WireMessage admin_create(const WireMessage& request) {
    check_admin(request);
    auto config = parse_config(request.payload);
    const std::string id = config.session_id;
    auto entry = std::make_shared<Entry>(std::move(config));
    const int n = entry->machine.config().n_subjects;
    const auto size = static_cast<std::size_t>(n);
    entry->tokens.resize(size);
    entry->joined.assign(size, false);
    entry->deadline.resize(size);
    entry->deadline_period.assign(size, 0);
    entry->feedback_period.assign(size, 0);
    entry->feedback_version.assign(size, 0);
    for (int s = 0; s < n; ++s) {
      if (!entry->machine.config().is_bot(s)) {
        entry->tokens[static_cast<std::size_t>(s)] = new_token();
      }
    }
    {
      std::unique_lock lock(map_mutex);
      if (sessions.count(id) != 0) {
        throw PreconditionError(fmt::format("session id '{}' in use", id));
      }
      sessions.emplace(id, entry);
      for (int s = 0; s < n; ++s) {
        const auto& token = entry->tokens[static_cast<std::size_t>(s)];
        if (!token.empty()) seats.emplace(token, SeatRef{id, s});
      }
    }
    WireMessage reply;
    reply.kind = Kind::kAdminStatus;
    reply.session_id = id;
    std::lock_guard lock(entry->mutex);
    if (std::all_of(entry->tokens.begin(), entry->tokens.end(),
                    [](const std::string& t) { return t.empty(); })) {
      entry->machine.start();
    }
    refresh(*entry);
    reply.payload = status(*entry);
    Json tokens = Json::array();
    for (const auto& token : entry->tokens) {
      if (!token.empty()) tokens.push_back(token);
    }
    reply.payload["seat_tokens"] = tokens;
    return reply;
  }

  WireMessage admin_status(const WireMessage& request) {
    check_admin(request);
    WireMessage reply;
    reply.kind = Kind::kAdminStatus;
    reply.session_id = request.session_id;
    if (!request.session_id.empty()) {
      auto entry = find_session(request.session_id);
      std::lock_guard lock(entry->mutex);
      reply.payload = status(*entry);
      return reply;
    }
    std::vector<std::shared_ptr<Entry>> all;
    {
      std::shared_lock lock(map_mutex);
      for (const auto& [id, entry] : sessions) all.push_back(entry);
    }
    Json list = Json::array();
    for (const auto& entry : all) {
      std::lock_guard lock(entry->mutex);
      list.push_back(status(*entry));
    }
    reply.payload["sessions"] = list;
    return reply;
  }

  WireMessage state_message(Entry& entry, int subject) const {
    WireMessage reply;
    reply.kind = Kind::kState;
    reply.session_id = entry.machine.config().session_id;
    reply.seat_token = entry.tokens[static_cast<std::size_t>(subject)];
    reply.payload =
        encode_state(entry.machine.config(), entry.machine.seat_state(subject));
    return reply;
  }

  WireMessage feedback_message(Entry& entry, int subject) const {
    WireMessage reply;
    reply.kind = Kind::kFeedback;
    reply.session_id = entry.machine.config().session_id;
    reply.seat_token = entry.tokens[static_cast<std::size_t>(subject)];
    reply.payload = encode(*entry.machine.seat_state(subject).last_feedback);
    return reply;
  }

  WireMessage seat_request(const WireMessage& request) {
    auto [entry, subject] = find_seat(request.session_id, request.seat_token);
    std::lock_guard lock(entry->mutex);
    auto& machine = entry->machine;
    const auto& payload = request.payload;
    switch (request.kind) {
      case Kind::kJoin:
        entry->joined[static_cast<std::size_t>(subject)] = true;
        if (!machine.started() &&
            std::equal(entry->tokens.begin(), entry->tokens.end(), entry->joined.begin(),
                       [](const std::string& t, bool j) { return t.empty() || j; })) {
          machine.start();
        }
        break;
      case Kind::kState:
        break;
      case Kind::kSubmitBid: {
        const int bid = integer_field(payload, "bid");
        machine.submit_bid(subject, bid, optional_integer(payload, "guess"));
        break;
      }
      case Kind::kHypothesize:
        machine.hypothesize(subject, integer_field(payload, "guess"));
        break;
      case Kind::kConfirm:
        machine.confirm(subject);
        break;
      case Kind::kRevise:
        machine.revise(subject);
        break;
      default:
        throw DataError(fmt::format("'{}' is not a request", to_string(request.kind)));
    }
    refresh(*entry);
    return state_message(*entry, subject);
  }

  HubOptions options;
  mutable std::shared_mutex map_mutex;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::unordered_map<std::string, SeatRef> seats;
  std::mutex token_mutex;
  session::Rng token_rng;
  int next_id = 1;
  std::atomic<bool> stopping{false};
};

ServiceHub::ServiceHub(HubOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}
ServiceHub::~ServiceHub() = default;

WireMessage ServiceHub::handle(const WireMessage& request) {
  try {
    switch (request.kind) {
      case Kind::kAdminCreate:
        return impl_->admin_create(request);
      case Kind::kAdminStatus:
        return impl_->admin_status(request);
      default:
        return impl_->seat_request(request);
    }
  } catch (const Error& error) {
    return WireMessage::error(error.what(), request.session_id);
  } catch (const nlohmann::json::exception& error) {
    return WireMessage::error(fmt::format("malformed payload: {}", error.what()),
                              request.session_id);
  }
}

std::string ServiceHub::handle_text(std::string_view body) {
  WireMessage request;
  try {
    request = WireMessage::parse(body);
  } catch (const Error& error) {
    return WireMessage::error(error.what()).dump();
  }
  return handle(request).dump();
}

std::vector<WireMessage> ServiceHub::poll(const std::string& session_id,
                                          const std::string& seat_token,
                                          std::uint64_t since,
                                          std::chrono::milliseconds wait) {
  std::shared_ptr<Entry> entry;
  int subject = 0;
  try {
    std::tie(entry, subject) = impl_->find_seat(session_id, seat_token);
  } catch (const Error& error) {
    return {WireMessage::error(error.what(), session_id)};
  }
  std::unique_lock lock(entry->mutex);
  const auto version = [&] { return entry->machine.seat_state(subject).version; };
  entry->changed.wait_for(lock, wait, [&] { return version() > since || impl_->stopping; });
  std::vector<WireMessage> out;
  if (version() <= since) return out;
  if (entry->feedback_version[static_cast<std::size_t>(subject)] > since) {
    out.push_back(impl_->feedback_message(*entry, subject));
  }
  out.push_back(impl_->state_message(*entry, subject));
  return out;
}

void ServiceHub::tick() {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::shared_lock lock(impl_->map_mutex);
    for (const auto& [id, entry] : impl_->sessions) all.push_back(entry);
  }
  const auto now = impl_->options.clock();
  for (const auto& entry : all) {
    std::lock_guard lock(entry->mutex);
    auto& machine = entry->machine;
    bool progressed = true;
    while (progressed && machine.started() && !machine.finished()) {
      progressed = false;
      for (int s : machine.pending_seats()) {
        if (entry->deadline[static_cast<std::size_t>(s)] <= now) {
          machine.timeout(s);
          impl_->refresh(*entry);
          progressed = true;
          break;
        }
      }
    }
  }
}

std::optional<std::string> ServiceHub::period_csv(const std::string& session_id) const {
  std::shared_ptr<Entry> entry;
  try {
    entry = impl_->find_session(session_id);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::lock_guard lock(entry->mutex);
  if (!entry->machine.finished()) return std::nullopt;
  return csv_of(entry->machine);
}

std::optional<std::string> ServiceHub::event_log(const std::string& session_id) const {
  std::shared_ptr<Entry> entry;
  try {
    entry = impl_->find_session(session_id);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::lock_guard lock(entry->mutex);
  if (!entry->machine.finished()) return std::nullopt;
  return joined_lines(entry->machine.event_log());
}

std::vector<std::string> ServiceHub::session_ids() const {
  std::shared_lock lock(impl_->map_mutex);
  std::vector<std::string> out;
  for (const auto& [id, entry] : impl_->sessions) out.push_back(id);
  return out;
}

void ServiceHub::shutdown() {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::unique_lock lock(impl_->map_mutex);
    impl_->stopping = true;
    for (const auto& [id, entry] : impl_->sessions) all.push_back(entry);
  }
  for (const auto& entry : all) {
    std::lock_guard lock(entry->mutex);
    impl_->persist(*entry);
    entry->changed.notify_all();
  }
}

}  // namespace alpha_auction::service
