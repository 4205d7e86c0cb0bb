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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "alpha_auction/analytics.hpp"
#include "alpha_auction/errors.hpp"
#include "alpha_auction/service/hub.hpp"
#include "alpha_auction/service/wire.hpp"

namespace {

using namespace alpha_auction;
using namespace alpha_auction::service;
using namespace std::chrono_literals;

WireMessage request(Kind kind, std::string session_id = {}, std::string token = {},
                    Json payload = Json::object()) {
  WireMessage m;
  m.kind = kind;
  m.session_id = std::move(session_id);
  m.seat_token = std::move(token);
  m.payload = std::move(payload);
  return m;
}

WireMessage create(ServiceHub& hub, Json payload) {
  return hub.handle(request(Kind::kAdminCreate, {}, {}, std::move(payload)));
}

std::vector<std::string> tokens_of(const WireMessage& created) {
  std::vector<std::string> out;
  for (const auto& t : created.payload.at("seat_tokens")) out.push_back(t.get<std::string>());
  return out;
}

struct FakeClock {
  Clock::time_point now{};
  HubOptions options(std::uint64_t seed = 11) {
    HubOptions o;
    o.token_seed = seed;
    o.clock = [this] { return now; };
    return o;
  }
};

TEST(WireTest, RoundTripAndErrors) {
  auto m = request(Kind::kSubmitBid, "s1", "tok", Json{{"bid", 15}, {"guess", nullptr}});
  auto back = WireMessage::parse(m.dump());
  EXPECT_EQ(back.kind, Kind::kSubmitBid);
  EXPECT_EQ(back.session_id, "s1");
  EXPECT_EQ(back.seat_token, "tok");
  EXPECT_EQ(back.payload, m.payload);
  EXPECT_THROW(WireMessage::parse("{"), DataError);
  EXPECT_THROW(WireMessage::parse(R"({"kind":"shout"})"), DataError);
  EXPECT_THROW(WireMessage::parse(R"({"kind":"join","payload":[1]})"), DataError);
  EXPECT_THROW(WireMessage::parse(R"({"kind":"join","seat_token":5})"), DataError);
  for (auto kind : {Kind::kJoin, Kind::kState, Kind::kSubmitBid, Kind::kHypothesize,
                    Kind::kConfirm, Kind::kRevise, Kind::kFeedback, Kind::kAdminCreate,
                    Kind::kAdminStatus, Kind::kError}) {
    EXPECT_EQ(parse_kind(to_string(kind)), kind);
  }
}

TEST(HubTest, MalformedMessageGetsErrorReply) {
  ServiceHub hub;
  auto reply = WireMessage::parse(hub.handle_text("not json"));
  EXPECT_EQ(reply.kind, Kind::kError);
  reply = WireMessage::parse(hub.handle_text(R"({"kind":"join","seat_token":"nope"})"));
  EXPECT_EQ(reply.kind, Kind::kError);
  EXPECT_EQ(reply.payload.at("message"), "unknown seat token");
  reply = hub.handle(request(Kind::kFeedback));
  EXPECT_EQ(reply.kind, Kind::kError);
}

TEST(HubTest, AdminValidationAndConflicts) {
  HubOptions options;
  options.admin_token = "secret";
  ServiceHub hub(options);
  Json payload{{"session_id", "x"}, {"auction", "wb"}, {"session_type", 4}, {"n_subjects", 4}};
  auto reply = create(hub, payload);
  EXPECT_EQ(reply.kind, Kind::kError);
  EXPECT_EQ(reply.payload.at("message"), "admin token required");

  auto admin = [&](Json p) {
    return hub.handle(request(Kind::kAdminCreate, {}, "secret", std::move(p)));
  };
  EXPECT_EQ(admin(payload).kind, Kind::kAdminStatus);
  reply = admin(payload);
  EXPECT_EQ(reply.kind, Kind::kError);
  EXPECT_EQ(reply.payload.at("message"), "session id 'x' in use");

  auto bad = payload;
  bad["session_id"] = "y";
  bad["seats"] = {"human", "uniform"};
  EXPECT_EQ(admin(bad).payload.at("message"), "seat list has 2 entries for 4 subjects");
  bad.erase("seats");
  bad["n_subjects"] = 5;
  EXPECT_EQ(admin(bad).kind, Kind::kError);
  bad["n_subjects"] = 4;
  bad["auction"] = "xb";
  EXPECT_EQ(admin(bad).kind, Kind::kError);
  bad["auction"] = "lb";
  bad["bot"] = "qre:-1";
  EXPECT_EQ(admin(bad).kind, Kind::kError);

  auto status = hub.handle(request(Kind::kAdminStatus, {}, "secret"));
  ASSERT_EQ(status.kind, Kind::kAdminStatus);
  EXPECT_EQ(status.payload.at("sessions").size(), 1u);
}

TEST(HubTest, AllBotSessionRunsAtCreateAndPassesReplay) {
  const auto dir = std::filesystem::temp_directory_path() / "alpha_auction_hub_bots";
  std::filesystem::remove_all(dir);
  HubOptions options;
  options.output_dir = dir;
  ServiceHub hub(options);
  auto reply = create(hub, {{"session_id", "bots"}, {"auction", "lb"}, {"session_type", 3},
                            {"n_subjects", 20}, {"seed", 5}, {"bot", "qre:0.3"}});
  ASSERT_EQ(reply.kind, Kind::kAdminStatus) << reply.dump();
  EXPECT_TRUE(reply.payload.at("finished").get<bool>());
  EXPECT_TRUE(reply.payload.at("replay_ok").get<bool>());
  EXPECT_TRUE(reply.payload.at("seat_tokens").empty());
  const auto csv = hub.period_csv("bots");
  ASSERT_TRUE(csv);
  std::ifstream file(dir / "bots.csv");
  std::stringstream written;
  written << file.rdbuf();
  EXPECT_EQ(written.str(), *csv);
  EXPECT_TRUE(std::filesystem::exists(dir / "bots.events.jsonl"));
  std::istringstream in(*csv);
  EXPECT_EQ(analytics::read_period_csv(in).size(), 20u * 40u);
}

TEST(HubTest, OutOfRangeBidLeavesStateUnchanged) {
  FakeClock clock;
  ServiceHub hub(clock.options());
  auto created = create(hub, {{"session_id", "r"}, {"auction", "wb"}, {"session_type", 4},
                              {"n_subjects", 4}, {"humans", 1}});
  const auto token = tokens_of(created).at(0);
  const auto before = hub.handle(request(Kind::kJoin, "r", token));
  ASSERT_EQ(before.kind, Kind::kState);
  EXPECT_EQ(before.payload.at("phase"), "bidding");
  EXPECT_EQ(before.payload.at("bid_max"), 290);

  for (const Json& bid : {Json(291), Json(-1)}) {
    auto reply = hub.handle(request(Kind::kSubmitBid, "r", token, {{"bid", bid}}));
    EXPECT_EQ(reply.kind, Kind::kError);
    EXPECT_EQ(reply.payload.at("message"), "bid out of range");
  }
  auto reply = hub.handle(request(Kind::kSubmitBid, "r", token, {{"bid", 12.5}}));
  EXPECT_EQ(reply.payload.at("message"), "bid must be an integer");
  reply = hub.handle(request(Kind::kSubmitBid, "r", token, {{"bid", 10}, {"guess", 400}}));
  EXPECT_EQ(reply.payload.at("message"), "guess out of range");
  reply = hub.handle(request(Kind::kConfirm, "r", token));
  EXPECT_EQ(reply.payload.at("message"), "seat is bidding");
  EXPECT_EQ(hub.handle(request(Kind::kState, "r", token)).payload, before.payload);
  // A token does not open another session.
  reply = hub.handle(request(Kind::kState, "other", token));
  EXPECT_EQ(reply.payload.at("message"), "unknown seat token");
}

TEST(HubTest, WaitsForAllHumansThenTimesOutAtDeadline) {
  FakeClock clock;
  ServiceHub hub(clock.options());
  auto created = create(hub, {{"session_id", "t"}, {"auction", "ab"}, {"session_type", 4},
                              {"n_subjects", 4}, {"humans", 2}, {"periods", 2},
                              {"timeout_seconds", 30}});
  const auto tokens = tokens_of(created);
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_FALSE(created.payload.at("started").get<bool>());
  auto first = hub.handle(request(Kind::kJoin, "t", tokens[0]));
  EXPECT_EQ(first.payload.at("phase"), "waiting");
  EXPECT_EQ(first.payload.at("role"), nullptr);
  hub.tick();
  auto second = hub.handle(request(Kind::kJoin, "t", tokens[1]));
  EXPECT_EQ(second.payload.at("phase"), "bidding");

  // Seat 0 enters a bid, seat 1 never does.
  hub.handle(request(Kind::kSubmitBid, "t", tokens[0], {{"bid", 23}}));
  clock.now += 29s;
  hub.tick();
  EXPECT_EQ(hub.handle(request(Kind::kState, "t", tokens[0])).payload.at("period"), 1);
  const auto since = hub.handle(request(Kind::kState, "t", tokens[0])).payload.at("version")
                         .get<std::uint64_t>();
  clock.now += 2s;
  hub.tick();
  auto messages = hub.poll("t", tokens[0], since, 0ms);
  ASSERT_EQ(messages.size(), 2u);
  EXPECT_EQ(messages[0].kind, Kind::kFeedback);
  EXPECT_EQ(messages[0].payload.at("own_bid"), 23);
  EXPECT_EQ(messages[1].kind, Kind::kState);
  EXPECT_EQ(messages[1].payload.at("period"), 2);
  auto other = hub.handle(request(Kind::kState, "t", tokens[1])).payload;
  // No bid entered: the net value (290 - 50) / 2 or (250 - 50) / 2.
  const int own_value = other.at("feedback").at("role") == "HV" ? 120 : 100;
  EXPECT_EQ(other.at("feedback").at("own_bid"), own_value);

  clock.now += 31s;
  hub.tick();
  auto status = hub.handle(request(Kind::kAdminStatus, "t"));
  EXPECT_TRUE(status.payload.at("finished").get<bool>());
  EXPECT_TRUE(status.payload.at("replay_ok").get<bool>());
  auto done = hub.handle(request(Kind::kState, "t", tokens[1])).payload;
  EXPECT_EQ(done.at("phase"), "finished");
  EXPECT_NE(done.at("cash"), nullptr);
  EXPECT_NE(done.at("paid_period"), nullptr);
  EXPECT_TRUE(hub.poll("t", tokens[1], done.at("version").get<std::uint64_t>(), 0ms).empty());
}

TEST(HubTest, HumansNeverSeeEachOthersUnconfirmedBidsOrIdentities) {
  FakeClock clock;
  ServiceHub hub(clock.options());
  auto created = create(hub, {{"session_id", "h"}, {"auction", "wb"}, {"session_type", 1},
                              {"n_subjects", 4}, {"humans", 4}, {"periods", 3}, {"seed", 3}});
  const auto tokens = tokens_of(created);
  ASSERT_EQ(tokens.size(), 4u);
  std::vector<std::string> seen;
  auto record = [&](const WireMessage& m) {
    seen.push_back(m.dump());
    return m;
  };
  for (const auto& t : tokens) record(hub.handle(request(Kind::kJoin, "h", t)));

  for (int period = 1; period <= 3; ++period) {
    std::vector<std::string> states;
    for (const auto& t : tokens) {
      states.push_back(record(hub.handle(request(Kind::kState, "h", t))).payload.dump());
    }
    for (std::size_t s = 0; s < tokens.size(); ++s) {
      const int bid = 11 + 7 * static_cast<int>(s) + period;
      record(hub.handle(request(Kind::kSubmitBid, "h", tokens[s], {{"bid", bid}, {"guess", 9}})));
      record(hub.handle(request(Kind::kHypothesize, "h", tokens[s], {{"guess", 40}})));
      if (s + 1 < tokens.size()) {
        record(hub.handle(request(Kind::kConfirm, "h", tokens[s])));
      }
      // Everyone else's view is untouched by this seat's inputs.
      for (std::size_t o = s + 1; o < tokens.size(); ++o) {
        EXPECT_EQ(hub.handle(request(Kind::kState, "h", tokens[o])).payload.dump(), states[o]);
      }
    }
    record(hub.handle(request(Kind::kConfirm, "h", tokens.back())));
  }
  for (const auto& text : seen) {
    for (const char* key : {"\"subject", "\"pair", "seat_tokens", "\"bid_low\"", "\"bid_high\""}) {
      EXPECT_EQ(text.find(key), std::string::npos) << key << " in " << text;
    }
    // A seat's messages carry only its own token.
    const auto m = WireMessage::parse(text);
    int own = 0;
    for (const auto& t : tokens) own += text.find(t) != std::string::npos ? 1 : 0;
    EXPECT_LE(own, 1);
    EXPECT_EQ(m.kind, Kind::kState);
  }
}

TEST(HubTest, OneHumanAndSeventeenBotsCompleteFortyPeriods) {
  FakeClock clock;
  ServiceHub hub(clock.options());
  auto created = create(hub, {{"session_id", "e2e"}, {"auction", "wb"}, {"session_type", 4},
                              {"n_subjects", 18}, {"humans", 1}, {"bot", "qre:0.3"},
                              {"seed", 21}});
  const auto token = tokens_of(created).at(0);
  auto state = hub.handle(request(Kind::kJoin, "e2e", token)).payload;
  int periods = 0;
  while (state.at("phase") != "finished") {
    ASSERT_EQ(state.at("phase"), "bidding");
    const int bid = state.at("role") == "HV" ? 105 : 101;
    auto shown = hub.handle(request(Kind::kSubmitBid, "e2e", token, {{"bid", bid}}));
    ASSERT_EQ(shown.kind, Kind::kState) << shown.dump();
    ASSERT_EQ(shown.payload.at("table").size(), 3u);
    state = hub.handle(request(Kind::kConfirm, "e2e", token)).payload;
    ASSERT_EQ(state.at("feedback").at("own_bid"), bid);
    ++periods;
  }
  EXPECT_EQ(periods, 40);
  auto status = hub.handle(request(Kind::kAdminStatus, "e2e")).payload;
  EXPECT_TRUE(status.at("valid").get<bool>());
  EXPECT_TRUE(status.at("replay_ok").get<bool>());

  std::istringstream csv(*hub.period_csv("e2e"));
  const auto rows = analytics::read_period_csv(csv);
  ASSERT_EQ(rows.size(), 18u * 40u);
  for (const auto& pair : analytics::pair_observations(rows)) {
    const auto m = analytics::standardize(pair);
    EXPECT_EQ(m.std_payoff_low + m.std_payoff_high, Rational(m.efficient ? 1 : -1));
    if (m.equilibrium_outcome) EXPECT_TRUE(m.efficient);
  }
}

TEST(HubTest, LongPollWakesOnChange) {
  FakeClock clock;
  ServiceHub hub(clock.options());
  auto created = create(hub, {{"session_id", "p"}, {"auction", "lb"}, {"session_type", 3},
                              {"n_subjects", 4}, {"humans", 1}});
  const auto token = tokens_of(created).at(0);
  const auto version =
      hub.handle(request(Kind::kJoin, "p", token)).payload.at("version").get<std::uint64_t>();
  EXPECT_TRUE(hub.poll("p", token, version, 10ms).empty());
  std::thread actor([&] {
    std::this_thread::sleep_for(50ms);
    hub.handle(request(Kind::kSubmitBid, "p", token, {{"bid", 100}}));
  });
  const auto start = Clock::now();
  auto messages = hub.poll("p", token, version, 10s);
  actor.join();
  EXPECT_LT(Clock::now() - start, 5s);
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_EQ(messages[0].payload.at("phase"), "reviewing");
  EXPECT_EQ(hub.poll("p", "bad", 0, 0ms).at(0).kind, Kind::kError);
}

TEST(HubTest, ShutdownPersistsUnfinishedSessions) {
  const auto dir = std::filesystem::temp_directory_path() / "alpha_auction_hub_shutdown";
  std::filesystem::remove_all(dir);
  HubOptions options;
  options.output_dir = dir;
  ServiceHub hub(options);
  auto created = create(hub, {{"session_id", "u"}, {"auction", "ab"}, {"session_type", 2},
                              {"n_subjects", 4}, {"humans", 1}});
  hub.handle(request(Kind::kJoin, "u", tokens_of(created).at(0)));
  EXPECT_FALSE(hub.period_csv("u"));
  hub.shutdown();
  std::ifstream events(dir / "u.events.jsonl");
  std::vector<std::string> lines;
  for (std::string line; std::getline(events, line);) lines.push_back(line);
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(session::replay_events(lines).event_log, lines);
}

// Golden transcript: WB, type 1, one human and three bots, three revisions
// in period 1. Set ALPHA_AUCTION_UPDATE_GOLDEN=1 to rewrite the file.
TEST(GoldenTest, ScriptedHumanTranscript) {
  const auto path =
      std::filesystem::path(ALPHA_AUCTION_TEST_DATA_DIR) / "golden" / "wb_type1_transcript.jsonl";
  FakeClock clock;
  ServiceHub hub(clock.options(2026));
  std::vector<WireMessage> requests{
      request(Kind::kAdminCreate, {}, {},
              {{"session_id", "golden"}, {"auction", "wb"}, {"session_type", 1},
               {"n_subjects", 4}, {"periods", 2}, {"seed", 7},
               {"seats", {"human", "fixed:20", "uniform", "ebr"}}})};
  std::vector<std::string> lines;
  std::string token;
  auto step = [&](WireMessage m) {
    if (m.kind != Kind::kAdminCreate) {
      m.session_id = "golden";
      m.seat_token = token;
    }
    const auto reply = hub.handle(m);
    if (m.kind == Kind::kAdminCreate) token = reply.payload.at("seat_tokens").at(0);
    Json line;
    line["request"] = m.to_json();
    line["response"] = reply.to_json();
    lines.push_back(line.dump());
    return reply;
  };
  step(requests[0]);
  auto joined = step(request(Kind::kJoin));
  const auto& view = joined.payload;
  ASSERT_EQ(view.at("period"), 1);
  const Role role = parse_role(view.at("role").get<std::string>());
  const session::PeriodValues values{
      view.at("item_a").get<int>(),
      role == Role::kLow ? view.at("item_b_own").get<int>() : view.at("item_b_other").get<int>(),
      role == Role::kHigh ? view.at("item_b_own").get<int>() : view.at("item_b_other").get<int>()};
  EXPECT_EQ(values.item_a, 100);

  auto check_shown = [&](const WireMessage& reply, Bid bid, std::optional<Bid> guess) {
    ASSERT_EQ(reply.kind, Kind::kState) << reply.dump();
    EXPECT_EQ(reply.payload.at("table"),
              encode(session::what_if_table(values, Rational(1), Rational(1), role, bid)));
    const auto& last = reply.payload.at("transcript").back();
    EXPECT_EQ(last.at("bid"), bid);
    if (guess) {
      EXPECT_EQ(last.at("shown"),
                encode(session::hypothesize(values, Rational(1), Rational(1), role, bid, *guess)));
    } else {
      EXPECT_EQ(last.at("shown"), nullptr);
    }
  };
  check_shown(step(request(Kind::kSubmitBid, {}, {}, {{"bid", 10}, {"guess", 5}})), 10, 5);
  step(request(Kind::kRevise));
  check_shown(step(request(Kind::kSubmitBid, {}, {}, {{"bid", 15}, {"guess", 30}})), 15, 30);
  check_shown(step(request(Kind::kHypothesize, {}, {}, {{"guess", 12}})), 15, 12);
  step(request(Kind::kRevise));
  check_shown(step(request(Kind::kSubmitBid, {}, {}, {{"bid", 20}})), 20, std::nullopt);
  step(request(Kind::kRevise));
  check_shown(step(request(Kind::kSubmitBid, {}, {}, {{"bid", 15}, {"guess", 15}})), 15, 15);
  auto after = step(request(Kind::kConfirm));
  const auto& feedback = after.payload.at("feedback");
  EXPECT_EQ(feedback.at("own_bid"), 15);
  EXPECT_EQ(after.payload.at("transcript").size(), 0u);
  EXPECT_EQ(after.payload.at("period"), 2);
  step(request(Kind::kSubmitBid, {}, {}, {{"bid", 70}}));
  auto finished = step(request(Kind::kConfirm));
  EXPECT_EQ(finished.payload.at("phase"), "finished");

  // Feedback and payment equal the canonical log.
  std::istringstream csv(*hub.period_csv("golden"));
  const auto rows = analytics::read_period_csv(csv);
  int revisions = -1;
  for (const auto& row : rows) {
    if (row.subject_id == 0 && row.period == 1) {
      EXPECT_EQ(format_rational(row.raw_points), feedback.at("points"));
      EXPECT_EQ(format_rational(row.transfer), feedback.at("transfer"));
      EXPECT_EQ(row.opp_bid, feedback.at("other_bid"));
      revisions = row.revisions;
    }
  }
  EXPECT_EQ(revisions, 3);

  std::ostringstream produced;
  for (const auto& line : lines) produced << line << '\n';
  if (std::getenv("ALPHA_AUCTION_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << produced.str();
  }
  std::ifstream golden(path, std::ios::binary);
  ASSERT_TRUE(golden) << "missing " << path;
  std::stringstream expected;
  expected << golden.rdbuf();
  EXPECT_EQ(produced.str(), expected.str());
}

}  // namespace
