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

#include "alpha_auction/session.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::session {
namespace {

using Move = ScriptedActor::Move;

SessionConfig all_bots(Rational alpha, int type, int n, std::uint64_t seed,
                       BotPolicy policy) {
  auto config = SessionConfig::make("t", alpha, type, n, seed);
  config.seats.assign(static_cast<std::size_t>(n), policy);
  return config;
}

SeatView view_for(const PeriodValues& values, Rational alpha, Role role) {
  return {1,
          role,
          values.item_a,
          values.item_b(role),
          values.item_b(opponent(role)),
          values.bid_cap(),
          alpha,
          Rational(1)};
}

TEST(ScheduleTest, TypesFollowTheTable) {
  auto one = ValuationSchedule::for_type(1);
  EXPECT_EQ(one.periods(), 40);
  EXPECT_EQ(one.at(1), (PeriodValues{100, 120, 160}));
  EXPECT_EQ(one.at(20), (PeriodValues{100, 120, 160}));
  EXPECT_EQ(one.at(21), (PeriodValues{100, 120, 320}));
  EXPECT_EQ(one.at(40), (PeriodValues{100, 120, 320}));
  auto two = ValuationSchedule::for_type(2);
  EXPECT_EQ(two.at(20), (PeriodValues{50, 250, 290}));
  EXPECT_EQ(two.at(21), (PeriodValues{50, 250, 450}));
  for (int p = 1; p <= 40; ++p) {
    EXPECT_EQ(ValuationSchedule::for_type(3).at(p), (PeriodValues{50, 250, 450}));
    EXPECT_EQ(ValuationSchedule::for_type(4).at(p), (PeriodValues{50, 250, 290}));
  }
  EXPECT_THROW(ValuationSchedule::for_type(5), DomainError);
  EXPECT_THROW(one.at(41), DomainError);
}

TEST(ScheduleTest, ReducedStructures) {
  EXPECT_EQ(structure_values("1A").reduced(), ValuationPair(20, 60));
  EXPECT_EQ(structure_values("1A").bid_cap(), 160);
  EXPECT_EQ(structure_values("1B").reduced(), ValuationPair(20, 220));
  EXPECT_EQ(structure_values("2A").reduced(), ValuationPair(200, 240));
  EXPECT_EQ(structure_values("2B").reduced(), ValuationPair(200, 400));
  EXPECT_EQ(structure_values("3").bid_cap(), 450);
  EXPECT_EQ(structure_values("4").bid_cap(), 290);
  EXPECT_THROW(structure_values("5"), DomainError);
}

TEST(ConfigTest, Defaults) {
  auto one = SessionConfig::make("a", Rational(1), 1, 4, 0);
  EXPECT_EQ(one.point_rate, Rational(13, 100));
  EXPECT_EQ(SessionConfig::make("a", Rational(1), 3, 4, 0).point_rate,
            Rational(1, 10));
  EXPECT_EQ(one.show_up, 5);
  EXPECT_EQ(one.periods, 40);
  one.n_subjects = 5;
  EXPECT_THROW(one.validate(), DomainError);
  one.n_subjects = 2;
  EXPECT_THROW(one.validate(), DomainError);
  one.n_subjects = 4;
  one.session_id = "bad,id";
  EXPECT_THROW(one.validate(), DomainError);
}

TEST(BotPolicyTest, RoundTrip) {
  for (auto policy : {BotPolicy::uniform(), BotPolicy::qre(0.3),
                      BotPolicy::empirical_best_response(), BotPolicy::fixed(20)}) {
    EXPECT_EQ(BotPolicy::parse(policy.to_string()), policy);
  }
  EXPECT_EQ(BotPolicy::qre(0.3).to_string(), "qre:0.3");
  EXPECT_THROW(BotPolicy::parse("qre:x"), DomainError);
  EXPECT_THROW(BotPolicy::parse("greedy"), DomainError);
}

TEST(RngTest, BelowIsInRangeAndSeeded) {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(13);
    EXPECT_LT(x, 13u);
    EXPECT_EQ(x, b.below(13));
  }
  EXPECT_THROW(a.below(0), DomainError);
}

TEST(RngTest, SampleSkipsZeroMass) {
  Rng rng(3);
  const std::vector<double> dist{0.0, 0.25, 0.0, 0.75, 0.0};
  int counts[5] = {};
  for (int i = 0; i < 20000; ++i) ++counts[rng.sample(dist)];
  EXPECT_EQ(counts[0] + counts[2] + counts[4], 0);
  EXPECT_NEAR(counts[1] / 20000.0, 0.25, 0.02);
}

TEST(RematchTest, PerfectMatchingAndSeeded) {
  Rng a(11), b(11);
  auto first = rematch(4, a);
  auto again = rematch(4, b);
  ASSERT_EQ(first.size(), 2u);
  std::set<int> seen;
  for (std::size_t k = 0; k < first.size(); ++k) {
    EXPECT_EQ(first[k].pair_id, static_cast<int>(k));
    EXPECT_EQ(first[k].subject_high, again[k].subject_high);
    EXPECT_EQ(first[k].subject_low, again[k].subject_low);
    seen.insert(first[k].subject_high);
    seen.insert(first[k].subject_low);
  }
  EXPECT_EQ(seen, (std::set<int>{0, 1, 2, 3}));
}

TEST(RematchTest, HighRoleFrequencyIsHalf) {
  Rng rng(2024);
  std::vector<int> high(8, 0);
  const int periods = 10000;
  for (int t = 0; t < periods; ++t) {
    for (const auto& pair : rematch(8, rng)) ++high[pair.subject_high];
  }
  for (int count : high) EXPECT_NEAR(count / double(periods), 0.5, 0.02);
}

TEST(RematchTest, SinglePairCoinAlternates) {
  Rng rng(5);
  std::set<int> highs;
  for (int t = 0; t < 50; ++t) {
    auto pairs = rematch(2, rng);
    ASSERT_EQ(pairs.size(), 1u);
    highs.insert(pairs[0].subject_high);
  }
  EXPECT_EQ(highs, (std::set<int>{0, 1}));
  EXPECT_THROW(rematch(3, rng), DomainError);
}

TEST(WhatIfTest, WinnerBid) {
  const auto values = structure_values("1A");
  auto table = what_if_table(values, Rational(1), Rational(1), Role::kHigh, 15);
  EXPECT_EQ(table[0].which, Case::kBelow);
  EXPECT_EQ(table[0].win_probability, 1);
  EXPECT_EQ(table[0].transfer.to_string(), "15");
  EXPECT_EQ(table[0].points.to_string(), "145");
  EXPECT_EQ(table[1].transfer.to_string(), "15");
  EXPECT_EQ(table[1].win_probability, 1);  // HV wins ties
  EXPECT_EQ(table[2].win_probability, 0);
  EXPECT_EQ(table[2].transfer.to_string(), "[16,160]");
  EXPECT_EQ(table[2].points.to_string(), "[116,260]");
  auto low = what_if_table(values, Rational(1), Rational(1), Role::kLow, 15);
  EXPECT_EQ(low[1].win_probability, 0);
  EXPECT_EQ(low[1].points.to_string(), "115");
}

TEST(WhatIfTest, AverageBidUsesOpenBoundsAtOwnBid) {
  const auto values = structure_values("1A");
  auto table = what_if_table(values, Rational(1, 2), Rational(1), Role::kHigh, 10);
  EXPECT_EQ(table[0].transfer.to_string(), "[5,10)");
  EXPECT_EQ(table[0].points.to_string(), "(150,155]");
  EXPECT_EQ(table[1].transfer.to_string(), "10");
  EXPECT_EQ(table[2].transfer.to_string(), "(10,85]");
  EXPECT_EQ(table[2].points.to_string(), "(110,185]");
}

TEST(WhatIfTest, LoserBid) {
  const auto values = structure_values("1A");
  auto table = what_if_table(values, Rational(0), Rational(1), Role::kHigh, 15);
  EXPECT_EQ(table[0].transfer.to_string(), "[0,14]");
  EXPECT_EQ(table[0].points.to_string(), "[146,160]");
  EXPECT_EQ(table[2].transfer.to_string(), "15");
}

TEST(WhatIfTest, EdgesAndDomain) {
  const auto values = structure_values("1A");
  auto zero = what_if_table(values, Rational(1), Rational(1), Role::kLow, 0);
  EXPECT_FALSE(zero[0].possible);
  EXPECT_TRUE(zero[2].possible);
  auto cap = what_if_table(values, Rational(1), Rational(1), Role::kLow, 160);
  EXPECT_FALSE(cap[2].possible);
  EXPECT_THROW(what_if_table(values, Rational(1), Rational(1), Role::kLow, 161),
               DomainError);
  EXPECT_THROW(what_if_table(values, Rational(1), Rational(1), Role::kLow, -1),
               DomainError);
}

// Every row brackets the outcome against every opponent bid in its case.
TEST(WhatIfTest, RowsCoverHypotheses) {
  const PeriodValues values{10, 14, 22};
  for (Rational alpha : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)}) {
    for (Role role : kRoles) {
      for (Bid own = 0; own <= values.bid_cap(); ++own) {
        auto table = what_if_table(values, alpha, Rational(1), role, own);
        for (Bid other = 0; other <= values.bid_cap(); ++other) {
          const auto& row = table[other < own ? 0 : other == own ? 1 : 2];
          ASSERT_TRUE(row.possible);
          auto shown = hypothesize(values, alpha, Rational(1), role, own, other);
          const auto& t = shown.outcome.transfer;
          const auto& pts = shown.outcome.own_points;
          auto inside = [](const Amount& a, const Rational& x) {
            return (a.low_open ? x > a.low : x >= a.low) &&
                   (a.high_open ? x < a.high : x <= a.high);
          };
          EXPECT_TRUE(inside(row.transfer, t)) << row.transfer.to_string();
          EXPECT_TRUE(inside(row.points, pts)) << row.points.to_string();
          EXPECT_EQ(row.win_probability, shown.outcome.own_wins ? 1 : 0);
        }
      }
    }
  }
}

TEST(HypothesizeTest, RawPoints) {
  const auto values = ValuationSchedule::for_type(1).at(5);
  auto win = hypothesize(values, Rational(1), Rational(1), Role::kHigh, 15, 10);
  EXPECT_TRUE(win.outcome.own_wins);
  EXPECT_EQ(win.outcome.transfer, 15);
  EXPECT_EQ(win.outcome.own_points, 145);
  EXPECT_EQ(win.outcome.other_points, 115);
  auto tie_high = hypothesize(values, Rational(1), Rational(1), Role::kHigh, 15, 15);
  EXPECT_TRUE(tie_high.outcome.own_wins);
  EXPECT_EQ(tie_high.outcome.own_points, 145);
  auto tie_low = hypothesize(values, Rational(1), Rational(1), Role::kLow, 15, 15);
  EXPECT_FALSE(tie_low.outcome.own_wins);
  EXPECT_EQ(tie_low.outcome.own_points, 115);
  EXPECT_THROW(hypothesize(values, Rational(1), Rational(1), Role::kLow, 15, 161),
               DomainError);
}

TEST(HypothesizeTest, FractionalTieHasAlternative) {
  const auto values = structure_values("1A");
  auto tie = hypothesize(values, Rational(1), Rational(1, 2), Role::kLow, 15, 15);
  ASSERT_TRUE(tie.alternative.has_value());
  EXPECT_EQ(tie.weight, Rational(1, 2));
  EXPECT_NE(tie.outcome.own_wins, tie.alternative->own_wins);
}

TEST(ConfirmLoopTest, FixedBotConfirmsAtOnce) {
  BotActor bot(BotPolicy::fixed(20), 1);
  auto view = view_for(structure_values("1A"), Rational(1), Role::kLow);
  auto result = confirm_loop(bot, view);
  EXPECT_EQ(result.final_bid, 20);
  EXPECT_EQ(result.transcript.size(), 1u);
  EXPECT_EQ(result.revisions, 0);
}

TEST(ConfirmLoopTest, FixedBotIsClampedToCap) {
  BotActor bot(BotPolicy::fixed(500), 1);
  auto view = view_for(structure_values("1A"), Rational(1), Role::kLow);
  EXPECT_EQ(confirm_loop(bot, view).final_bid, 160);
}

TEST(ConfirmLoopTest, ScriptedRevision) {
  ScriptedActor actor({Move::bid(30), Move::revise(), Move::bid(25), Move::confirm()});
  auto view = view_for(structure_values("1A"), Rational(1), Role::kHigh);
  auto result = confirm_loop(actor, view);
  EXPECT_EQ(result.final_bid, 25);
  EXPECT_EQ(result.transcript.size(), 2u);
  EXPECT_EQ(result.revisions, 1);
  EXPECT_TRUE(actor.exhausted());
}

TEST(ConfirmLoopTest, GuessesAreRecorded) {
  ScriptedActor actor({Move::bid(15, 10), Move::with_guess(15), Move::confirm()});
  auto view = view_for(ValuationSchedule::for_type(1).at(5), Rational(1), Role::kLow);
  auto result = confirm_loop(actor, view);
  ASSERT_EQ(result.transcript.size(), 2u);
  EXPECT_EQ(result.transcript[0].shown->outcome.own_points, 145 - 40);
  EXPECT_EQ(result.transcript[1].bid, 15);
  EXPECT_EQ(result.transcript[1].shown->outcome.own_points, 115);
  EXPECT_EQ(result.final_bid, 15);
}

TEST(ConfirmLoopTest, TimeoutConfirmsLastEnteredBid) {
  ScriptedActor actor({Move::bid(30), Move::revise(), Move::bid(25), Move::timeout()});
  auto view = view_for(structure_values("1A"), Rational(1), Role::kHigh);
  auto result = confirm_loop(actor, view);
  EXPECT_TRUE(result.timed_out);
  EXPECT_EQ(result.final_bid, 25);

  ScriptedActor silent({Move::timeout()});
  auto fallback = confirm_loop(silent, view);
  EXPECT_TRUE(fallback.timed_out);
  EXPECT_EQ(fallback.final_bid, 30);  // HV net value (160 - 100) / 2
  EXPECT_TRUE(fallback.transcript.empty());
}

TEST(ConfirmLoopTest, OutOfDomainBidThrows) {
  ScriptedActor actor({Move::bid(161), Move::confirm()});
  auto view = view_for(structure_values("1A"), Rational(1), Role::kHigh);
  EXPECT_THROW(confirm_loop(actor, view), DomainError);
}

TEST(BotTest, BestResponseToSeenBids) {
  BotActor bot(BotPolicy::empirical_best_response(), 1);
  auto view = view_for(structure_values("1A"), Rational(1), Role::kLow);
  EXPECT_EQ(bot.propose(view, {})->bid, 10);  // no history: net value
  // LV in WB against an HV that always bids 15: outbidding costs more than
  // the item is worth (v_l = 20 < 2 * 16), so any bid up to 15 earns 15.
  // Ties go to the bid nearest the net value 10.
  bot.on_feedback({1, Role::kLow, 10, 15, false, Rational(15), Rational(115)});
  EXPECT_EQ(bot.propose(view, {})->bid, 10);
  BotActor high(BotPolicy::empirical_best_response(), 1);
  auto hv = view_for(structure_values("1A"), Rational(1), Role::kHigh);
  high.on_feedback({1, Role::kHigh, 30, 12, true, Rational(30), Rational(130)});
  EXPECT_EQ(high.propose(hv, {})->bid, 12);  // HV takes ties
}

TEST(BotTest, BidsStayInDomain) {
  for (auto policy : {BotPolicy::uniform(), BotPolicy::qre(0.2),
                      BotPolicy::empirical_best_response()}) {
    auto config = all_bots(Rational(1, 2), 1, 4, 9, policy);
    auto result = run_session(config);
    ASSERT_TRUE(result.valid);
    for (const auto& record : result.records) {
      for (const auto& s : record.subjects) {
        EXPECT_GE(s.bid, 0);
        EXPECT_LE(s.bid, record.values.bid_cap());
      }
    }
  }
}

TEST(SessionTest, UniformBotsEfficiencyNearHalf) {
  auto config = all_bots(Rational(1), 4, 18, 20240601, BotPolicy::uniform());
  auto result = run_session(config);
  ASSERT_TRUE(result.valid);
  ASSERT_EQ(result.records.size(), 9u * 40u);
  int efficient = 0;
  for (const auto& r : result.records) efficient += r.efficient ? 1 : 0;
  // Exact rate: HV wins when its bid is higher or equal.
  const double exact = 0.5 * (1.0 + 1.0 / 291.0);
  EXPECT_NEAR(efficient / double(result.records.size()), exact, 0.05);
}

TEST(SessionTest, RecordInvariants) {
  auto config = all_bots(Rational(1, 2), 2, 6, 77, BotPolicy::uniform());
  config.seats[0] = BotPolicy::qre(0.1);
  config.seats[1] = BotPolicy::empirical_best_response();
  auto result = run_session(config);
  ASSERT_TRUE(result.valid);
  for (const auto& r : result.records) {
    const AuctionSpec spec = r.values.spec(config.alpha, config.gamma);
    const Resolution exact = resolve(spec, r.of(Role::kLow).bid, r.of(Role::kHigh).bid);
    ASSERT_TRUE(exact.deterministic());
    EXPECT_EQ(r.winner, exact.outcome.winner);
    EXPECT_EQ(r.transfer, exact.outcome.transfer);
    for (Role role : kRoles) {
      // Raw points minus item A equal the reduced payoff.
      EXPECT_EQ(r.of(role).points - r.values.item_a, exact.outcome.payoff(role));
      const Rational expected = r.winner == role
                                    ? Rational(r.values.item_b(role)) - r.transfer
                                    : Rational(r.values.item_a) + r.transfer;
      EXPECT_EQ(r.of(role).points, expected);
    }
    EXPECT_EQ(r.efficient, r.winner == Role::kHigh);
    if (r.equilibrium_outcome) {
      EXPECT_TRUE(r.efficient);
      const auto net = constants(spec);
      EXPECT_GE(r.transfer, net.c_low);
      EXPECT_LE(r.transfer, net.c_high);
    }
  }
}

TEST(SessionTest, PaymentFromPaidPeriod) {
  auto config = all_bots(Rational(1), 1, 4, 5, BotPolicy::uniform());
  auto result = run_session(config);
  ASSERT_TRUE(result.payment.has_value());
  const auto& pay = *result.payment;
  EXPECT_GE(pay.paid_period, 1);
  EXPECT_LE(pay.paid_period, 40);
  for (const auto& r : result.records) {
    if (r.period != pay.paid_period) continue;
    for (const auto& s : r.subjects) {
      EXPECT_EQ(pay.points[s.subject], s.points);
      EXPECT_EQ(pay.cash[s.subject], s.points * Rational(13, 100) + 5);
    }
  }
  auto again = run_session(config);
  EXPECT_EQ(again.payment->paid_period, pay.paid_period);
  EXPECT_EQ(again.payment->cash, pay.cash);
}

TEST(SessionTest, PaidPeriodCoversAllPeriods) {
  std::set<int> paid;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto config = all_bots(Rational(1), 4, 4, seed, BotPolicy::fixed(100));
    config.periods = 3;
    paid.insert(run_session(config).payment->paid_period);
  }
  EXPECT_EQ(paid, (std::set<int>{1, 2, 3}));
}

TEST(SessionTest, SeedDeterminism) {
  auto config = all_bots(Rational(0), 3, 8, 42, BotPolicy::uniform());
  config.periods = 6;
  auto a = run_session(config);
  auto b = run_session(config);
  EXPECT_EQ(a.event_log, b.event_log);
  config.rng_seed = 43;
  EXPECT_NE(run_session(config).event_log, a.event_log);
}

TEST(SessionTest, QreBotsFavourHighValueInWinnerBid) {
  auto config = all_bots(Rational(1), 3, 20, 1, BotPolicy::qre(0.3));
  auto result = run_session(config);
  double high = 0.0, low = 0.0;
  for (const auto& r : result.records) {
    const auto spec = r.values.spec(config.alpha, config.gamma);
    const auto net = constants(spec);
    const double es = net.equity_surplus;
    high += (to_double(r.of(Role::kHigh).points) - r.values.item_a - net.c_high) / es;
    low += (to_double(r.of(Role::kLow).points) - r.values.item_a - net.c_low) / es;
  }
  EXPECT_GT(high, low);
}

TEST(SessionTest, ScriptedHumansAndReplay) {
  auto config = all_bots(Rational(1), 1, 4, 8, BotPolicy::uniform());
  config.periods = 2;
  config.seats[2].reset();
  ScriptedActor human({Move::bid(30, 10), Move::revise(), Move::bid(20), Move::with_guess(25),
                       Move::confirm(), Move::timeout()});
  std::vector<Actor*> actors(4, nullptr);
  actors[2] = &human;
  auto result = run_session(config, actors);
  ASSERT_TRUE(result.valid);
  ASSERT_EQ(result.records.size(), 4u);
  for (const auto& r : result.records) {
    for (const auto& s : r.subjects) {
      if (s.subject != 2) continue;
      if (r.period == 1) {
        EXPECT_EQ(s.bid, 20);
        EXPECT_EQ(s.revisions, 1);
        EXPECT_EQ(s.guesses, (std::vector<Bid>{10, 25}));
      } else {
        EXPECT_EQ(s.bid, fallback_bid({2, s.role, 100, r.values.item_b(s.role), 0,
                                       160, Rational(1), Rational(1)}));
      }
    }
  }
  auto replayed = replay_events(result.event_log);
  EXPECT_EQ(replayed.event_log, result.event_log);
  EXPECT_TRUE(replayed.valid);
}

class ThrowingActor : public Actor {
 public:
  std::optional<BidEntry> propose(const SeatView& view,
                                  std::span<const TranscriptEntry>) override {
    if (view.period == 3) throw std::runtime_error("lost connection");
    return BidEntry{1, std::nullopt};
  }
  Review review(const SeatView&, const TranscriptEntry&, const WhatIfTable&) override {
    return {};
  }
};

TEST(SessionTest, ActorFailureAbortsWithPartialLog) {
  auto config = all_bots(Rational(1), 4, 4, 3, BotPolicy::uniform());
  config.seats[1].reset();
  ThrowingActor actor;
  std::vector<Actor*> actors(4, nullptr);
  actors[1] = &actor;
  auto result = run_session(config, actors);
  EXPECT_FALSE(result.valid);
  EXPECT_EQ(result.records.size(), 4u);  // two complete periods
  EXPECT_FALSE(result.payment.has_value());
  EXPECT_NE(result.abort_reason.find("lost connection"), std::string::npos);
  EXPECT_NE(result.event_log.back().find("\"valid\":false"), std::string::npos);
  auto replayed = replay_events(result.event_log);
  EXPECT_EQ(replayed.event_log, result.event_log);
}

TEST(SessionTest, MissingActorIsRejected) {
  auto config = SessionConfig::make("x", Rational(1), 4, 4, 1);
  EXPECT_THROW(run_session(config), PreconditionError);
}

TEST(MachineTest, InputsValidateAndLeaveStateUnchanged) {
  auto config = SessionConfig::make("m", Rational(1, 2), 1, 4, 21);
  config.seats = {std::nullopt, BotPolicy::uniform(), BotPolicy::uniform(),
                  BotPolicy::uniform()};
  config.periods = 2;  // period 1 uses the first half of the schedule
  SessionMachine machine(config);
  EXPECT_THROW(machine.submit_bid(0, 5, std::nullopt), PreconditionError);
  machine.start();
  EXPECT_EQ(machine.pending_seats(), (std::vector<int>{0}));
  const auto before = machine.seat_state(0);
  const auto log_size = machine.event_log().size();
  EXPECT_THROW(machine.submit_bid(0, 161, std::nullopt), DomainError);
  EXPECT_THROW(machine.submit_bid(0, 5, 161), DomainError);
  EXPECT_THROW(machine.confirm(0), PreconditionError);
  EXPECT_THROW(machine.submit_bid(1, 5, std::nullopt), PreconditionError);
  const auto after = machine.seat_state(0);
  EXPECT_EQ(after.version, before.version);
  EXPECT_EQ(after.phase, Phase::kBidding);
  EXPECT_EQ(machine.event_log().size(), log_size);

  auto shown = machine.submit_bid(0, 10, std::nullopt);
  EXPECT_FALSE(shown.entry.shown.has_value());
  EXPECT_EQ(shown.table[0].transfer.to_string(), "[5,10)");
  EXPECT_EQ(machine.seat_state(0).phase, Phase::kReviewing);
  auto guess = machine.hypothesize(0, 12);
  ASSERT_TRUE(guess.entry.shown.has_value());
  EXPECT_EQ(machine.seat_state(0).transcript.size(), 2u);
  machine.confirm(0);
  EXPECT_EQ(machine.current_period(), 2);
  EXPECT_EQ(machine.seat_state(0).last_feedback->period, 1);
  EXPECT_EQ(machine.seat_state(0).phase, Phase::kBidding);
  machine.timeout(0);
  EXPECT_TRUE(machine.finished());
  EXPECT_TRUE(machine.payment().has_value());
  EXPECT_EQ(machine.seat_state(0).phase, Phase::kFinished);
  EXPECT_TRUE(machine.seat_state(0).cash.has_value());
  EXPECT_EQ(replay_events(machine.event_log()).event_log, machine.event_log());
}

TEST(MachineTest, AllBotSessionRunsOnStart) {
  SessionMachine machine(all_bots(Rational(1), 4, 4, 2, BotPolicy::uniform()));
  machine.start();
  EXPECT_TRUE(machine.finished());
  EXPECT_EQ(machine.records().size(), 80u);
}

TEST(CsvTest, PeriodRowsFollowHeader) {
  auto config = all_bots(Rational(1, 2), 1, 4, 12, BotPolicy::uniform());
  config.periods = 2;
  auto result = run_session(config);
  std::ostringstream out;
  write_period_csv(out, config, result.records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kPeriodCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 17);
    EXPECT_EQ(line.rfind("t,1,0.5,", 0), 0u) << line;
  }
  EXPECT_EQ(rows, 8);
}

}  // namespace
}  // namespace alpha_auction::session
