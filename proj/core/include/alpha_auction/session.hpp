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

#ifndef ALPHA_AUCTION_SESSION_HPP_
#define ALPHA_AUCTION_SESSION_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alpha_auction/auction.hpp"
#include "alpha_auction/rational.hpp"

namespace alpha_auction::session {

// mt19937_64 with sampling helpers written out by hand, so a seed replays
// bit-exactly on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  bool coin() { return (next() >> 63) != 0; }
  // Index drawn from a probability vector (inverse cdf).
  Bid sample(std::span<const double> dist);

 private:
  std::mt19937_64 engine_;
};

// Independent stream for `stream` derived from `seed` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Raw item values in one period. Item A is worth the same to both partners;
// item B is the contested one.
struct PeriodValues {
  int item_a;
  int item_b_low;
  int item_b_high;

  int bid_cap() const { return item_b_high; }
  int item_b(Role role) const {
    return role == Role::kLow ? item_b_low : item_b_high;
  }
  // Valuations net of item A.
  ValuationPair reduced() const {
    return ValuationPair(item_b_low - item_a, item_b_high - item_a);
  }
  AuctionSpec spec(const Rational& alpha, const Rational& gamma) const {
    return AuctionSpec(alpha, gamma, reduced(), BidDomain(bid_cap()));
  }

  friend bool operator==(const PeriodValues&, const PeriodValues&) = default;
};

class ValuationSchedule {
 public:
  // Session types 1-4. Types 1 and 2 switch values after half the periods.
  static ValuationSchedule for_type(int session_type, int periods = 40);

  int periods() const { return static_cast<int>(values_.size()); }
  // 1-based period.
  const PeriodValues& at(int period) const;

 private:
  std::vector<PeriodValues> values_;
};

// Named reduced structures: 1A, 1B, 2A, 2B, 3, 4.
PeriodValues structure_values(std::string_view name);

struct BotPolicy {
  enum class Kind : std::uint8_t {
    kUniform,
    kQre,
    kEmpiricalBestResponse,
    kFixed
  };

  Kind kind = Kind::kUniform;
  double lambda = 0.0;
  Bid bid = 0;

  static BotPolicy uniform() { return {}; }
  static BotPolicy qre(double lambda);
  static BotPolicy empirical_best_response() {
    return {Kind::kEmpiricalBestResponse, 0.0, 0};
  }
  static BotPolicy fixed(Bid bid);

  // "uniform", "qre:0.3", "ebr", "fixed:20".
  std::string to_string() const;
  static BotPolicy parse(std::string_view text);

  friend bool operator==(const BotPolicy&, const BotPolicy&) = default;
};

// Logit QRE of `spec` at `lambda`, reached by continuation from 0 in steps
// of 0.01 and memoised for the life of the process. Thread-safe.
const MixedProfile& cached_qre(const AuctionSpec& spec, double lambda);

// A seat is a bot (policy set) or driven from outside (nullopt).
using SeatAssignment = std::optional<BotPolicy>;

struct SessionConfig {
  std::string session_id = "s1";
  Rational alpha{1};
  Rational gamma{1};
  int session_type = 4;
  int n_subjects = 4;
  int periods = 40;
  std::uint64_t rng_seed = 0;
  Rational point_rate{1, 10};
  Rational show_up{5};
  double timeout_seconds = 120.0;
  std::vector<SeatAssignment> seats;  // empty means every seat external

  // Defaults point_rate to 0.13 for type 1 and 0.10 otherwise.
  static SessionConfig make(std::string session_id, Rational alpha,
                            int session_type, int n_subjects,
                            std::uint64_t rng_seed);

  void validate() const;
  bool is_bot(int subject) const;
  ValuationSchedule schedule() const {
    return ValuationSchedule::for_type(session_type, periods);
  }
};

struct Pair {
  int pair_id;
  int subject_high;
  int subject_low;

  int subject(Role role) const {
    return role == Role::kHigh ? subject_high : subject_low;
  }
};

// Uniform perfect matching (Fisher-Yates) and a fair coin per pair for
// the high-value role.
std::vector<Pair> rematch(int n_subjects, Rng& rng);

// Bound of a quantity that may be exact or a range.
struct Amount {
  Rational low;
  Rational high;
  bool low_open = false;
  bool high_open = false;

  static Amount exact(Rational value) { return {value, value}; }
  bool is_exact() const { return low == high && !low_open && !high_open; }
  // "15", "[16,160]", "[5,10)", "(10,85]".
  std::string to_string() const;
};

enum class Case : std::uint8_t { kBelow, kEqual, kAbove };
std::string_view to_string(Case which);

struct WhatIfRow {
  Case which;
  bool possible = true;       // false for "below 0" and "above the cap"
  Rational win_probability;   // own chance of receiving item B
  Amount transfer;            // paid by whoever receives item B
  Amount points;              // own raw points
};

using WhatIfTable = std::array<WhatIfRow, 3>;

// Three-case summary of what `own_bid` can lead to against an unknown bid.
// Ranges are over opponent bids strictly below / strictly above own_bid.
WhatIfTable what_if_table(const PeriodValues& values, const Rational& alpha,
                          const Rational& gamma, Role role, Bid own_bid);

struct RawOutcome {
  bool own_wins;
  Rational transfer;
  Rational own_points;
  Rational other_points;
};

// Outcome against a guessed bid in raw points. With 0 < gamma < 1 a tie
// has two outcomes; `alternative` then holds the other one and `weight`
// the probability of `outcome`.
struct Hypothesis {
  RawOutcome outcome;
  std::optional<RawOutcome> alternative;
  Rational weight{1};
};

Hypothesis hypothesize(const PeriodValues& values, const Rational& alpha,
                       const Rational& gamma, Role role, Bid own_bid,
                       Bid guess);

// What a seat sees in one period. No partner identity.
struct SeatView {
  int period;
  Role role;
  int item_a;
  int item_b_own;
  int item_b_other;
  int bid_cap;
  Rational alpha;
  Rational gamma;
};

struct TranscriptEntry {
  Bid bid;
  std::optional<Bid> guess;
  std::optional<Hypothesis> shown;  // present when a guess was made
};

enum class Action : std::uint8_t { kConfirm, kRevise, kGuess, kTimeout };

struct Review {
  Action action = Action::kConfirm;
  Bid guess = 0;  // used by kGuess
};

struct BidEntry {
  Bid bid;
  std::optional<Bid> guess;
};

struct Feedback {
  int period;
  Role role;
  Bid own_bid;
  Bid other_bid;
  bool own_wins;
  Rational transfer;
  Rational points;
};

class Actor {
 public:
  virtual ~Actor() = default;

  // nullopt means no bid before the deadline.
  virtual std::optional<BidEntry> propose(
      const SeatView& view, std::span<const TranscriptEntry> transcript) = 0;
  virtual Review review(const SeatView& view, const TranscriptEntry& shown,
                        const WhatIfTable& table) = 0;
  virtual void on_feedback(const Feedback&) {}
};

// Bot actor: proposes once and confirms. Draws come from its own stream.
class BotActor : public Actor {
 public:
  BotActor(BotPolicy policy, std::uint64_t seed);

  std::optional<BidEntry> propose(
      const SeatView& view, std::span<const TranscriptEntry>) override;
  Review review(const SeatView&, const TranscriptEntry&,
                const WhatIfTable&) override {
    return {};
  }
  void on_feedback(const Feedback& feedback) override;

  const BotPolicy& policy() const { return policy_; }

 private:
  BotPolicy policy_;
  Rng rng_;
  // Bids seen from opponents, by the role this bot held.
  std::array<std::vector<Bid>, 2> seen_;
};

// Plays a fixed list of moves in order, across periods. A move that does
// not fit the current prompt, or running out of moves, throws Error.
class ScriptedActor : public Actor {
 public:
  struct Move {
    enum class Kind : std::uint8_t { kBid, kGuess, kConfirm, kRevise, kTimeout };
    Kind kind;
    Bid value = 0;
    std::optional<Bid> guess;

    static Move bid(Bid value, std::optional<Bid> guess = std::nullopt) {
      return {Kind::kBid, value, guess};
    }
    static Move with_guess(Bid guess) { return {Kind::kGuess, guess, {}}; }
    static Move confirm() { return {Kind::kConfirm, 0, {}}; }
    static Move revise() { return {Kind::kRevise, 0, {}}; }
    static Move timeout() { return {Kind::kTimeout, 0, {}}; }
  };

  explicit ScriptedActor(std::vector<Move> moves) : moves_(std::move(moves)) {}

  std::optional<BidEntry> propose(const SeatView&,
                                  std::span<const TranscriptEntry>) override;
  Review review(const SeatView&, const TranscriptEntry&,
                const WhatIfTable&) override;
  bool exhausted() const { return next_ == moves_.size(); }

 private:
  const Move& take();

  std::vector<Move> moves_;
  std::size_t next_ = 0;
};

struct ConfirmResult {
  Bid final_bid;
  std::vector<TranscriptEntry> transcript;
  int revisions = 0;
  bool timed_out = false;
};

// Default for a seat that never entered a bid: its net valuation, the
// maximin bid.
Bid fallback_bid(const SeatView& view);

// bid -> shown outcome and table -> confirm / revise / new guess, until a
// confirm or timeout (auto-confirm the last entered bid).
ConfirmResult confirm_loop(Actor& actor, const SeatView& view,
                           int max_steps = 10000);

struct SubjectResult {
  int subject;
  Role role;
  Bid bid;
  int revisions;
  std::vector<Bid> guesses;
  Rational points;
};

struct PeriodRecord {
  int period;
  int pair_id;
  PeriodValues values;
  std::array<SubjectResult, 2> subjects;  // [low, high]
  Role winner;
  Rational transfer;
  bool efficient;
  bool equilibrium_outcome;

  const SubjectResult& of(Role role) const {
    return subjects[role == Role::kLow ? 0 : 1];
  }
};

struct Payment {
  int paid_period;
  std::vector<Rational> points;  // per subject in the paid period
  std::vector<Rational> cash;
};

enum class Phase : std::uint8_t { kBidding, kReviewing, kWaiting, kFinished };
std::string_view to_string(Phase phase);

struct SeatState {
  Phase phase;
  SeatView view;
  std::vector<TranscriptEntry> transcript;
  std::optional<Feedback> last_feedback;
  std::optional<Rational> cash;
  std::optional<int> paid_period;
  std::uint64_t version;  // bumps on every change visible to this seat
};

// Reply to a bid or guess: the outcome shown (if a guess was given) and
// the three-case table.
struct Shown {
  TranscriptEntry entry;
  WhatIfTable table;
};

// Event-driven session. Bot seats act as soon as a period opens; external
// seats are driven through the input methods. Every input and outcome is
// appended to a line-delimited JSON event log.
class SessionMachine {
 public:
  explicit SessionMachine(SessionConfig config);
  ~SessionMachine();
  SessionMachine(SessionMachine&&) noexcept;
  SessionMachine& operator=(SessionMachine&&) noexcept;

  // Logs the config and opens period 1.
  void start();

  // Inputs for external seats. DomainError for a bid outside the period's
  // domain, PreconditionError for a seat in the wrong phase. State is
  // unchanged on error.
  Shown submit_bid(int subject, Bid bid, std::optional<Bid> guess);
  Shown hypothesize(int subject, Bid guess);
  void confirm(int subject);
  void revise(int subject);
  void timeout(int subject);
  void abort(std::string_view reason);

  const SessionConfig& config() const;
  bool started() const;
  bool finished() const;
  bool valid() const;
  int current_period() const;
  SeatState seat_state(int subject) const;
  // External seats that still owe a confirmation this period.
  std::vector<int> pending_seats() const;
  const std::vector<PeriodRecord>& records() const;
  const std::optional<Payment>& payment() const;
  const std::vector<std::string>& event_log() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SessionResult {
  std::vector<PeriodRecord> records;
  std::optional<Payment> payment;
  std::vector<std::string> event_log;
  bool valid;
  std::string abort_reason;
};

// Runs all periods. Seats the config marks as bots act inside the machine;
// the others are played by `actors[subject]`. An exception from an actor
// aborts the session and returns the partial, invalid log.
SessionResult run_session(const SessionConfig& config,
                          std::span<Actor* const> actors = {});

// Rebuilds a session from its event log by re-applying the external
// inputs; bots regenerate their own events. The result's log equals the
// input byte for byte when the log is intact.
SessionResult replay_events(std::span<const std::string> event_log);

inline constexpr std::string_view kPeriodCsvHeader =
    "session_id,session_type,auction_alpha,period,pair_id,subject_id,role,"
    "item_a,item_b_own,item_b_other,bid,revisions,opp_bid,winner_role,"
    "transfer,raw_points,efficient,equilibrium_outcome";

// One row per subject per period.
void write_period_csv(std::ostream& out, const SessionConfig& config,
                      std::span<const PeriodRecord> records,
                      bool header = true);
void write_event_log(std::ostream& out, std::span<const std::string> lines);

}  // namespace alpha_auction::session

#endif  // ALPHA_AUCTION_SESSION_HPP_
