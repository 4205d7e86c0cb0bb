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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "alpha_auction/errors.hpp"
#include "alpha_auction/qre.hpp"

namespace alpha_auction::session {
namespace {

using Json = nlohmann::ordered_json;

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DomainError(fmt::format("invalid {}: '{}'", what, text));
  }
  return value;
}

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(fmt::format("invalid {}: '{}'", what, text));
  }
  return value;
}

PeriodValues values_of(const SeatView& view) {
  if (view.role == Role::kHigh) {
    return {view.item_a, view.item_b_other, view.item_b_own};
  }
  return {view.item_a, view.item_b_own, view.item_b_other};
}

void check_bid(Bid bid, int cap, std::string_view what) {
  if (bid < 0 || bid > cap) {
    throw DomainError(fmt::format("{} out of range", what));
  }
}

RawOutcome raw_outcome(const Outcome& outcome, Role role, int item_a) {
  return {outcome.winner == role, outcome.transfer,
          outcome.payoff(role) + item_a, outcome.payoff(opponent(role)) + item_a};
}

// Reduced payoff of `own` against `other` for the best-response bot.
double reduced_payoff(double alpha, double win_on_tie, double value, Bid own,
                      Bid other) {
  if (own > other) return value - (alpha * own + (1.0 - alpha) * other);
  if (own < other) return alpha * other + (1.0 - alpha) * own;
  return win_on_tie * (value - own) + (1.0 - win_on_tie) * own;
}

Rational win_on_tie(const Rational& gamma, Role role) {
  return role == Role::kHigh ? gamma : Rational(1) - gamma;
}

}  // namespace

// ---------------------------------------------------------------- rng

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("Rng::below: bound must be positive");
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Bid Rng::sample(std::span<const double> dist) {
  if (dist.empty()) throw DomainError("Rng::sample: empty distribution");
  const double u = uniform01();
  double cumulative = 0.0;
  Bid last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    cumulative += dist[i];
    last_positive = static_cast<Bid>(i);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------- schedule

ValuationSchedule ValuationSchedule::for_type(int session_type, int periods) {
  if (periods < 1) throw DomainError("periods must be positive");
  PeriodValues first{};
  PeriodValues second{};
  switch (session_type) {
    case 1:
      first = {100, 120, 160};
      second = {100, 120, 320};
      break;
    case 2:
      first = {50, 250, 290};
      second = {50, 250, 450};
      break;
    case 3:
      first = second = {50, 250, 450};
      break;
    case 4:
      first = second = {50, 250, 290};
      break;
    default:
      throw DomainError(fmt::format("unknown session type {}", session_type));
  }
  ValuationSchedule schedule;
  const int switch_after = periods / 2;
  for (int period = 1; period <= periods; ++period) {
    schedule.values_.push_back(period <= switch_after ? first : second);
  }
  return schedule;
}

const PeriodValues& ValuationSchedule::at(int period) const {
  if (period < 1 || period > periods()) {
    throw DomainError(fmt::format("period {} outside 1..{}", period, periods()));
  }
  return values_[static_cast<std::size_t>(period - 1)];
}

PeriodValues structure_values(std::string_view name) {
  if (name == "1A") return {100, 120, 160};
  if (name == "1B") return {100, 120, 320};
  if (name == "2A" || name == "4") return {50, 250, 290};
  if (name == "2B" || name == "3") return {50, 250, 450};
  throw DomainError(fmt::format("unknown structure '{}'", name));
}

// ---------------------------------------------------------------- bots

BotPolicy BotPolicy::qre(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("qre bot needs a finite lambda >= 0");
  }
  return {Kind::kQre, lambda, 0};
}

BotPolicy BotPolicy::fixed(Bid bid) {
  if (bid < 0) throw DomainError("fixed bot bid must be >= 0");
  return {Kind::kFixed, 0.0, bid};
}

std::string BotPolicy::to_string() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kQre:
      return fmt::format("qre:{}", lambda);
    case Kind::kEmpiricalBestResponse:
      return "ebr";
    case Kind::kFixed:
      return fmt::format("fixed:{}", bid);
  }
  return "uniform";
}

BotPolicy BotPolicy::parse(std::string_view text) {
  if (text == "uniform") return uniform();
  if (text == "ebr") return empirical_best_response();
  if (text.starts_with("qre:")) {
    return qre(parse_double(text.substr(4), "qre lambda"));
  }
  if (text.starts_with("fixed:")) {
    return fixed(parse_int(text.substr(6), "fixed bid"));
  }
  throw DomainError(fmt::format("unknown bot policy '{}'", text));
}

const MixedProfile& cached_qre(const AuctionSpec& spec, double lambda) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<MixedProfile>> cache;
  const std::string key = fmt::format(
      "{}|{}|{}|{}|{}|{}", format_rational(spec.alpha),
      format_rational(spec.gamma), spec.valuations.low(),
      spec.valuations.high(), spec.bids.p_max(), lambda);
  std::lock_guard<std::mutex> lock(mutex);
  auto found = cache.find(key);
  if (found != cache.end()) return *found->second;

  std::vector<double> grid;
  for (int k = 0; k * 0.01 < lambda - 1e-12; ++k) grid.push_back(k * 0.01);
  grid.push_back(lambda);
  auto curve = qre::sweep(spec, grid, true);
  auto profile = std::make_unique<MixedProfile>(curve.points.back().profile);
  return *cache.emplace(key, std::move(profile)).first->second;
}

BotActor::BotActor(BotPolicy policy, std::uint64_t seed)
    : policy_(policy), rng_(seed) {}

std::optional<BidEntry> BotActor::propose(const SeatView& view,
                                          std::span<const TranscriptEntry>) {
  const PeriodValues values = values_of(view);
  switch (policy_.kind) {
    case BotPolicy::Kind::kUniform:
      return BidEntry{static_cast<Bid>(rng_.below(
                          static_cast<std::uint64_t>(view.bid_cap) + 1)),
                      std::nullopt};
    case BotPolicy::Kind::kQre: {
      const auto& profile =
          cached_qre(values.spec(view.alpha, view.gamma), policy_.lambda);
      return BidEntry{rng_.sample(profile.of(view.role)), std::nullopt};
    }
    case BotPolicy::Kind::kEmpiricalBestResponse: {
      const auto& seen = seen_[view.role == Role::kLow ? 0 : 1];
      const Bid own_net = fallback_bid(view);
      if (seen.empty()) return BidEntry{own_net, std::nullopt};
      const double alpha = to_double(view.alpha);
      const double tie = to_double(win_on_tie(view.gamma, view.role));
      const double value = view.item_b_own - view.item_a;
      Bid best = own_net;
      double best_payoff = -1e300;
      for (Bid own = 0; own <= view.bid_cap; ++own) {
        double total = 0.0;
        for (Bid other : seen) {
          total += reduced_payoff(alpha, tie, value, own,
                                  std::min(other, view.bid_cap));
        }
        const double payoff = total / static_cast<double>(seen.size());
        // Ties go to the bid closest to the own net valuation.
        const bool better = payoff > best_payoff + 1e-9;
        const bool tied = std::abs(payoff - best_payoff) <= 1e-9;
        if (better || (tied && std::abs(own - own_net) < std::abs(best - own_net))) {
          if (better) best_payoff = payoff;
          best = own;
        }
      }
      return BidEntry{best, std::nullopt};
    }
    case BotPolicy::Kind::kFixed:
      return BidEntry{std::min(policy_.bid, view.bid_cap), std::nullopt};
  }
  return std::nullopt;
}

void BotActor::on_feedback(const Feedback& feedback) {
  seen_[feedback.role == Role::kLow ? 0 : 1].push_back(feedback.other_bid);
}

const ScriptedActor::Move& ScriptedActor::take() {
  if (next_ >= moves_.size()) throw Error("script exhausted");
  return moves_[next_++];
}

std::optional<BidEntry> ScriptedActor::propose(
    const SeatView&, std::span<const TranscriptEntry>) {
  const Move& move = take();
  if (move.kind == Move::Kind::kTimeout) return std::nullopt;
  if (move.kind != Move::Kind::kBid) {
    throw Error(fmt::format("script move {} is not a bid", next_ - 1));
  }
  return BidEntry{move.value, move.guess};
}

Review ScriptedActor::review(const SeatView&, const TranscriptEntry&,
                             const WhatIfTable&) {
  const Move& move = take();
  switch (move.kind) {
    case Move::Kind::kConfirm:
      return {Action::kConfirm, 0};
    case Move::Kind::kRevise:
      return {Action::kRevise, 0};
    case Move::Kind::kGuess:
      return {Action::kGuess, move.value};
    case Move::Kind::kTimeout:
      return {Action::kTimeout, 0};
    case Move::Kind::kBid:
      break;
  }
  throw Error(fmt::format("script move {} is a bid during review", next_ - 1));
}

// ---------------------------------------------------------------- config

SessionConfig SessionConfig::make(std::string session_id, Rational alpha,
                                  int session_type, int n_subjects,
                                  std::uint64_t rng_seed) {
  SessionConfig config;
  config.session_id = std::move(session_id);
  config.alpha = alpha;
  config.session_type = session_type;
  config.n_subjects = n_subjects;
  config.rng_seed = rng_seed;
  config.point_rate = session_type == 1 ? Rational(13, 100) : Rational(1, 10);
  return config;
}

void SessionConfig::validate() const {
  if (session_id.empty() ||
      !std::all_of(session_id.begin(), session_id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == '-' || c == '.';
      })) {
    throw DomainError("session id must be non-empty [A-Za-z0-9_.-]");
  }
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must lie in [0,1]");
  if (gamma < 0 || gamma > 1) throw DomainError("gamma must lie in [0,1]");
  if (session_type < 1 || session_type > 4) {
    throw DomainError("session type must be 1, 2, 3 or 4");
  }
  if (n_subjects < 4 || n_subjects % 2 != 0) {
    throw DomainError("n_subjects must be an even integer >= 4");
  }
  if (periods < 1) throw DomainError("periods must be positive");
  if (point_rate < 0 || show_up < 0) {
    throw DomainError("point rate and show-up fee must be >= 0");
  }
  if (!(timeout_seconds > 0.0)) throw DomainError("timeout must be positive");
  if (!seats.empty() && seats.size() != static_cast<std::size_t>(n_subjects)) {
    throw DomainError("seat list must cover every subject");
  }
}

bool SessionConfig::is_bot(int subject) const {
  return !seats.empty() && seats.at(static_cast<std::size_t>(subject)).has_value();
}

std::vector<Pair> rematch(int n_subjects, Rng& rng) {
  if (n_subjects < 2 || n_subjects % 2 != 0) {
    throw DomainError("rematch needs an even number of subjects");
  }
  std::vector<int> order(static_cast<std::size_t>(n_subjects));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<Pair> pairs;
  for (std::size_t k = 0; k < order.size(); k += 2) {
    const bool first_high = rng.coin();
    const int a = order[k];
    const int b = order[k + 1];
    pairs.push_back({static_cast<int>(k / 2), first_high ? a : b,
                     first_high ? b : a});
  }
  return pairs;
}

// ---------------------------------------------------------------- tables

std::string Amount::to_string() const {
  if (is_exact()) return format_rational(low);
  return fmt::format("{}{},{}{}", low_open ? '(' : '[', format_rational(low),
                     format_rational(high), high_open ? ')' : ']');
}

std::string_view to_string(Case which) {
  switch (which) {
    case Case::kBelow:
      return "below";
    case Case::kEqual:
      return "equal";
    case Case::kAbove:
      return "above";
  }
  return "below";
}

WhatIfTable what_if_table(const PeriodValues& values, const Rational& alpha,
                          const Rational& gamma, Role role, Bid own_bid) {
  check_bid(own_bid, values.bid_cap(), "bid");
  const Rational own(own_bid);
  const Rational cap(values.bid_cap());
  const Rational item_b(values.item_b(role));
  const Rational item_a(values.item_a);
  const bool winner_bid = alpha == 1;
  const bool loser_bid = alpha == 0;

  WhatIfRow below{Case::kBelow, own_bid > 0, Rational(1), {}, {}};
  if (winner_bid) {
    below.transfer = Amount::exact(own);
  } else if (loser_bid) {
    below.transfer = {Rational(0), own - 1};
  } else {
    below.transfer = {alpha * own, own, false, true};
  }
  below.points = {item_b - below.transfer.high, item_b - below.transfer.low,
                  below.transfer.high_open, below.transfer.low_open};

  const Rational tie_win = win_on_tie(gamma, role);
  WhatIfRow equal{Case::kEqual, true, tie_win, Amount::exact(own), {}};
  const Rational win_points = item_b - own;
  const Rational lose_points = item_a + own;
  if (tie_win == 1) {
    equal.points = Amount::exact(win_points);
  } else if (tie_win == 0) {
    equal.points = Amount::exact(lose_points);
  } else {
    equal.points = {std::min(win_points, lose_points),
                    std::max(win_points, lose_points)};
  }

  WhatIfRow above{Case::kAbove, own_bid < values.bid_cap(), Rational(0), {}, {}};
  if (winner_bid) {
    above.transfer = {own + 1, cap};
  } else if (loser_bid) {
    above.transfer = Amount::exact(own);
  } else {
    above.transfer = {own, alpha * cap + (Rational(1) - alpha) * own, true, false};
  }
  above.points = {item_a + above.transfer.low, item_a + above.transfer.high,
                  above.transfer.low_open, above.transfer.high_open};
  return {below, equal, above};
}

Hypothesis hypothesize(const PeriodValues& values, const Rational& alpha,
                       const Rational& gamma, Role role, Bid own_bid,
                       Bid guess) {
  check_bid(own_bid, values.bid_cap(), "bid");
  check_bid(guess, values.bid_cap(), "guess");
  const AuctionSpec spec = values.spec(alpha, gamma);
  const Bid low = role == Role::kLow ? own_bid : guess;
  const Bid high = role == Role::kHigh ? own_bid : guess;
  const Resolution resolution = resolve(spec, low, high);
  Hypothesis out{raw_outcome(resolution.outcome, role, values.item_a),
                 std::nullopt, resolution.weight};
  if (resolution.alternative) {
    out.alternative = raw_outcome(*resolution.alternative, role, values.item_a);
  }
  return out;
}

// ---------------------------------------------------------------- confirm loop

Bid fallback_bid(const SeatView& view) {
  return std::min((view.item_b_own - view.item_a) / 2, view.bid_cap);
}

namespace {

TranscriptEntry make_entry(const SeatView& view, Bid bid,
                           std::optional<Bid> guess) {
  check_bid(bid, view.bid_cap, "bid");
  TranscriptEntry entry{bid, guess, std::nullopt};
  if (guess) {
    entry.shown = hypothesize(values_of(view), view.alpha, view.gamma,
                              view.role, bid, *guess);
  }
  return entry;
}

// Drives `actor` through one period. Sink receives the inputs in order:
//   Shown bid(BidEntry), Shown guess(Bid), confirm(), revise(), timeout().
template <class Sink>
void drive(Actor& actor, const SeatView& view, Sink& sink, int max_steps) {
  std::vector<TranscriptEntry> transcript;
  int steps = 0;
  auto count = [&] {
    if (++steps > max_steps) throw Error("actor exceeded the step limit");
  };
  while (true) {
    count();
    const auto entry = actor.propose(view, transcript);
    if (!entry) {
      sink.timeout();
      return;
    }
    Shown shown = sink.bid(*entry);
    transcript.push_back(shown.entry);
    while (true) {
      count();
      const Review review = actor.review(view, transcript.back(), shown.table);
      if (review.action == Action::kConfirm) {
        sink.confirm();
        return;
      }
      if (review.action == Action::kTimeout) {
        sink.timeout();
        return;
      }
      if (review.action == Action::kRevise) {
        sink.revise();
        break;
      }
      shown = sink.guess(review.guess);
      transcript.push_back(shown.entry);
    }
  }
}

struct LocalSink {
  const SeatView& view;
  ConfirmResult& result;

  Shown bid(const BidEntry& entry) {
    Shown shown{make_entry(view, entry.bid, entry.guess),
                what_if_table(values_of(view), view.alpha, view.gamma,
                              view.role, entry.bid)};
    result.transcript.push_back(shown.entry);
    return shown;
  }
  Shown guess(Bid guess) {
    const Bid bid = result.transcript.back().bid;
    Shown shown{make_entry(view, bid, guess),
                what_if_table(values_of(view), view.alpha, view.gamma,
                              view.role, bid)};
    result.transcript.push_back(shown.entry);
    return shown;
  }
  void confirm() { result.final_bid = result.transcript.back().bid; }
  void revise() { ++result.revisions; }
  void timeout() {
    result.timed_out = true;
    result.final_bid = result.transcript.empty() ? fallback_bid(view)
                                                 : result.transcript.back().bid;
  }
};

}  // namespace

ConfirmResult confirm_loop(Actor& actor, const SeatView& view, int max_steps) {
  ConfirmResult result{0, {}, 0, false};
  LocalSink sink{view, result};
  drive(actor, view, sink, max_steps);
  return result;
}

// ---------------------------------------------------------------- machine

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kBidding:
      return "bidding";
    case Phase::kReviewing:
      return "reviewing";
    case Phase::kWaiting:
      return "waiting";
    case Phase::kFinished:
      return "finished";
  }
  return "waiting";
}

struct SessionMachine::Impl {
  struct Seat {
    Phase phase = Phase::kWaiting;
    SeatView view{};
    std::vector<TranscriptEntry> transcript;
    int revisions = 0;
    std::optional<Bid> final_bid;
    std::optional<Feedback> feedback;
    std::uint64_t version = 0;
    std::unique_ptr<BotActor> bot;
  };

  explicit Impl(SessionConfig cfg)
      : config(std::move(cfg)),
        schedule(config.schedule()),
        rng(derive_seed(config.rng_seed, 0)) {
    config.validate();
    seats.resize(static_cast<std::size_t>(config.n_subjects));
    for (int s = 0; s < config.n_subjects; ++s) {
      if (config.is_bot(s)) {
        seats[static_cast<std::size_t>(s)].bot = std::make_unique<BotActor>(
            *config.seats[static_cast<std::size_t>(s)],
            derive_seed(config.rng_seed, static_cast<std::uint64_t>(s) + 1));
      }
    }
  }

  Seat& seat(int subject) {
    if (subject < 0 || subject >= config.n_subjects) {
      throw DomainError(fmt::format("no seat {}", subject));
    }
    return seats[static_cast<std::size_t>(subject)];
  }

  Seat& external(int subject, std::initializer_list<Phase> phases) {
    if (!started || finished) throw PreconditionError("session is not running");
    Seat& target = seat(subject);
    if (target.bot) throw PreconditionError("seat is played by a bot");
    if (std::find(phases.begin(), phases.end(), target.phase) == phases.end()) {
      throw PreconditionError(fmt::format("seat is {}", to_string(target.phase)));
    }
    return target;
  }

  void log(Json event) { lines.push_back(event.dump()); }

  Json event(std::string_view kind) {
    Json out;
    out["event"] = kind;
    out["period"] = period;
    return out;
  }

  Shown show(const Seat& target, Bid bid, std::optional<Bid> guess) {
    return {make_entry(target.view, bid, guess),
            what_if_table(values_of(target.view), config.alpha, config.gamma,
                          target.view.role, bid)};
  }

  void start() {
    if (started) throw PreconditionError("session already started");
    Json head = event("session_start");
    head.erase("period");
    head["session_id"] = config.session_id;
    head["alpha"] = format_rational(config.alpha);
    head["gamma"] = format_rational(config.gamma);
    head["session_type"] = config.session_type;
    head["n_subjects"] = config.n_subjects;
    head["periods"] = config.periods;
    head["rng_seed"] = config.rng_seed;
    head["point_rate"] = format_rational(config.point_rate);
    head["show_up"] = format_rational(config.show_up);
    head["timeout_seconds"] = config.timeout_seconds;
    Json seat_list = Json::array();
    for (int s = 0; s < config.n_subjects; ++s) {
      seat_list.push_back(config.is_bot(s)
                              ? config.seats[static_cast<std::size_t>(s)]->to_string()
                              : std::string("external"));
    }
    head["seats"] = seat_list;
    log(head);
    started = true;
    open_period(1);
    advance();
  }

  void open_period(int next) {
    period = next;
    pairs = rematch(config.n_subjects, rng);
    const PeriodValues& values = schedule.at(period);
    Json opened = event("period_start");
    opened["item_a"] = values.item_a;
    opened["item_b_low"] = values.item_b_low;
    opened["item_b_high"] = values.item_b_high;
    Json pair_list = Json::array();
    for (const Pair& pair : pairs) {
      pair_list.push_back({pair.pair_id, pair.subject_high, pair.subject_low});
      for (Role role : kRoles) {
        Seat& target = seat(pair.subject(role));
        target.phase = Phase::kBidding;
        target.view = {period,         role,
                       values.item_a,  values.item_b(role),
                       values.item_b(opponent(role)),
                       values.bid_cap(), config.alpha, config.gamma};
        target.transcript.clear();
        target.revisions = 0;
        target.final_bid.reset();
        ++target.version;
      }
    }
    opened["pairs"] = pair_list;
    log(opened);

    for (int s = 0; s < config.n_subjects; ++s) {
      Seat& target = seat(s);
      if (!target.bot) continue;
      ConfirmResult result = confirm_loop(*target.bot, target.view);
      target.transcript = std::move(result.transcript);
      target.revisions = result.revisions;
      target.final_bid = result.final_bid;
      target.phase = Phase::kWaiting;
      Json bot = event("bot_bid");
      bot["subject"] = s;
      bot["bid"] = result.final_bid;
      log(bot);
    }
  }

  bool all_confirmed() const {
    return std::all_of(seats.begin(), seats.end(),
                       [](const Seat& s) { return s.final_bid.has_value(); });
  }

  void advance() {
    while (!finished && all_confirmed()) {
      close_period();
      if (period < config.periods) {
        open_period(period + 1);
      } else {
        finish();
      }
    }
  }

  void close_period() {
    const PeriodValues& values = schedule.at(period);
    const AuctionSpec spec = values.spec(config.alpha, config.gamma);
    const AuctionConstants net = constants(spec);
    for (const Pair& pair : pairs) {
      Seat& low = seat(pair.subject_low);
      Seat& high = seat(pair.subject_high);
      const Bid bid_low = *low.final_bid;
      const Bid bid_high = *high.final_bid;
      const Resolution resolution = resolve(spec, bid_low, bid_high);
      Outcome outcome = resolution.outcome;
      if (resolution.alternative &&
          !(rng.uniform01() < to_double(resolution.weight))) {
        outcome = *resolution.alternative;
      }
      PeriodRecord record{period, pair.pair_id, values, {}, outcome.winner,
                          outcome.transfer, outcome.winner == Role::kHigh, false};
      record.equilibrium_outcome =
          record.efficient && net.in_nash_range(outcome.transfer);
      for (Role role : kRoles) {
        const Seat& target = role == Role::kLow ? low : high;
        SubjectResult result{pair.subject(role), role, *target.final_bid,
                             target.revisions, {},
                             outcome.payoff(role) + values.item_a};
        for (const auto& entry : target.transcript) {
          if (entry.guess) result.guesses.push_back(*entry.guess);
        }
        record.subjects[role == Role::kLow ? 0 : 1] = std::move(result);
      }
      records.push_back(record);

      Json done = event("period_result");
      done["pair"] = pair.pair_id;
      done["subject_high"] = pair.subject_high;
      done["subject_low"] = pair.subject_low;
      done["bid_high"] = bid_high;
      done["bid_low"] = bid_low;
      done["winner"] = to_string(outcome.winner);
      done["transfer"] = format_rational(outcome.transfer);
      done["points_high"] = format_rational(record.of(Role::kHigh).points);
      done["points_low"] = format_rational(record.of(Role::kLow).points);
      done["efficient"] = record.efficient;
      done["equilibrium_outcome"] = record.equilibrium_outcome;
      log(done);

      for (Role role : kRoles) {
        Seat& target = role == Role::kLow ? low : high;
        const SubjectResult& own = record.of(role);
        Feedback feedback{period,       role,
                          own.bid,      record.of(opponent(role)).bid,
                          outcome.winner == role, outcome.transfer,
                          own.points};
        target.feedback = feedback;
        ++target.version;
        if (target.bot) target.bot->on_feedback(feedback);
      }
    }
  }

  void finish() {
    const int paid = static_cast<int>(
                         rng.below(static_cast<std::uint64_t>(config.periods))) + 1;
    Payment pay{paid,
                std::vector<Rational>(static_cast<std::size_t>(config.n_subjects)),
                {}};
    for (const PeriodRecord& record : records) {
      if (record.period != paid) continue;
      for (const SubjectResult& s : record.subjects) {
        pay.points[static_cast<std::size_t>(s.subject)] = s.points;
      }
    }
    Json cash = Json::array();
    for (const Rational& points : pay.points) {
      pay.cash.push_back(points * config.point_rate + config.show_up);
      cash.push_back(format_rational(pay.cash.back()));
    }
    Json paid_event = event("payment");
    paid_event["paid_period"] = paid;
    paid_event["cash"] = cash;
    log(paid_event);
    payment = std::move(pay);
    end_session();
  }

  void end_session() {
    finished = true;
    for (Seat& s : seats) {
      s.phase = Phase::kFinished;
      ++s.version;
    }
    Json end = event("session_end");
    end["valid"] = valid;
    log(end);
  }

  SessionConfig config;
  ValuationSchedule schedule;
  Rng rng;
  std::vector<Seat> seats;
  std::vector<Pair> pairs;
  int period = 0;
  bool started = false;
  bool finished = false;
  bool valid = true;
  std::vector<PeriodRecord> records;
  std::optional<Payment> payment;
  std::vector<std::string> lines;
};

SessionMachine::SessionMachine(SessionConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
SessionMachine::~SessionMachine() = default;
SessionMachine::SessionMachine(SessionMachine&&) noexcept = default;
SessionMachine& SessionMachine::operator=(SessionMachine&&) noexcept = default;

void SessionMachine::start() { impl_->start(); }

Shown SessionMachine::submit_bid(int subject, Bid bid, std::optional<Bid> guess) {
  auto& seat = impl_->external(subject, {Phase::kBidding});
  Shown shown = impl_->show(seat, bid, guess);
  seat.transcript.push_back(shown.entry);
  seat.phase = Phase::kReviewing;
  ++seat.version;
  Json event = impl_->event("submit_bid");
  event["subject"] = subject;
  event["bid"] = bid;
  event["guess"] = guess ? Json(*guess) : Json(nullptr);
  impl_->log(event);
  return shown;
}

Shown SessionMachine::hypothesize(int subject, Bid guess) {
  auto& seat = impl_->external(subject, {Phase::kReviewing});
  Shown shown = impl_->show(seat, seat.transcript.back().bid, guess);
  seat.transcript.push_back(shown.entry);
  ++seat.version;
  Json event = impl_->event("hypothesize");
  event["subject"] = subject;
  event["guess"] = guess;
  impl_->log(event);
  return shown;
}

void SessionMachine::confirm(int subject) {
  auto& seat = impl_->external(subject, {Phase::kReviewing});
  seat.final_bid = seat.transcript.back().bid;
  seat.phase = Phase::kWaiting;
  ++seat.version;
  Json event = impl_->event("confirm");
  event["subject"] = subject;
  event["bid"] = *seat.final_bid;
  impl_->log(event);
  impl_->advance();
}

void SessionMachine::revise(int subject) {
  auto& seat = impl_->external(subject, {Phase::kReviewing});
  ++seat.revisions;
  seat.phase = Phase::kBidding;
  ++seat.version;
  Json event = impl_->event("revise");
  event["subject"] = subject;
  impl_->log(event);
}

void SessionMachine::timeout(int subject) {
  auto& seat = impl_->external(subject, {Phase::kBidding, Phase::kReviewing});
  seat.final_bid = seat.transcript.empty() ? fallback_bid(seat.view)
                                           : seat.transcript.back().bid;
  seat.phase = Phase::kWaiting;
  ++seat.version;
  Json event = impl_->event("timeout");
  event["subject"] = subject;
  event["bid"] = *seat.final_bid;
  impl_->log(event);
  impl_->advance();
}

void SessionMachine::abort(std::string_view reason) {
  if (impl_->finished) return;
  impl_->valid = false;
  Json event = impl_->event("session_abort");
  event["reason"] = reason;
  impl_->log(event);
  impl_->end_session();
}

const SessionConfig& SessionMachine::config() const { return impl_->config; }
bool SessionMachine::started() const { return impl_->started; }
bool SessionMachine::finished() const { return impl_->finished; }
bool SessionMachine::valid() const { return impl_->valid; }
int SessionMachine::current_period() const { return impl_->period; }

SeatState SessionMachine::seat_state(int subject) const {
  const auto& seat = impl_->seat(subject);
  SeatState state{seat.phase, seat.view, seat.transcript, seat.feedback,
                  std::nullopt, std::nullopt, seat.version};
  if (impl_->payment) {
    state.paid_period = impl_->payment->paid_period;
    state.cash = impl_->payment->cash[static_cast<std::size_t>(subject)];
  }
  return state;
}

std::vector<int> SessionMachine::pending_seats() const {
  std::vector<int> out;
  if (!impl_->started || impl_->finished) return out;
  for (int s = 0; s < impl_->config.n_subjects; ++s) {
    const auto& seat = impl_->seats[static_cast<std::size_t>(s)];
    if (!seat.bot && !seat.final_bid) out.push_back(s);
  }
  return out;
}

const std::vector<PeriodRecord>& SessionMachine::records() const {
  return impl_->records;
}
const std::optional<Payment>& SessionMachine::payment() const {
  return impl_->payment;
}
const std::vector<std::string>& SessionMachine::event_log() const {
  return impl_->lines;
}

// ---------------------------------------------------------------- runners

namespace {

struct MachineSink {
  SessionMachine& machine;
  int subject;

  Shown bid(const BidEntry& entry) {
    return machine.submit_bid(subject, entry.bid, entry.guess);
  }
  Shown guess(Bid guess) { return machine.hypothesize(subject, guess); }
  void confirm() { machine.confirm(subject); }
  void revise() { machine.revise(subject); }
  void timeout() { machine.timeout(subject); }
};

SessionResult collect(const SessionMachine& machine, std::string reason) {
  return {machine.records(), machine.payment(), machine.event_log(),
          machine.valid(), std::move(reason)};
}

SessionConfig config_from_json(const Json& head) {
  SessionConfig config;
  config.session_id = head.at("session_id").get<std::string>();
  config.alpha = parse_rational(head.at("alpha").get<std::string>());
  config.gamma = parse_rational(head.at("gamma").get<std::string>());
  config.session_type = head.at("session_type").get<int>();
  config.n_subjects = head.at("n_subjects").get<int>();
  config.periods = head.at("periods").get<int>();
  config.rng_seed = head.at("rng_seed").get<std::uint64_t>();
  config.point_rate = parse_rational(head.at("point_rate").get<std::string>());
  config.show_up = parse_rational(head.at("show_up").get<std::string>());
  config.timeout_seconds = head.at("timeout_seconds").get<double>();
  for (const auto& seat : head.at("seats")) {
    const auto text = seat.get<std::string>();
    config.seats.push_back(text == "external" ? SeatAssignment{}
                                             : SeatAssignment{BotPolicy::parse(text)});
  }
  return config;
}

}  // namespace

SessionResult run_session(const SessionConfig& config,
                          std::span<Actor* const> actors) {
  config.validate();
  for (int s = 0; s < config.n_subjects; ++s) {
    if (config.is_bot(s)) continue;
    if (static_cast<std::size_t>(s) >= actors.size() ||
        actors[static_cast<std::size_t>(s)] == nullptr) {
      throw PreconditionError(fmt::format("seat {} has no actor", s));
    }
  }
  SessionMachine machine(config);
  machine.start();
  std::string reason;
  while (!machine.finished()) {
    const int period = machine.current_period();
    for (int subject : machine.pending_seats()) {
      Actor& actor = *actors[static_cast<std::size_t>(subject)];
      try {
        MachineSink sink{machine, subject};
        drive(actor, machine.seat_state(subject).view, sink, 10000);
      } catch (const std::exception& error) {
        reason = fmt::format("seat {}: {}", subject, error.what());
        machine.abort(reason);
        return collect(machine, reason);
      }
    }
    for (std::size_t s = 0; s < actors.size(); ++s) {
      if (actors[s] == nullptr || config.is_bot(static_cast<int>(s))) continue;
      const auto state = machine.seat_state(static_cast<int>(s));
      if (state.last_feedback && state.last_feedback->period == period) {
        actors[s]->on_feedback(*state.last_feedback);
      }
    }
  }
  return collect(machine, reason);
}

SessionResult replay_events(std::span<const std::string> event_log) {
  if (event_log.empty()) throw DataError("empty event log");
  Json head;
  try {
    head = Json::parse(event_log.front());
  } catch (const nlohmann::json::exception& error) {
    throw DataError(fmt::format("event log line 1: {}", error.what()));
  }
  if (head.value("event", "") != "session_start") {
    throw DataError("event log must begin with session_start");
  }
  SessionMachine machine(config_from_json(head));
  machine.start();
  std::string reason;
  for (std::size_t i = 1; i < event_log.size(); ++i) {
    Json event;
    try {
      event = Json::parse(event_log[i]);
    } catch (const nlohmann::json::exception& error) {
      throw DataError(fmt::format("event log line {}: {}", i + 1, error.what()));
    }
    const auto kind = event.at("event").get<std::string>();
    if (kind == "submit_bid") {
      const auto& guess = event.at("guess");
      machine.submit_bid(event.at("subject").get<int>(), event.at("bid").get<int>(),
                         guess.is_null() ? std::nullopt
                                         : std::optional<Bid>(guess.get<int>()));
    } else if (kind == "hypothesize") {
      machine.hypothesize(event.at("subject").get<int>(),
                          event.at("guess").get<int>());
    } else if (kind == "confirm") {
      machine.confirm(event.at("subject").get<int>());
    } else if (kind == "revise") {
      machine.revise(event.at("subject").get<int>());
    } else if (kind == "timeout") {
      machine.timeout(event.at("subject").get<int>());
    } else if (kind == "session_abort") {
      reason = event.at("reason").get<std::string>();
      machine.abort(reason);
    }
  }
  return collect(machine, reason);
}

void write_period_csv(std::ostream& out, const SessionConfig& config,
                      std::span<const PeriodRecord> records, bool header) {
  if (header) out << kPeriodCsvHeader << '\n';
  const std::string alpha = format_rational(config.alpha);
  for (const PeriodRecord& record : records) {
    for (Role role : {Role::kHigh, Role::kLow}) {
      const SubjectResult& own = record.of(role);
      const SubjectResult& other = record.of(opponent(role));
      out << fmt::format(
          "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
          config.session_id, config.session_type, alpha, record.period,
          record.pair_id, own.subject, to_string(role), record.values.item_a,
          record.values.item_b(role), record.values.item_b(opponent(role)),
          own.bid, own.revisions, other.bid, to_string(record.winner),
          format_rational(record.transfer), format_rational(own.points),
          record.efficient ? 1 : 0, record.equilibrium_outcome ? 1 : 0);
    }
  }
}

void write_event_log(std::ostream& out, std::span<const std::string> lines) {
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace alpha_auction::session
