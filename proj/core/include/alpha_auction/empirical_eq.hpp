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

#ifndef ALPHA_AUCTION_EMPIRICAL_EQ_HPP_
#define ALPHA_AUCTION_EMPIRICAL_EQ_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alpha_auction/auction.hpp"
#include "alpha_auction/equilibrium.hpp"
#include "alpha_auction/rational.hpp"

namespace alpha_auction::empirical {

inline constexpr double kDefaultTolProb = 1e-9;
inline constexpr double kDefaultTolPayoff = 0.0;

struct MonotonicityViolation {
  Role role;
  Bid bid_a;
  Bid bid_b;
  double prob_a;
  double prob_b;
  double payoff_a;
  double payoff_b;
};

struct MonotonicityReport {
  bool ok = true;
  std::vector<MonotonicityViolation> violations;
  double tol_prob = kDefaultTolProb;
  double tol_payoff = kDefaultTolPayoff;
};

// A pair (a, b) violates when prob_a > prob_b + tol_prob while
// payoff_a <= payoff_b + tol_payoff.
MonotonicityReport is_weakly_payoff_monotone(
    const AuctionSpec& spec, const MixedProfile& profile,
    double tol_prob = kDefaultTolProb, double tol_payoff = kDefaultTolPayoff);

// Same check for one role given its probabilities and expected payoffs.
std::vector<MonotonicityViolation> monotonicity_violations(
    Role role, std::span<const double> probs, std::span<const double> payoffs,
    double tol_prob = kDefaultTolProb, double tol_payoff = kDefaultTolPayoff);

// Selects the loser-bid cutoff. kVerbatim: max{2(p-c_l)/3 - c_h, ES/3} + 1.
// kMirror: max{2(p-c_l)/3 - (p-c_h), ES/3} + 1, the reflection of the
// winner-bid cutoff under b -> p_max - b with roles swapped.
enum class CutoffVariant : std::uint8_t { kVerbatim, kMirror };

// Winner-bid: max{2c_h/3 - c_l, ES/3} + 1. Throws UnsupportedAuctionError for
// interior alpha.
Rational t_value(AuctionKind auction, const ValuationPair& valuations,
                 const BidDomain& bids,
                 CutoffVariant variant = CutoffVariant::kVerbatim);

// Interval of reals with optional (infinite) ends.
struct Interval {
  std::optional<Rational> low;
  std::optional<Rational> high;
  bool low_open = true;
  bool high_open = true;

  bool contains(double x) const;
  bool contains(const Rational& x) const;
  std::string to_string() const;
};

struct BiasWindow {
  AuctionKind auction;
  CutoffVariant variant;
  Rational t_value;
  // Expected-bid bound that only applies under a valuation condition
  // (winner-bid: low partner below c_l + 1; loser-bid: high partner at least
  // c_h - 1).
  Role conditional_role;
  bool conditional_applies;
  Interval conditional_window;
  // Two-sided expected-bid window (winner-bid: high partner; loser-bid: low).
  Role window_role;
  Interval expected_bid_window;
  // Payoff cap on the favoured side and floor on the other.
  Role capped_role;
  Rational payoff_cap;
  Role floored_role;
  Rational payoff_floor;
  // Winning bids of equilibria that weakly monotone play can approach.
  Interval admissible_segment;
};

BiasWindow bias_window(AuctionKind auction, const ValuationPair& valuations,
                       const BidDomain& bids,
                       CutoffVariant variant = CutoffVariant::kVerbatim);
BiasWindow bias_window(const AuctionSpec& spec,
                       CutoffVariant variant = CutoffVariant::kVerbatim);

struct StatementCheck {
  int statement;    // 1..4
  bool applicable;  // false when the statement's hypothesis fails
  bool holds;       // true whenever not applicable
  std::string detail;
};

struct SequenceStep {
  std::size_t index;
  double distance_to_target;
  std::array<StatementCheck, 4> statements;
  bool all_hold() const;
};

struct SequenceReport {
  std::vector<SequenceStep> steps;
  // First index from which every later step passes every statement.
  std::optional<std::size_t> tail_start;
};

// Evaluates the four bias statements for each member of a weakly monotone
// sequence approaching `target`. Throws PreconditionError naming the index
// when a member is not weakly payoff monotone or the distance to the target
// increases. Interior auctions pass vacuously.
SequenceReport check_sequence(const AuctionSpec& spec,
                              std::span<const MixedProfile> sequence,
                              const equilibrium::NashCertificate& target,
                              CutoffVariant variant = CutoffVariant::kVerbatim,
                              double tol_prob = kDefaultTolProb,
                              double tol_payoff = kDefaultTolPayoff);

// Statements 1-3 for a single profile; statement 4 needs a target.
std::array<StatementCheck, 3> bias_statements(
    const AuctionSpec& spec, const MixedProfile& profile,
    CutoffVariant variant = CutoffVariant::kVerbatim);

struct PathPoint {
  double lambda;
  double distance;  // to the nearest equilibrium; infinity when none exists
  std::optional<Bid> nearest_p;
  bool monotone;
  std::array<StatementCheck, 3> statements;
  double mean_bid_low;
  double mean_bid_high;

  bool statements_hold() const;
};

struct PathReport {
  std::vector<PathPoint> points;
  double threshold;
  // First point within `threshold` of an equilibrium.
  std::optional<std::size_t> tail_start;
  // Statements 1-3 hold at the tail start and every later point.
  bool tail_holds = false;
};

// Evaluates a path of profiles (e.g. a QRE continuation) against the
// equilibrium set and the bias statements.
PathReport check_path(const AuctionSpec& spec, std::span<const double> lambdas,
                      std::span<const MixedProfile> profiles, double threshold = 0.05,
                      CutoffVariant variant = CutoffVariant::kVerbatim);

struct ProbeOptions {
  std::uint64_t seed = 0x5eed;
  std::int64_t budget = 100000;  // distance evaluations
  double step = 0.25;            // largest fraction moved per proposal
  int max_p = 64;
};

struct ProbeReport {
  Bid target_p;
  std::uint64_t seed;
  std::int64_t evaluations;
  double distance;  // sup norm to the equilibrium set with winning bid target_p
  bool monotone;
  MixedProfile best;
};

// Randomized hill climbing over weakly payoff monotone profiles toward the
// Nash equilibria with payoff-determinant bid target_p. Best effort: the
// returned distance is an upper bound on the true infimum.
ProbeReport exclusion_probe(const AuctionSpec& spec, Bid target_p,
                            const ProbeOptions& options = {});

// Line-delimited text records, one per violation or statement check.
void write_report(std::ostream& out, const MonotonicityReport& report);
void write_report(std::ostream& out, const SequenceReport& report);
void write_report(std::ostream& out, const ProbeReport& report);
void write_report(std::ostream& out, const PathReport& report);

std::string_view to_string(CutoffVariant variant);

}  // namespace alpha_auction::empirical

#endif  // ALPHA_AUCTION_EMPIRICAL_EQ_HPP_
