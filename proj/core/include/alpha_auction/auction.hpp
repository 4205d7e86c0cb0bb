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

#ifndef ALPHA_AUCTION_AUCTION_HPP_
#define ALPHA_AUCTION_AUCTION_HPP_

// The alpha-auction game for two partners with complete information: the
// higher bidder receives the contested object and pays
// alpha * (winner bid) + (1 - alpha) * (loser bid) to the other partner.
// On equal bids the high-valuation partner receives the object with
// probability gamma.
//
// All quantities are in net (reduced) points: v_i is the partner's value of
// the contested object net of the value of the alternative item.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alpha_auction/rational.hpp"

namespace alpha_auction {

using Bid = int;

enum class Role : std::uint8_t { kLow, kHigh };

inline constexpr Role kRoles[] = {Role::kLow, Role::kHigh};

constexpr Role opponent(Role role) {
  return role == Role::kLow ? Role::kHigh : Role::kLow;
}

// "LV" / "HV".
std::string_view to_string(Role role);
Role parse_role(std::string_view text);

class ValuationPair {
 public:
  // Both values must be even, positive and low < high.
  ValuationPair(int low, int high);

  int low() const { return low_; }
  int high() const { return high_; }
  int of(Role role) const { return role == Role::kLow ? low_ : high_; }

  // Net valuation c_i = v_i / 2: the transfer at which partner i is
  // indifferent between winning and losing.
  int net(Role role) const { return of(role) / 2; }

  friend bool operator==(const ValuationPair&, const ValuationPair&) = default;

 private:
  int low_;
  int high_;
};

// Contiguous integer bids {0, ..., p_max}.
class BidDomain {
 public:
  explicit BidDomain(int p_max);

  int p_max() const { return p_max_; }
  std::size_t size() const { return static_cast<std::size_t>(p_max_) + 1; }
  bool contains(Bid bid) const { return bid >= 0 && bid <= p_max_; }

  friend bool operator==(const BidDomain&, const BidDomain&) = default;

 private:
  int p_max_;
};

enum class AuctionKind : std::uint8_t { kWinnerBid, kLoserBid, kInterior };

struct AuctionSpec {
  // Validates 0 <= alpha, gamma <= 1 and p_max >= v_high / 2.
  AuctionSpec(Rational alpha, Rational gamma, ValuationPair valuations,
              BidDomain bids);

  static AuctionSpec winner_bid(ValuationPair v, BidDomain bids);
  static AuctionSpec average_bid(ValuationPair v, BidDomain bids);
  static AuctionSpec loser_bid(ValuationPair v, BidDomain bids);

  AuctionKind kind() const;
  bool is_extreme() const { return kind() != AuctionKind::kInterior; }
  std::size_t num_bids() const { return bids.size(); }

  Rational alpha;
  Rational gamma;
  ValuationPair valuations;
  BidDomain bids;
};

// "wb", "ab", "lb" (case-insensitive) or a rational alpha such as "0.25".
Rational parse_alpha(std::string_view text);
// "WB" / "AB" / "LB", or "alpha=<value>" for other interior prices.
std::string auction_label(const Rational& alpha);

struct Outcome {
  Role winner;
  Rational transfer;
  Rational payoff_low;
  Rational payoff_high;

  const Rational& payoff(Role role) const {
    return role == Role::kLow ? payoff_low : payoff_high;
  }
};

// Result of one bid pair. With a tie and 0 < gamma < 1 the allocation is a
// lottery: `outcome` (the high-valuation partner wins) has probability
// `weight` and `alternative` (the low-valuation partner wins) has the rest.
struct Resolution {
  Outcome outcome;
  std::optional<Outcome> alternative;
  Rational weight{1};

  bool deterministic() const { return !alternative.has_value(); }
  Rational expected_payoff(Role role) const;
  // Probability that the high-valuation partner receives the object.
  Rational efficient_probability() const;
};

Resolution resolve(const AuctionSpec& spec, Bid bid_low, Bid bid_high);

// Bid-indexed probability vectors for both roles.
template <class T>
struct BasicProfile {
  std::vector<T> low;
  std::vector<T> high;

  const std::vector<T>& of(Role role) const {
    return role == Role::kLow ? low : high;
  }
  std::vector<T>& of(Role role) { return role == Role::kLow ? low : high; }
};

using MixedProfile = BasicProfile<double>;
using ExactProfile = BasicProfile<Rational>;

std::vector<double> uniform_distribution(std::size_t size);
std::vector<double> point_mass(std::size_t size, Bid bid);
std::vector<Rational> exact_uniform(std::size_t size);
std::vector<Rational> exact_point_mass(std::size_t size, Bid bid);

MixedProfile uniform_profile(const AuctionSpec& spec);
ExactProfile exact_pure_profile(const AuctionSpec& spec, Bid bid_low,
                                Bid bid_high);
MixedProfile to_mixed(const ExactProfile& profile);

// Throws DomainError unless `dist` has `size` non-negative entries summing to
// one (within 1e-12 for doubles, exactly for rationals).
void validate_distribution(std::span<const double> dist, std::size_t size);
void validate_distribution(std::span<const Rational> dist, std::size_t size);
void validate_profile(const AuctionSpec& spec, const MixedProfile& profile);
void validate_profile(const AuctionSpec& spec, const ExactProfile& profile);

// Expected payoff of `role` bidding `bid` against the opponent distribution.
Rational expected_payoff(const AuctionSpec& spec, Role role, Bid bid,
                         std::span<const Rational> opponent);
double expected_payoff(const AuctionSpec& spec, Role role, Bid bid,
                       std::span<const double> opponent);

// Payoff of `role` for every (own bid, opponent bid) pair, ties weighted by
// gamma. Row-major, (p_max + 1) x (p_max + 1).
class PayoffMatrix {
 public:
  PayoffMatrix(const AuctionSpec& spec, Role role);

  Role role() const { return role_; }
  std::size_t size() const { return size_; }
  const Rational& at(Bid own, Bid other) const {
    return entries_[static_cast<std::size_t>(own) * size_ +
                    static_cast<std::size_t>(other)];
  }
  Rational row_dot(Bid own, std::span<const Rational> opponent) const;
  double row_dot(Bid own, std::span<const double> opponent) const;
  // Payoff of every own bid against `opponent`.
  std::vector<Rational> apply(std::span<const Rational> opponent) const;
  std::vector<double> apply(std::span<const double> opponent) const;
  std::vector<double> to_double() const;

 private:
  Role role_;
  std::size_t size_;
  std::vector<Rational> entries_;
  std::vector<double> values_;
};

PayoffMatrix payoff_matrix(const AuctionSpec& spec, Role role);

struct AuctionConstants {
  int c_low;
  int c_high;
  int equity_surplus;  // c_high - c_low
  int maximin_low;     // payoff guaranteed by bidding c_low
  int maximin_high;

  int net(Role role) const { return role == Role::kLow ? c_low : c_high; }
  // The Nash range {c_low, ..., c_high}.
  std::vector<Bid> nash_range() const;
  bool in_nash_range(const Rational& transfer) const {
    return transfer >= c_low && transfer <= c_high;
  }
};

AuctionConstants constants(const AuctionSpec& spec);

// Expected bid under a distribution.
double mean_bid(std::span<const double> dist);
Rational mean_bid(std::span<const Rational> dist);

}  // namespace alpha_auction

#endif  // ALPHA_AUCTION_AUCTION_HPP_
