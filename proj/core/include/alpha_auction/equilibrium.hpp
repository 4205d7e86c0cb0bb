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

#ifndef ALPHA_AUCTION_EQUILIBRIUM_HPP_
#define ALPHA_AUCTION_EQUILIBRIUM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alpha_auction/auction.hpp"
#include "alpha_auction/rational.hpp"

namespace alpha_auction::equilibrium {

inline constexpr int kDefaultEnumerationCap = 64;

// Argmax of expected payoff over the whole bid domain, ascending.
std::vector<Bid> best_response_set(const AuctionSpec& spec, Role role,
                                   std::span<const Rational> opponent);
std::vector<Bid> best_response_set(const PayoffMatrix& matrix,
                                   std::span<const Rational> opponent);

struct Violation {
  Role role;
  Bid bid;
  Rational gap;  // best-response value minus payoff of `bid`
};

struct NashCertificate {
  ExactProfile profile;
  Rational epsilon;
  // Set when the supports are separated by a common bid p: every low bid is
  // <= p, every high bid is >= p and p is in both supports.
  std::optional<Bid> payoff_determinant_bid;
  std::vector<Bid> support_low;
  std::vector<Bid> support_high;

  const std::vector<Bid>& support(Role role) const {
    return role == Role::kLow ? support_low : support_high;
  }
};

struct NashVerdict {
  std::optional<NashCertificate> certificate;
  std::vector<Violation> violations;

  bool is_nash() const { return certificate.has_value(); }
  explicit operator bool() const { return is_nash(); }
};

// Every supported bid must be within `epsilon` of the best-response value.
NashVerdict is_nash(const AuctionSpec& spec, const ExactProfile& profile,
                    const Rational& epsilon = Rational(0));

struct PureProfile {
  Bid low;
  Bid high;

  friend bool operator==(const PureProfile&, const PureProfile&) = default;
  friend auto operator<=>(const PureProfile&, const PureProfile&) = default;
};

// All pure Nash equilibria, sorted. Throws SizeError if p_max > cap.
std::vector<PureProfile> enumerate_pure_nash(const AuctionSpec& spec,
                                             int cap = kDefaultEnumerationCap);

enum class Strictness : std::uint8_t { kStrict, kWeak, kNotNash };

std::string_view to_string(Strictness s);

Strictness strictness(const AuctionSpec& spec, Bid bid_low, Bid bid_high);

struct MixingBounds {
  int tau;  // p - c_low
  Rational lower;
  Rational upper;

  bool infeasible() const { return lower > upper; }
};

// Winner-bid auctions only. Throws DomainError if p is outside the Nash range
// or p - c_low < 1, UnsupportedAuctionError for alpha != 1.
MixingBounds mixing_bounds(const AuctionSpec& spec, Bid p);

struct EquilibriumDistance {
  Bid payoff_determinant_bid;
  double distance;  // sup norm over both roles
  MixedProfile nearest;
};

// Sup-norm distance from `profile` to the set of Nash equilibria with
// payoff-determinant bid `bid`. In extreme-price auctions that set is a
// polytope (one role pure at `bid`, the other mixing over its best responses)
// and the distance is found by linear programming; interior auctions use the
// pure profile (bid, bid). Returns nullopt when the set is empty. Extreme
// auctions require gamma = 1.
std::optional<EquilibriumDistance> distance_to_equilibria(
    const AuctionSpec& spec, const MixedProfile& profile, Bid bid);

// Minimum of distance_to_equilibria over the Nash range.
std::optional<EquilibriumDistance> nearest_equilibrium(
    const AuctionSpec& spec, const MixedProfile& profile);

}  // namespace alpha_auction::equilibrium

#endif  // ALPHA_AUCTION_EQUILIBRIUM_HPP_
