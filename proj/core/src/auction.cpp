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

#include "alpha_auction/auction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <type_traits>

#include "alpha_auction/errors.hpp"

namespace alpha_auction {

std::string_view to_string(Role role) {
  return role == Role::kLow ? "LV" : "HV";
}

Role parse_role(std::string_view text) {
  if (text == "LV" || text == "lv") return Role::kLow;
  if (text == "HV" || text == "hv") return Role::kHigh;
  throw DomainError("unknown role '" + std::string(text) + "'");
}

ValuationPair::ValuationPair(int low, int high) : low_(low), high_(high) {
  if (low <= 0 || high <= 0) throw DomainError("valuations must be positive");
  if (low % 2 != 0 || high % 2 != 0) throw DomainError("valuations must be even");
  if (low >= high) throw DomainError("requires v_low < v_high");
}

BidDomain::BidDomain(int p_max) : p_max_(p_max) {
  if (p_max < 0) throw DomainError("p_max must be non-negative");
}

AuctionSpec::AuctionSpec(Rational alpha_in, Rational gamma_in,
                         ValuationPair valuations_in, BidDomain bids_in)
    : alpha(alpha_in),
      gamma(gamma_in),
      valuations(valuations_in),
      bids(bids_in) {
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must lie in [0, 1]");
  if (gamma < 0 || gamma > 1) throw DomainError("gamma must lie in [0, 1]");
  if (bids.p_max() < valuations.net(Role::kHigh)) {
    throw DomainError("bid domain must reach v_high / 2");
  }
}

AuctionSpec AuctionSpec::winner_bid(ValuationPair v, BidDomain bids) {
  return AuctionSpec(Rational(1), Rational(1), v, bids);
}
AuctionSpec AuctionSpec::average_bid(ValuationPair v, BidDomain bids) {
  return AuctionSpec(Rational(1, 2), Rational(1), v, bids);
}
AuctionSpec AuctionSpec::loser_bid(ValuationPair v, BidDomain bids) {
  return AuctionSpec(Rational(0), Rational(1), v, bids);
}

AuctionKind AuctionSpec::kind() const {
  if (alpha == 1) return AuctionKind::kWinnerBid;
  if (alpha == 0) return AuctionKind::kLoserBid;
  return AuctionKind::kInterior;
}

Rational parse_alpha(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "wb") return Rational(1);
  if (lower == "ab") return Rational(1, 2);
  if (lower == "lb") return Rational(0);
  Rational alpha = parse_rational(lower);
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must lie in [0, 1]");
  return alpha;
}

std::string auction_label(const Rational& alpha) {
  if (alpha == 1) return "WB";
  if (alpha == Rational(1, 2)) return "AB";
  if (alpha == 0) return "LB";
  return "alpha=" + format_rational(alpha);
}

Rational Resolution::expected_payoff(Role role) const {
  if (!alternative) return outcome.payoff(role);
  return weight * outcome.payoff(role) + (1 - weight) * alternative->payoff(role);
}

Rational Resolution::efficient_probability() const {
  if (!alternative) return outcome.winner == Role::kHigh ? Rational(1) : Rational(0);
  return weight;
}

namespace {

Outcome settle(const AuctionSpec& spec, Role winner, Bid winner_bid,
               Bid loser_bid) {
  Rational transfer = spec.alpha * winner_bid + (1 - spec.alpha) * loser_bid;
  Rational winner_payoff = spec.valuations.of(winner) - transfer;
  Outcome out{winner, transfer, Rational(0), Rational(0)};
  if (winner == Role::kLow) {
    out.payoff_low = winner_payoff;
    out.payoff_high = transfer;
  } else {
    out.payoff_high = winner_payoff;
    out.payoff_low = transfer;
  }
  return out;
}

void check_bid(const AuctionSpec& spec, Bid bid) {
  if (!spec.bids.contains(bid)) {
    throw DomainError("bid " + std::to_string(bid) + " outside {0,...," +
                      std::to_string(spec.bids.p_max()) + "}");
  }
}

}  // namespace

Resolution resolve(const AuctionSpec& spec, Bid bid_low, Bid bid_high) {
  check_bid(spec, bid_low);
  check_bid(spec, bid_high);
  if (bid_high > bid_low) {
    return Resolution{settle(spec, Role::kHigh, bid_high, bid_low), std::nullopt,
                      Rational(1)};
  }
  if (bid_low > bid_high) {
    return Resolution{settle(spec, Role::kLow, bid_low, bid_high), std::nullopt,
                      Rational(1)};
  }
  Outcome high_wins = settle(spec, Role::kHigh, bid_high, bid_low);
  if (spec.gamma == 1) return Resolution{high_wins, std::nullopt, Rational(1)};
  Outcome low_wins = settle(spec, Role::kLow, bid_low, bid_high);
  if (spec.gamma == 0) return Resolution{low_wins, std::nullopt, Rational(1)};
  return Resolution{high_wins, low_wins, spec.gamma};
}

std::vector<double> uniform_distribution(std::size_t size) {
  return std::vector<double>(size, 1.0 / static_cast<double>(size));
}

std::vector<double> point_mass(std::size_t size, Bid bid) {
  if (bid < 0 || static_cast<std::size_t>(bid) >= size) {
    throw DomainError("point mass outside domain");
  }
  std::vector<double> dist(size, 0.0);
  dist[static_cast<std::size_t>(bid)] = 1.0;
  return dist;
}

std::vector<Rational> exact_uniform(std::size_t size) {
  return std::vector<Rational>(size, Rational(1, static_cast<std::int64_t>(size)));
}

std::vector<Rational> exact_point_mass(std::size_t size, Bid bid) {
  if (bid < 0 || static_cast<std::size_t>(bid) >= size) {
    throw DomainError("point mass outside domain");
  }
  std::vector<Rational> dist(size, Rational(0));
  dist[static_cast<std::size_t>(bid)] = 1;
  return dist;
}

MixedProfile uniform_profile(const AuctionSpec& spec) {
  return {uniform_distribution(spec.num_bids()), uniform_distribution(spec.num_bids())};
}

ExactProfile exact_pure_profile(const AuctionSpec& spec, Bid bid_low,
                                Bid bid_high) {
  return {exact_point_mass(spec.num_bids(), bid_low),
          exact_point_mass(spec.num_bids(), bid_high)};
}

MixedProfile to_mixed(const ExactProfile& profile) {
  MixedProfile out;
  for (Role role : kRoles) {
    const auto& src = profile.of(role);
    auto& dst = out.of(role);
    dst.reserve(src.size());
    for (const auto& p : src) dst.push_back(to_double(p));
  }
  return out;
}

void validate_distribution(std::span<const double> dist, std::size_t size) {
  if (dist.size() != size) throw DomainError("distribution length does not match bid domain");
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw DomainError("negative or NaN probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("probabilities do not sum to one");
}

void validate_distribution(std::span<const Rational> dist, std::size_t size) {
  if (dist.size() != size) throw DomainError("distribution length does not match bid domain");
  Rational total(0);
  for (const auto& p : dist) {
    if (p < 0) throw DomainError("negative probability");
    total += p;
  }
  if (total != 1) throw DomainError("probabilities do not sum to one");
}

void validate_profile(const AuctionSpec& spec, const MixedProfile& profile) {
  validate_distribution(profile.low, spec.num_bids());
  validate_distribution(profile.high, spec.num_bids());
}

void validate_profile(const AuctionSpec& spec, const ExactProfile& profile) {
  validate_distribution(profile.low, spec.num_bids());
  validate_distribution(profile.high, spec.num_bids());
}

namespace {

template <class T>
T expected_payoff_impl(const AuctionSpec& spec, Role role, Bid bid,
                       std::span<const T> opponent) {
  if (opponent.size() != spec.num_bids()) {
    throw DomainError("opponent distribution length does not match bid domain");
  }
  check_bid(spec, bid);
  T total(0);
  for (std::size_t r = 0; r < opponent.size(); ++r) {
    if (opponent[r] == T(0)) continue;
    Bid other = static_cast<Bid>(r);
    Resolution res = role == Role::kLow ? resolve(spec, bid, other)
                                        : resolve(spec, other, bid);
    Rational payoff = res.expected_payoff(role);
    if constexpr (std::is_same_v<T, double>) {
      total += opponent[r] * to_double(payoff);
    } else {
      total += opponent[r] * payoff;
    }
  }
  return total;
}

}  // namespace

Rational expected_payoff(const AuctionSpec& spec, Role role, Bid bid,
                         std::span<const Rational> opponent) {
  return expected_payoff_impl<Rational>(spec, role, bid, opponent);
}

double expected_payoff(const AuctionSpec& spec, Role role, Bid bid,
                       std::span<const double> opponent) {
  return expected_payoff_impl<double>(spec, role, bid, opponent);
}

PayoffMatrix::PayoffMatrix(const AuctionSpec& spec, Role role)
    : role_(role), size_(spec.num_bids()) {
  entries_.reserve(size_ * size_);
  values_.reserve(size_ * size_);
  for (std::size_t own = 0; own < size_; ++own) {
    for (std::size_t other = 0; other < size_; ++other) {
      Bid b = static_cast<Bid>(own);
      Bid r = static_cast<Bid>(other);
      Resolution res = role == Role::kLow ? resolve(spec, b, r) : resolve(spec, r, b);
      entries_.push_back(res.expected_payoff(role));
      values_.push_back(alpha_auction::to_double(entries_.back()));
    }
  }
}

Rational PayoffMatrix::row_dot(Bid own, std::span<const Rational> opponent) const {
  if (opponent.size() != size_) throw DomainError("opponent distribution length mismatch");
  Rational total(0);
  const std::size_t base = static_cast<std::size_t>(own) * size_;
  for (std::size_t r = 0; r < size_; ++r) {
    if (opponent[r] != 0) total += entries_[base + r] * opponent[r];
  }
  return total;
}

double PayoffMatrix::row_dot(Bid own, std::span<const double> opponent) const {
  if (opponent.size() != size_) throw DomainError("opponent distribution length mismatch");
  double total = 0.0;
  const double* row = values_.data() + static_cast<std::size_t>(own) * size_;
  for (std::size_t r = 0; r < size_; ++r) total += row[r] * opponent[r];
  return total;
}

std::vector<Rational> PayoffMatrix::apply(std::span<const Rational> opponent) const {
  std::vector<Rational> out(size_);
  for (std::size_t b = 0; b < size_; ++b) out[b] = row_dot(static_cast<Bid>(b), opponent);
  return out;
}

std::vector<double> PayoffMatrix::apply(std::span<const double> opponent) const {
  std::vector<double> out(size_);
  for (std::size_t b = 0; b < size_; ++b) out[b] = row_dot(static_cast<Bid>(b), opponent);
  return out;
}

std::vector<double> PayoffMatrix::to_double() const { return values_; }

PayoffMatrix payoff_matrix(const AuctionSpec& spec, Role role) {
  return PayoffMatrix(spec, role);
}

std::vector<Bid> AuctionConstants::nash_range() const {
  std::vector<Bid> out;
  for (Bid p = c_low; p <= c_high; ++p) out.push_back(p);
  return out;
}

AuctionConstants constants(const AuctionSpec& spec) {
  const int cl = spec.valuations.net(Role::kLow);
  const int ch = spec.valuations.net(Role::kHigh);
  return AuctionConstants{cl, ch, ch - cl, cl, ch};
}

double mean_bid(std::span<const double> dist) {
  double total = 0.0;
  for (std::size_t b = 0; b < dist.size(); ++b) total += static_cast<double>(b) * dist[b];
  return total;
}

Rational mean_bid(std::span<const Rational> dist) {
  Rational total(0);
  for (std::size_t b = 0; b < dist.size(); ++b) {
    total += static_cast<std::int64_t>(b) * dist[b];
  }
  return total;
}

}  // namespace alpha_auction
