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

#include "alpha_auction/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alpha_auction/errors.hpp"
#include "simplex.hpp"

namespace alpha_auction::equilibrium {
namespace {

std::vector<Bid> argmax(const std::vector<Rational>& values) {
  std::vector<Bid> out;
  if (values.empty()) return out;
  const Rational best = *std::max_element(values.begin(), values.end());
  for (std::size_t b = 0; b < values.size(); ++b) {
    if (values[b] == best) out.push_back(static_cast<Bid>(b));
  }
  return out;
}

std::vector<Bid> support_of(const std::vector<Rational>& dist) {
  std::vector<Bid> out;
  for (std::size_t b = 0; b < dist.size(); ++b) {
    if (dist[b] > 0) out.push_back(static_cast<Bid>(b));
  }
  return out;
}

// Which role is pure in the equilibrium family of an extreme auction.
Role pure_role(const AuctionSpec& spec) {
  return spec.kind() == AuctionKind::kWinnerBid ? Role::kHigh : Role::kLow;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

std::vector<Bid> best_response_set(const PayoffMatrix& matrix,
                                   std::span<const Rational> opponent) {
  return argmax(matrix.apply(opponent));
}

std::vector<Bid> best_response_set(const AuctionSpec& spec, Role role,
                                   std::span<const Rational> opponent) {
  validate_distribution(opponent, spec.num_bids());
  return best_response_set(PayoffMatrix(spec, role), opponent);
}

NashVerdict is_nash(const AuctionSpec& spec, const ExactProfile& profile,
                    const Rational& epsilon) {
  validate_profile(spec, profile);
  if (epsilon < 0) throw DomainError("epsilon must be non-negative");

  NashVerdict verdict;
  for (Role role : kRoles) {
    const PayoffMatrix matrix(spec, role);
    const auto values = matrix.apply(profile.of(opponent(role)));
    const Rational best = *std::max_element(values.begin(), values.end());
    const auto& own = profile.of(role);
    for (std::size_t b = 0; b < own.size(); ++b) {
      if (own[b] <= 0) continue;
      const Rational gap = best - values[b];
      if (gap > epsilon) verdict.violations.push_back({role, static_cast<Bid>(b), gap});
    }
  }
  if (!verdict.violations.empty()) return verdict;

  NashCertificate cert;
  cert.profile = profile;
  cert.epsilon = epsilon;
  cert.support_low = support_of(profile.low);
  cert.support_high = support_of(profile.high);
  if (cert.support_low.back() == cert.support_high.front()) {
    cert.payoff_determinant_bid = cert.support_low.back();
  }
  verdict.certificate = std::move(cert);
  return verdict;
}

std::vector<PureProfile> enumerate_pure_nash(const AuctionSpec& spec, int cap) {
  if (spec.bids.p_max() > cap) {
    throw SizeError("bid domain up to " + std::to_string(spec.bids.p_max()) +
                    " exceeds enumeration cap " + std::to_string(cap));
  }
  const PayoffMatrix low(spec, Role::kLow);
  const PayoffMatrix high(spec, Role::kHigh);
  const auto n = static_cast<Bid>(spec.num_bids());

  // Best attainable payoff against each pure opponent bid.
  std::vector<Rational> best_low(n), best_high(n);
  for (Bid r = 0; r < n; ++r) {
    best_low[r] = low.at(0, r);
    best_high[r] = high.at(0, r);
    for (Bid b = 1; b < n; ++b) {
      best_low[r] = std::max(best_low[r], low.at(b, r));
      best_high[r] = std::max(best_high[r], high.at(b, r));
    }
  }
  std::vector<PureProfile> out;
  for (Bid bl = 0; bl < n; ++bl) {
    for (Bid bh = 0; bh < n; ++bh) {
      if (low.at(bl, bh) == best_low[bh] && high.at(bh, bl) == best_high[bl]) {
        out.push_back({bl, bh});
      }
    }
  }
  return out;
}

std::string_view to_string(Strictness s) {
  switch (s) {
    case Strictness::kStrict:
      return "strict";
    case Strictness::kWeak:
      return "weak";
    case Strictness::kNotNash:
      return "not_nash";
  }
  return "unknown";
}

Strictness strictness(const AuctionSpec& spec, Bid bid_low, Bid bid_high) {
  if (!spec.bids.contains(bid_low) || !spec.bids.contains(bid_high)) {
    throw DomainError("bid outside the bid domain");
  }
  const auto n = spec.num_bids();
  const auto br_low = best_response_set(spec, Role::kLow, exact_point_mass(n, bid_high));
  const auto br_high = best_response_set(spec, Role::kHigh, exact_point_mass(n, bid_low));
  const bool low_ok = std::binary_search(br_low.begin(), br_low.end(), bid_low);
  const bool high_ok = std::binary_search(br_high.begin(), br_high.end(), bid_high);
  if (!low_ok || !high_ok) return Strictness::kNotNash;
  return br_low.size() == 1 && br_high.size() == 1 ? Strictness::kStrict
                                                  : Strictness::kWeak;
}

MixingBounds mixing_bounds(const AuctionSpec& spec, Bid p) {
  if (spec.kind() != AuctionKind::kWinnerBid) {
    throw UnsupportedAuctionError("mixing bounds are defined for the winner-bid auction");
  }
  const auto k = constants(spec);
  if (p < k.c_low || p > k.c_high) {
    throw DomainError("bid " + std::to_string(p) + " outside the Nash range");
  }
  const int tau = p - k.c_low;
  if (tau < 1) throw DomainError("mixing bounds need p - c_low >= 1");
  MixingBounds out{tau, Rational(1, 2 * k.equity_surplus - 2 * tau + 1),
                   Rational(1, std::min(4 * tau, tau + k.c_low + 1))};
  return out;
}

std::optional<EquilibriumDistance> distance_to_equilibria(
    const AuctionSpec& spec, const MixedProfile& profile, Bid bid) {
  validate_profile(spec, profile);
  if (!spec.bids.contains(bid)) throw DomainError("bid outside the bid domain");
  const std::size_t n = spec.num_bids();

  if (!spec.is_extreme()) {
    if (strictness(spec, bid, bid) == Strictness::kNotNash) return std::nullopt;
    EquilibriumDistance out{bid, 0.0, {point_mass(n, bid), point_mass(n, bid)}};
    out.distance = std::max(sup_distance(profile.low, out.nearest.low),
                            sup_distance(profile.high, out.nearest.high));
    return out;
  }
  if (spec.gamma != 1) {
    throw UnsupportedAuctionError("equilibrium sets of extreme auctions need gamma = 1");
  }

  const Role fixed = pure_role(spec);
  const Role mixed = opponent(fixed);
  const PayoffMatrix fixed_matrix(spec, fixed);
  const PayoffMatrix mixed_matrix(spec, mixed);

  // The mixed role may only use best responses to the pure bid.
  const auto candidates = best_response_set(mixed_matrix, exact_point_mass(n, bid));
  std::vector<bool> allowed(n, false);
  for (Bid b : candidates) allowed[static_cast<std::size_t>(b)] = true;

  const auto& target_fixed = profile.of(fixed);
  const auto& target_mixed = profile.of(mixed);
  double floor = sup_distance(target_fixed, point_mass(n, bid));
  for (std::size_t b = 0; b < n; ++b) {
    if (!allowed[b]) floor = std::max(floor, target_mixed[b]);
  }

  // Variables: x_b for each candidate, then z. Minimize z.
  const std::size_t k = candidates.size();
  detail::LinearProgram lp;
  lp.num_vars = k + 1;
  lp.objective.assign(k + 1, 0.0);
  lp.objective[k] = 1.0;
  using Sense = detail::LinearProgram::Sense;
  for (std::size_t j = 0; j < k; ++j) {
    const double s = target_mixed[static_cast<std::size_t>(candidates[j])];
    std::vector<double> up(k + 1, 0.0), down(k + 1, 0.0);
    up[j] = 1.0;
    up[k] = -1.0;
    down[j] = -1.0;
    down[k] = -1.0;
    lp.rows.push_back({std::move(up), s, Sense::kLessEqual});
    lp.rows.push_back({std::move(down), -s, Sense::kLessEqual});
  }
  {
    std::vector<double> total(k + 1, 1.0);
    total[k] = 0.0;
    lp.rows.push_back({std::move(total), 1.0, Sense::kEqual});
  }
  // The pure role has no profitable deviation.
  const auto fixed_values = fixed_matrix.to_double();
  const auto value = [&](std::size_t own, std::size_t other) {
    return fixed_values[own * n + other];
  };
  for (std::size_t d = 0; d < n; ++d) {
    if (d == static_cast<std::size_t>(bid)) continue;
    std::vector<double> row(k + 1, 0.0);
    bool nonzero = false;
    for (std::size_t j = 0; j < k; ++j) {
      const auto b = static_cast<std::size_t>(candidates[j]);
      row[j] = value(d, b) - value(static_cast<std::size_t>(bid), b);
      nonzero = nonzero || row[j] > 0.0;
    }
    if (nonzero) lp.rows.push_back({std::move(row), 0.0, Sense::kLessEqual});
  }

  const auto result = detail::solve_lp(lp);
  if (result.status == detail::LpResult::Status::kInfeasible) return std::nullopt;
  if (result.status != detail::LpResult::Status::kOptimal) {
    throw ConvergenceError("equilibrium distance program did not terminate", 0.0, 0.0, 0);
  }

  EquilibriumDistance out;
  out.payoff_determinant_bid = bid;
  out.nearest.of(fixed) = point_mass(n, bid);
  out.nearest.of(mixed).assign(n, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double x = std::max(0.0, result.x[j]);
    out.nearest.of(mixed)[static_cast<std::size_t>(candidates[j])] = x;
    total += x;
  }
  for (double& x : out.nearest.of(mixed)) x /= total;
  out.distance = std::max(floor, sup_distance(target_mixed, out.nearest.of(mixed)));
  return out;
}

std::optional<EquilibriumDistance> nearest_equilibrium(const AuctionSpec& spec,
                                                       const MixedProfile& profile) {
  validate_profile(spec, profile);
  const auto k = constants(spec);
  const std::size_t n = spec.num_bids();
  const Role fixed = spec.is_extreme() ? pure_role(spec) : Role::kHigh;

  // Cheap lower bound: the pure role must move all its mass onto p.
  std::vector<std::pair<double, Bid>> order;
  for (Bid p = k.c_low; p <= k.c_high; ++p) {
    double bound = sup_distance(profile.of(fixed), point_mass(n, p));
    if (!spec.is_extreme()) {
      bound = std::max(bound, sup_distance(profile.of(opponent(fixed)), point_mass(n, p)));
    }
    order.emplace_back(bound, p);
  }
  std::sort(order.begin(), order.end());

  std::optional<EquilibriumDistance> best;
  for (const auto& [bound, p] : order) {
    if (best && bound >= best->distance) break;
    auto candidate = distance_to_equilibria(spec, profile, p);
    if (candidate && (!best || candidate->distance < best->distance)) {
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace alpha_auction::equilibrium
