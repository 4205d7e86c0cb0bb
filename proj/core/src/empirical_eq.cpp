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

#include "alpha_auction/empirical_eq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::empirical {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_distance(const MixedProfile& a, const MixedProfile& b) {
  double d = 0.0;
  for (Role role : kRoles) {
    const auto& x = a.of(role);
    const auto& y = b.of(role);
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::fabs(x[i] - y[i]));
  }
  return d;
}

double expected_payoff_of(const AuctionSpec& spec, const MixedProfile& profile, Role role) {
  const auto values = PayoffMatrix(spec, role).apply(std::span<const double>(profile.of(opponent(role))));
  double total = 0.0;
  const auto& own = profile.of(role);
  for (std::size_t b = 0; b < own.size(); ++b) total += own[b] * values[b];
  return total;
}

Interval open_interval(std::optional<Rational> low, std::optional<Rational> high) {
  return Interval{std::move(low), std::move(high), true, true};
}

std::string fmt_double(double x) { return fmt::format("{:.10g}", x); }

}  // namespace

std::vector<MonotonicityViolation> monotonicity_violations(Role role,
                                                           std::span<const double> probs,
                                                           std::span<const double> payoffs,
                                                           double tol_prob, double tol_payoff) {
  if (probs.size() != payoffs.size()) throw DomainError("probability and payoff lengths differ");
  std::vector<MonotonicityViolation> out;
  const std::size_t n = probs.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (probs[a] > probs[b] + tol_prob && payoffs[a] <= payoffs[b] + tol_payoff) {
        out.push_back({role, static_cast<Bid>(a), static_cast<Bid>(b), probs[a], probs[b],
                       payoffs[a], payoffs[b]});
      }
    }
  }
  return out;
}

MonotonicityReport is_weakly_payoff_monotone(const AuctionSpec& spec, const MixedProfile& profile,
                                             double tol_prob, double tol_payoff) {
  validate_profile(spec, profile);
  MonotonicityReport report;
  report.tol_prob = tol_prob;
  report.tol_payoff = tol_payoff;
  const std::size_t n = spec.num_bids();
  for (Role role : kRoles) {
    const PayoffMatrix matrix(spec, role);
    const auto& other = profile.of(opponent(role));
    const auto payoffs = matrix.apply(std::span<const double>(other));
    const auto values = matrix.to_double();
    for (const auto& v :
         monotonicity_violations(role, profile.of(role), payoffs, tol_prob, tol_payoff)) {
      const double scale = 1.0 + std::fabs(v.payoff_a) + std::fabs(v.payoff_b);
      if (v.payoff_b + tol_payoff - v.payoff_a > 1e-9 * scale) {
        report.violations.push_back(v);
        continue;
      }
      // Near tie: recompute the payoff difference term by term so that a
      // small genuine gap is not lost to cancellation.
      long double diff = 0.0L;
      const auto a = static_cast<std::size_t>(v.bid_a);
      const auto b = static_cast<std::size_t>(v.bid_b);
      for (std::size_t r = 0; r < n; ++r) {
        diff += static_cast<long double>(other[r]) *
                (static_cast<long double>(values[a * n + r]) - values[b * n + r]);
      }
      if (diff <= tol_payoff) report.violations.push_back(v);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

std::string_view to_string(CutoffVariant variant) {
  return variant == CutoffVariant::kVerbatim ? "verbatim" : "mirror";
}

Rational t_value(AuctionKind auction, const ValuationPair& valuations, const BidDomain& bids,
                 CutoffVariant variant) {
  const Rational c_low = valuations.net(Role::kLow);
  const Rational c_high = valuations.net(Role::kHigh);
  const Rational third_surplus = (c_high - c_low) / 3;
  const Rational top = bids.p_max();
  switch (auction) {
    case AuctionKind::kWinnerBid:
      return std::max(Rational(2) * c_high / 3 - c_low, third_surplus) + 1;
    case AuctionKind::kLoserBid: {
      const Rational reach = Rational(2) * (top - c_low) / 3;
      const Rational offset = variant == CutoffVariant::kVerbatim ? c_high : top - c_high;
      return std::max(reach - offset, third_surplus) + 1;
    }
    case AuctionKind::kInterior:
      break;
  }
  throw UnsupportedAuctionError("cutoffs are defined for extreme-price auctions only");
}

bool Interval::contains(const Rational& x) const {
  if (low && (low_open ? !(x > *low) : x < *low)) return false;
  if (high && (high_open ? !(x < *high) : x > *high)) return false;
  return true;
}

bool Interval::contains(double x) const {
  if (low && (low_open ? !(x > to_double(*low)) : x < to_double(*low))) return false;
  if (high && (high_open ? !(x < to_double(*high)) : x > to_double(*high))) return false;
  return true;
}

std::string Interval::to_string() const {
  return fmt::format("{}{},{}{}", low_open ? '(' : '[',
                     low ? format_rational(*low) : std::string("-inf"),
                     high ? format_rational(*high) : std::string("inf"),
                     high_open ? ')' : ']');
}

BiasWindow bias_window(AuctionKind auction, const ValuationPair& valuations, const BidDomain& bids,
                       CutoffVariant variant) {
  if (auction == AuctionKind::kInterior) {
    throw UnsupportedAuctionError("bias windows are defined for extreme-price auctions only");
  }
  const int c_low = valuations.net(Role::kLow);
  const int c_high = valuations.net(Role::kHigh);
  const int surplus = c_high - c_low;
  const int top = bids.p_max();
  if (top < c_high) throw DomainError("bid domain must reach v_high / 2");

  BiasWindow w;
  w.auction = auction;
  w.variant = variant;
  w.t_value = t_value(auction, valuations, bids, variant);
  const Rational& t = w.t_value;

  if (auction == AuctionKind::kWinnerBid) {
    w.conditional_role = Role::kLow;
    w.conditional_applies = 3 * valuations.low() >= valuations.high();
    w.conditional_window = open_interval(std::nullopt, Rational(c_low + 1));
    w.window_role = Role::kHigh;
    w.expected_bid_window = open_interval(Rational(c_low - 1), c_low + t);
    w.capped_role = Role::kLow;
    w.payoff_cap = c_low + t;
    w.floored_role = Role::kHigh;
    w.payoff_floor = c_high + (surplus - t);
    if (c_low + t > c_high) {
      w.admissible_segment = Interval{Rational(c_low), Rational(c_high), false, false};
    } else {
      w.admissible_segment = Interval{Rational(c_low), c_low + t, false, true};
    }
    return w;
  }

  w.conditional_role = Role::kHigh;
  w.conditional_applies = 3 * c_high <= 2 * top + c_low;
  w.conditional_window = Interval{Rational(c_high - 1), std::nullopt, false, true};
  w.window_role = Role::kLow;
  w.expected_bid_window = open_interval(c_high - t, Rational(c_high + 1));
  w.capped_role = Role::kHigh;
  w.payoff_cap = c_high + t;
  w.floored_role = Role::kLow;
  w.payoff_floor = c_low + (surplus - t);
  // The segment always uses the mirror endpoint, intersected with the
  // selected cutoff.
  const Rational mirror = t_value(auction, valuations, bids, CutoffVariant::kMirror);
  const Rational lower = std::max(c_high - mirror, c_high - t);
  if (lower < c_low) {
    w.admissible_segment = Interval{Rational(c_low), Rational(c_high), false, false};
  } else {
    w.admissible_segment = Interval{lower, Rational(c_high), true, false};
  }
  return w;
}

BiasWindow bias_window(const AuctionSpec& spec, CutoffVariant variant) {
  return bias_window(spec.kind(), spec.valuations, spec.bids, variant);
}

bool SequenceStep::all_hold() const {
  return std::all_of(statements.begin(), statements.end(),
                     [](const StatementCheck& s) { return s.holds; });
}

std::array<StatementCheck, 3> bias_statements(const AuctionSpec& spec,
                                              const MixedProfile& sigma,
                                              CutoffVariant variant) {
  validate_profile(spec, sigma);
  std::array<StatementCheck, 3> out{};
  for (int s = 0; s < 3; ++s) out[s] = {s + 1, false, true, "vacuous"};
  if (!spec.is_extreme()) return out;
  const BiasWindow w = bias_window(spec, variant);
  const double mean_of[] = {mean_bid(sigma.low), mean_bid(sigma.high)};
  const auto mean = [&](Role r) { return mean_of[r == Role::kLow ? 0 : 1]; };
  const double pay_of[] = {expected_payoff_of(spec, sigma, Role::kLow),
                           expected_payoff_of(spec, sigma, Role::kHigh)};
  const auto pay = [&](Role r) { return pay_of[r == Role::kLow ? 0 : 1]; };

  auto& s1 = out[0];
  s1.applicable = w.conditional_applies;
  s1.holds = !s1.applicable || w.conditional_window.contains(mean(w.conditional_role));
  s1.detail = fmt::format("E_{}={} in {}", to_string(w.conditional_role),
                          fmt_double(mean(w.conditional_role)),
                          w.conditional_window.to_string());

  auto& s2 = out[1];
  s2.applicable = true;
  s2.holds = w.expected_bid_window.contains(mean(w.window_role));
  s2.detail = fmt::format("E_{}={} in {}", to_string(w.window_role),
                          fmt_double(mean(w.window_role)), w.expected_bid_window.to_string());

  auto& s3 = out[2];
  s3.applicable = true;
  s3.holds = pay(w.capped_role) < to_double(w.payoff_cap) &&
             pay(w.floored_role) > to_double(w.payoff_floor);
  s3.detail = fmt::format("pi_{}={} < {}; pi_{}={} > {}", to_string(w.capped_role),
                          fmt_double(pay(w.capped_role)), format_rational(w.payoff_cap),
                          to_string(w.floored_role), fmt_double(pay(w.floored_role)),
                          format_rational(w.payoff_floor));
  return out;
}

bool PathPoint::statements_hold() const {
  return std::all_of(statements.begin(), statements.end(),
                     [](const StatementCheck& s) { return s.holds; });
}

PathReport check_path(const AuctionSpec& spec, std::span<const double> lambdas,
                      std::span<const MixedProfile> profiles, double threshold,
                      CutoffVariant variant) {
  if (lambdas.size() != profiles.size()) {
    throw SizeError(fmt::format("{} lambdas for {} profiles", lambdas.size(), profiles.size()));
  }
  PathReport report;
  report.threshold = threshold;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& sigma = profiles[i];
    PathPoint point{lambdas[i], kInf, std::nullopt,
                    is_weakly_payoff_monotone(spec, sigma).ok,
                    bias_statements(spec, sigma, variant),
                    mean_bid(sigma.low), mean_bid(sigma.high)};
    if (const auto nearest = equilibrium::nearest_equilibrium(spec, sigma)) {
      point.distance = nearest->distance;
      point.nearest_p = nearest->payoff_determinant_bid;
    }
    if (!report.tail_start && point.distance < threshold) report.tail_start = i;
    report.points.push_back(std::move(point));
  }
  report.tail_holds = report.tail_start.has_value();
  for (std::size_t i = report.tail_start.value_or(profiles.size()); i < profiles.size(); ++i) {
    if (!report.points[i].statements_hold()) report.tail_holds = false;
  }
  return report;
}

SequenceReport check_sequence(const AuctionSpec& spec, std::span<const MixedProfile> sequence,
                              const equilibrium::NashCertificate& target, CutoffVariant variant,
                              double tol_prob, double tol_payoff) {
  const MixedProfile target_profile = to_mixed(target.profile);
  validate_profile(spec, target_profile);
  const auto k = constants(spec);
  const bool extreme = spec.is_extreme();
  double target_low = 0.0;
  double target_high = 0.0;
  if (extreme) {
    target_low = expected_payoff_of(spec, target_profile, Role::kLow);
    target_high = expected_payoff_of(spec, target_profile, Role::kHigh);
  }

  SequenceReport report;
  double previous = kInf;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& sigma = sequence[i];
    if (!is_weakly_payoff_monotone(spec, sigma, tol_prob, tol_payoff).ok) {
      throw PreconditionError(fmt::format("sequence member {} is not weakly payoff monotone", i));
    }
    const double distance = sup_distance(sigma, target_profile);
    if (distance > previous + 1e-12) {
      throw PreconditionError(
          fmt::format("sequence member {} moves away from the target ({} > {})", i, distance,
                      previous));
    }
    previous = distance;

    SequenceStep step{i, distance, {}};
    for (int s = 0; s < 4; ++s) step.statements[s] = {s + 1, false, true, "vacuous"};
    if (extreme) {
      const auto first = bias_statements(spec, sigma, variant);
      std::copy(first.begin(), first.end(), step.statements.begin());
      const double mean_low = mean_bid(sigma.low);
      const double mean_high = mean_bid(sigma.high);

      auto& s4 = step.statements[3];
      if (spec.kind() == AuctionKind::kWinnerBid) {
        s4.applicable = target_low > k.c_low + 1e-12;
        s4.holds = !s4.applicable || mean_low < mean_high;
      } else {
        s4.applicable = target_high < k.c_high - 1e-12;
        s4.holds = !s4.applicable || mean_high > mean_low;
      }
      s4.detail = fmt::format("E_LV={} E_HV={}", fmt_double(mean_low), fmt_double(mean_high));
    }
    report.steps.push_back(std::move(step));
  }

  std::optional<std::size_t> tail;
  for (std::size_t i = report.steps.size(); i-- > 0;) {
    if (!report.steps[i].all_hold()) break;
    tail = i;
  }
  report.tail_start = tail;
  return report;
}

ProbeReport exclusion_probe(const AuctionSpec& spec, Bid target_p, const ProbeOptions& options) {
  if (spec.bids.p_max() > options.max_p) {
    throw SizeError(fmt::format("exclusion probe limited to p_max <= {}", options.max_p));
  }
  const auto k = constants(spec);
  if (target_p < k.c_low || target_p > k.c_high) {
    throw DomainError(fmt::format("target bid {} outside the Nash range", target_p));
  }
  if (!(options.step > 0 && options.step <= 1)) throw DomainError("step must lie in (0, 1]");

  const std::size_t n = spec.num_bids();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_bid(0, n - 1);

  const auto monotone = [&](const MixedProfile& p) {
    return is_weakly_payoff_monotone(spec, p).ok;
  };
  const auto evaluate = [&](const MixedProfile& p) {
    auto d = equilibrium::distance_to_equilibria(spec, p, target_p);
    return d ? *d : equilibrium::EquilibriumDistance{target_p, kInf, p};
  };

  ProbeReport report{target_p, options.seed, 0, kInf, false, uniform_profile(spec)};

  // The uniform profile is always weakly monotone; the target equilibrium
  // itself may be.
  MixedProfile current = uniform_profile(spec);
  auto current_eval = evaluate(current);
  report.evaluations = 1;
  {
    const auto& candidate = current_eval.nearest;
    if (std::isfinite(current_eval.distance) && monotone(candidate)) {
      current = candidate;
      current_eval = evaluate(current);
    }
    ++report.evaluations;
  }

  while (report.evaluations < options.budget && current_eval.distance > 0.0) {
    MixedProfile proposal = current;
    const double move = unit(rng);
    const double amount = options.step * unit(rng);
    if (move < 1.0 / 3.0) {
      // Blend toward the nearest point of the target set.
      for (Role role : kRoles) {
        auto& dst = proposal.of(role);
        const auto& goal = current_eval.nearest.of(role);
        for (std::size_t b = 0; b < n; ++b) dst[b] = (1.0 - amount) * dst[b] + amount * goal[b];
      }
    } else {
      const Role role = unit(rng) < 0.5 ? Role::kLow : Role::kHigh;
      auto& dst = proposal.of(role);
      std::size_t from = pick_bid(rng);
      std::size_t to = pick_bid(rng);
      if (move >= 2.0 / 3.0) {
        // Directed: from the largest excess to the largest deficit.
        const auto& goal = current_eval.nearest.of(role);
        double excess = -kInf;
        double deficit = -kInf;
        for (std::size_t b = 0; b < n; ++b) {
          if (dst[b] - goal[b] > excess) {
            excess = dst[b] - goal[b];
            from = b;
          }
          if (goal[b] - dst[b] > deficit) {
            deficit = goal[b] - dst[b];
            to = b;
          }
        }
      }
      const double moved = amount * dst[from];
      dst[from] -= moved;
      dst[to] += moved;
    }
    ++report.evaluations;
    if (!monotone(proposal)) continue;
    auto eval = evaluate(proposal);
    if (eval.distance <= current_eval.distance) {
      current = std::move(proposal);
      current_eval = std::move(eval);
    }
  }

  report.best = current;
  report.distance = current_eval.distance;
  report.monotone = monotone(current);
  return report;
}

void write_report(std::ostream& out, const MonotonicityReport& report) {
  out << fmt::format("monotonicity ok={} violations={} tol_prob={} tol_payoff={}\n",
                     report.ok ? 1 : 0, report.violations.size(), fmt_double(report.tol_prob),
                     fmt_double(report.tol_payoff));
  for (const auto& v : report.violations) {
    out << fmt::format(
        "violation role={} bid_a={} bid_b={} prob_a={} prob_b={} payoff_a={} payoff_b={}\n",
        to_string(v.role), v.bid_a, v.bid_b, fmt_double(v.prob_a), fmt_double(v.prob_b),
        fmt_double(v.payoff_a), fmt_double(v.payoff_b));
  }
}

void write_report(std::ostream& out, const SequenceReport& report) {
  out << fmt::format("sequence steps={} tail_start={}\n", report.steps.size(),
                     report.tail_start ? std::to_string(*report.tail_start) : "none");
  for (const auto& step : report.steps) {
    for (const auto& s : step.statements) {
      out << fmt::format("check index={} distance={} statement={} applicable={} holds={} {}\n",
                         step.index, fmt_double(step.distance_to_target), s.statement,
                         s.applicable ? 1 : 0, s.holds ? 1 : 0, s.detail);
    }
  }
}

void write_report(std::ostream& out, const PathReport& report) {
  out << fmt::format("path points={} threshold={} tail_start={} tail_holds={}\n",
                     report.points.size(), fmt_double(report.threshold),
                     report.tail_start ? std::to_string(*report.tail_start) : "none",
                     report.tail_holds ? 1 : 0);
  for (const auto& point : report.points) {
    out << fmt::format("point lambda={} distance={} nearest_p={} monotone={} E_LV={} E_HV={}",
                       fmt_double(point.lambda), fmt_double(point.distance),
                       point.nearest_p ? std::to_string(*point.nearest_p) : "none",
                       point.monotone ? 1 : 0, fmt_double(point.mean_bid_low),
                       fmt_double(point.mean_bid_high));
    for (const auto& s : point.statements) {
      out << fmt::format(" s{}={}", s.statement, !s.applicable ? "na" : s.holds ? "ok" : "fail");
    }
    out << '\n';
  }
}

void write_report(std::ostream& out, const ProbeReport& report) {
  out << fmt::format("probe target_p={} seed={} evaluations={} distance={} monotone={}\n",
                     report.target_p, report.seed, report.evaluations,
                     fmt_double(report.distance), report.monotone ? 1 : 0);
  for (Role role : kRoles) {
    const auto& dist = report.best.of(role);
    for (std::size_t b = 0; b < dist.size(); ++b) {
      if (dist[b] > 0) {
        out << fmt::format("probe_mass role={} bid={} prob={}\n", to_string(role), b,
                           fmt_double(dist[b]));
      }
    }
  }
}

}  // namespace alpha_auction::empirical
