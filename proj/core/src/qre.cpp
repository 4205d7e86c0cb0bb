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

#include "alpha_auction/qre.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Core>
#include <fmt/format.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::qre {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

RowMatrix dense(const AuctionSpec& spec, Role role) {
  const auto n = static_cast<Eigen::Index>(spec.num_bids());
  const auto values = PayoffMatrix(spec, role).to_double();
  return Eigen::Map<const RowMatrix>(values.data(), n, n);
}

struct DenseGame {
  explicit DenseGame(const AuctionSpec& spec)
      : low(dense(spec, Role::kLow)), high(dense(spec, Role::kHigh)) {}

  const RowMatrix& of(Role role) const { return role == Role::kLow ? low : high; }

  RowMatrix low;
  RowMatrix high;
};

void softmax_into(const Vector& utility, double lambda, Vector& out) {
  const double top = utility.maxCoeff();
  out = ((utility.array() - top) * lambda).exp().matrix();
  out /= out.sum();
}

Vector to_vector(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<double> logit_response(const AuctionSpec& spec, Role role,
                                   std::span<const double> opponent, double lambda) {
  if (!(lambda >= 0)) throw DomainError("lambda must be non-negative");
  validate_distribution(opponent, spec.num_bids());
  const Vector u = dense(spec, role) * to_vector(opponent);
  Vector out;
  softmax_into(u, lambda, out);
  return to_std(out);
}

double residual(const AuctionSpec& spec, const MixedProfile& profile, double lambda) {
  validate_profile(spec, profile);
  double r = 0.0;
  for (Role role : kRoles) {
    const auto resp = logit_response(spec, role, profile.of(opponent(role)), lambda);
    const auto& own = profile.of(role);
    for (std::size_t b = 0; b < own.size(); ++b) r = std::max(r, std::fabs(own[b] - resp[b]));
  }
  return r;
}

QrePoint solve_qre(const AuctionSpec& spec, double lambda, const MixedProfile& init,
                   const SolverOptions& options) {
  if (!(lambda >= 0)) throw DomainError("lambda must be non-negative");
  if (!(options.damping > 0 && options.damping <= 1)) {
    throw DomainError("damping must lie in (0, 1]");
  }
  if (!(options.tol > 0)) throw DomainError("tolerance must be positive");
  if (options.max_iter < 1) throw DomainError("max_iter must be positive");
  validate_profile(spec, init);

  const DenseGame game(spec);
  Vector low = to_vector(init.low);
  Vector high = to_vector(init.high);
  Vector resp_low, resp_high;

  double step = options.damping;
  double previous = std::numeric_limits<double>::infinity();
  double r = previous;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    softmax_into(game.low * high, lambda, resp_low);
    softmax_into(game.high * low, lambda, resp_high);
    r = std::max((low - resp_low).lpNorm<Eigen::Infinity>(),
                 (high - resp_high).lpNorm<Eigen::Infinity>());
    if (r <= options.tol) {
      // Report the joint logit image itself so each row is an exact softmax
      // (tied payoffs get identical probabilities), provided it also passes.
      Vector check_low, check_high;
      softmax_into(game.low * resp_high, lambda, check_low);
      softmax_into(game.high * resp_low, lambda, check_high);
      const double image_residual =
          std::max((resp_low - check_low).lpNorm<Eigen::Infinity>(),
                   (resp_high - check_high).lpNorm<Eigen::Infinity>());
      if (image_residual <= options.tol) {
        return {lambda, {to_std(resp_low), to_std(resp_high)}, image_residual, iter};
      }
    }
    if (options.adaptive) {
      step = r > previous ? std::max(step * 0.5, 1e-3) : std::min(step * 1.05, options.damping);
    }
    previous = r;
    low = (1.0 - step) * low + step * resp_low;
    high = (1.0 - step) * high + step * resp_high;
    low /= low.sum();
    high /= high.sum();
  }
  throw ConvergenceError(
      fmt::format("logit QRE did not converge at lambda={} (residual {:.3e} after {} iterations)",
                  lambda, r, options.max_iter),
      lambda, r, options.max_iter);
}

QrePoint solve_qre(const AuctionSpec& spec, double lambda, const SolverOptions& options) {
  return solve_qre(spec, lambda, uniform_profile(spec), options);
}

double efficiency(const AuctionSpec& spec, const MixedProfile& profile) {
  validate_profile(spec, profile);
  const double gamma = to_double(spec.gamma);
  double total = 0.0;
  double below_high = 0.0;  // sum of sigma_low over bids strictly below b
  for (std::size_t b = 0; b < profile.high.size(); ++b) {
    total += profile.high[b] * (below_high + gamma * profile.low[b]);
    below_high += profile.low[b];
  }
  return 100.0 * total;
}

ProfileSummary summarize(const AuctionSpec& spec, const MixedProfile& profile) {
  const auto k = constants(spec);
  const double es = k.equity_surplus;
  ProfileSummary s{};
  s.efficiency_pct = efficiency(spec, profile);
  s.mean_std_bid_low = (mean_bid(profile.low) - k.c_low) / es;
  s.mean_std_bid_high = (mean_bid(profile.high) - k.c_low) / es;
  const DenseGame game(spec);
  const Vector low = to_vector(profile.low);
  const Vector high = to_vector(profile.high);
  s.std_payoff_low = (low.dot(game.low * high) - k.c_low) / es;
  s.std_payoff_high = (high.dot(game.high * low) - k.c_high) / es;
  return s;
}

SweepCurve sweep(const AuctionSpec& spec, std::span<const double> grid, bool continuation,
                 const SolverOptions& options) {
  if (grid.empty() || grid.front() != 0.0) throw DomainError("lambda grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("lambda grid must be strictly increasing");
  }
  SweepCurve curve{spec, {}, {}};
  MixedProfile start = uniform_profile(spec);
  for (double lambda : grid) {
    auto point = solve_qre(spec, lambda, continuation ? start : uniform_profile(spec), options);
    curve.rows.push_back({lambda, summarize(spec, point.profile), point.iterations, point.residual});
    start = point.profile;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(i / 100.0);
  return grid;
}

void write_sweep_csv(std::ostream& out, const SweepCurve& curve, bool header) {
  if (header) out << kSweepCsvHeader << '\n';
  const auto& s = curve.spec;
  for (const auto& row : curve.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{:.3e}\n",
                       auction_label(s.alpha), format_rational(s.alpha),
                       format_rational(s.gamma), s.valuations.low(), s.valuations.high(),
                       s.bids.p_max(), row.lambda, row.summary.efficiency_pct,
                       row.summary.mean_std_bid_low, row.summary.mean_std_bid_high,
                       row.summary.std_payoff_low, row.summary.std_payoff_high,
                       row.iterations, row.residual);
  }
}

}  // namespace alpha_auction::qre
