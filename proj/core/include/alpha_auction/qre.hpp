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

#ifndef ALPHA_AUCTION_QRE_HPP_
#define ALPHA_AUCTION_QRE_HPP_

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "alpha_auction/auction.hpp"

namespace alpha_auction::qre {

struct SolverOptions {
  double damping = 0.5;  // initial and maximum step toward the logit response
  double tol = 1e-10;    // sup-norm fixed-point residual
  int max_iter = 100000;
  // Halve the step when the residual grows, otherwise grow it by 5% up to
  // `damping`. With adaptive = false the step stays fixed.
  bool adaptive = true;
};

struct QrePoint {
  double lambda;
  MixedProfile profile;
  double residual;
  int iterations;
};

// sigma(b) proportional to exp(lambda * U(b | opponent)), max-shifted.
std::vector<double> logit_response(const AuctionSpec& spec, Role role,
                                   std::span<const double> opponent,
                                   double lambda);

// Sup-norm distance between `profile` and its joint logit response.
double residual(const AuctionSpec& spec, const MixedProfile& profile,
                double lambda);

// Throws ConvergenceError when max_iter residual evaluations do not reach
// tol. Each residual evaluation counts as one iteration.
QrePoint solve_qre(const AuctionSpec& spec, double lambda,
                   const MixedProfile& init, const SolverOptions& options = {});
QrePoint solve_qre(const AuctionSpec& spec, double lambda,
                   const SolverOptions& options = {});

// Percentage of allocations that give the object to the high partner.
double efficiency(const AuctionSpec& spec, const MixedProfile& profile);

// Summary statistics of a profile on the equity-surplus scale.
struct ProfileSummary {
  double efficiency_pct;
  double mean_std_bid_low;
  double mean_std_bid_high;
  double std_payoff_low;
  double std_payoff_high;
};

ProfileSummary summarize(const AuctionSpec& spec, const MixedProfile& profile);

struct SweepRow {
  double lambda;
  ProfileSummary summary;
  int iterations;
  double residual;
};

struct SweepCurve {
  AuctionSpec spec;
  std::vector<SweepRow> rows;
  std::vector<QrePoint> points;
};

// Grid must be ascending and start at 0. With continuation each solve starts
// from the previous solution, otherwise from the uniform profile.
SweepCurve sweep(const AuctionSpec& spec, std::span<const double> grid,
                 bool continuation = true, const SolverOptions& options = {});

// 0, 0.01, ..., 0.30.
std::vector<double> default_grid();

inline constexpr std::string_view kSweepCsvHeader =
    "auction,alpha,gamma,v_l,v_h,p_max,lambda,efficiency_pct,mean_std_bid_lv,"
    "mean_std_bid_hv,std_payoff_lv,std_payoff_hv,iterations,residual";

void write_sweep_csv(std::ostream& out, const SweepCurve& curve,
                     bool header = true);

}  // namespace alpha_auction::qre

#endif  // ALPHA_AUCTION_QRE_HPP_
