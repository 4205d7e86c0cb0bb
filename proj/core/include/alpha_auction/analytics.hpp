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

#ifndef ALPHA_AUCTION_ANALYTICS_HPP_
#define ALPHA_AUCTION_ANALYTICS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alpha_auction/auction.hpp"
#include "alpha_auction/rational.hpp"
#include "alpha_auction/session.hpp"

// Statistics over the period CSV. Everything is computed from the CSV rows
// alone so a log can be re-analysed without the session that produced it.
namespace alpha_auction::analytics {

struct LogRow {
  std::string session_id;
  int session_type;
  Rational alpha;
  int period;
  int pair_id;
  int subject_id;
  Role role;
  int item_a;
  int item_b_own;
  int item_b_other;
  Bid bid;
  int revisions;
  Bid opp_bid;
  Role winner;
  Rational transfer;
  Rational raw_points;
  bool efficient;
  bool equilibrium_outcome;

  session::PeriodValues values() const;
};

// Parses the period CSV (header required). DataError names the line.
std::vector<LogRow> read_period_csv(std::istream& in);
// Rows of an in-memory session, identical to writing and re-reading.
std::vector<LogRow> to_rows(const session::SessionConfig& config,
                            std::span<const session::PeriodRecord> records);

// "1A"/"1B", "2A"/"2B", "3", "4".
std::string structure_label(int session_type, const session::PeriodValues& values);

// Both sides of one pair in one period.
struct PairObservation {
  const LogRow* low;
  const LogRow* high;
};

// Joins the two rows of every (session, period, pair). DataError when a
// pair is incomplete or its rows disagree.
std::vector<PairObservation> pair_observations(std::span<const LogRow> rows);

struct StandardizedMetrics {
  Rational std_payoff_low;
  Rational std_payoff_high;
  Rational std_bid_low;
  Rational std_bid_high;
  bool efficient;
  bool equilibrium_outcome;

  const Rational& std_payoff(Role role) const {
    return role == Role::kLow ? std_payoff_low : std_payoff_high;
  }
  const Rational& std_bid(Role role) const {
    return role == Role::kLow ? std_bid_low : std_bid_high;
  }
};

// Payoffs above the net valuation and bids above c_l, both in units of the
// equity surplus. The two payoffs sum to +1 when efficient, -1 otherwise.
StandardizedMetrics standardize(const PairObservation& pair);

struct SummaryRow {
  std::string auction;    // WB / AB / LB / alpha=x
  std::string structure;  // see structure_label
  Role role;
  std::size_t n;
  double mean_std_payoff;
  double sd_std_payoff;  // n - 1 denominator; NaN when n == 1
  double mean_std_bid;
  double sd_std_bid;
  double efficiency_rate;
  double equilibrium_rate;
};

// Groups by auction x structure x role in a fixed order.
std::vector<SummaryRow> summary_table(std::span<const LogRow> rows);

inline constexpr std::string_view kSummaryCsvHeader =
    "auction,structure,role,n,mean_std_payoff,sd_std_payoff,mean_std_bid,"
    "sd_std_bid,efficiency_rate,equilibrium_rate";
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

// Expected payoff of every bid in one period against the uniform mix over
// that period's logged opposite-role bids, in reduced units.
struct PayoffField {
  std::string session_id;
  int period;
  session::PeriodValues values;
  Rational alpha;
  std::array<std::vector<double>, 2> payoff;  // [low, high], bid_cap + 1 each

  const std::vector<double>& of(Role role) const {
    return payoff[role == Role::kLow ? 0 : 1];
  }
};

// DataError when either role has no bids in that period.
PayoffField empirical_payoff_field(std::span<const LogRow> rows,
                                   const std::string& session_id, int period,
                                   const Rational& gamma = Rational(1));
// Every (session, period) present in the rows, in log order.
std::vector<PayoffField> all_payoff_fields(std::span<const LogRow> rows,
                                           const Rational& gamma = Rational(1));

// Mean rank (1 = lowest payoff) of `bid` among all bids; equal payoffs
// share their mean rank.
double mean_rank(std::span<const double> payoffs, Bid bid);
// ceil(20 * rank / n_actions), clamped to 1..20.
int ventile(double rank, std::size_t n_actions);

struct Histogram {
  std::string auction;
  Role role;
  std::size_t n;
  std::array<double, 20> frequency;  // sums to 1
};

std::vector<Histogram> ventile_histogram(std::span<const LogRow> rows,
                                         const Rational& gamma = Rational(1));
void write_histogram_csv(std::ostream& out, std::span<const Histogram> rows);

enum class UnitLevel : std::uint8_t { kSession, kValuationSession };

struct UnitDifference {
  std::string unit;
  double played;
  double unplayed;
  double difference;  // played - unplayed
};

struct PlayedVsUnplayed {
  std::vector<UnitDifference> units;
  int positive;
  int negative;
  double sign_test_p;  // one-sided, H1: played > unplayed
};

// Per unit, the mean field value of chosen bids minus the mean over bids
// nobody of that role chose in that period.
PlayedVsUnplayed played_vs_unplayed(std::span<const LogRow> rows, UnitLevel level,
                                    const Rational& gamma = Rational(1));
// P(Binomial(n, 1/2) >= positive), exact.
double sign_test(int positive, int n);

// One choice among alternatives described by covariate rows.
struct ChoiceSet {
  std::vector<std::vector<double>> covariates;
  std::size_t chosen;
};

struct ClogitOptions {
  int max_iter = 100;
  double tol = 1e-8;       // on the gradient norm divided by the choice count
  double beta_cap = 1e3;   // |beta| beyond this is reported as separation
};

struct ClogitFit {
  std::vector<double> beta;
  std::vector<double> std_error;  // observed information, not clustered
  double log_likelihood;
  double log_likelihood_zero;
  double gradient_norm;
  int iterations;
  bool converged;
  bool separated;
  std::size_t n_choices;
};

double clogit_log_likelihood(std::span<const ChoiceSet> data,
                             std::span<const double> beta);
ClogitFit conditional_logit(std::span<const ChoiceSet> data,
                            const ClogitOptions& options = {});

struct ChoiceCovariates {
  bool period_interaction = false;  // payoff x period
  bool round_numbers = false;       // multiple of 10, multiple of 5 only
};

// One choice set per logged bid: all bids of that period with the
// empirical expected payoff (raw points) as first covariate.
std::vector<ChoiceSet> choice_data(std::span<const LogRow> rows,
                                   const ChoiceCovariates& covariates = {},
                                   const Rational& gamma = Rational(1));
std::vector<std::string> covariate_names(const ChoiceCovariates& covariates);

void write_fit_report(std::ostream& out, const ClogitFit& fit,
                      std::span<const std::string> names);

struct PermutationResult {
  double p_value;
  double observed;
  bool exact;
  std::uint64_t states;  // enumerated states or Monte Carlo draws
};

using BlockStatistic =
    std::function<double(std::span<const std::vector<double>> blocks)>;

// Labels are exchangeable within each block. p = share of relabelings whose
// statistic is at least the observed one; exact when the state space has at
// most `exact_limit` states, otherwise `draws` seeded Monte Carlo draws with
// the (count + 1) / (draws + 1) estimate.
PermutationResult permutation_test(std::span<const std::vector<double>> blocks,
                                   const BlockStatistic& statistic,
                                   std::uint64_t seed = 0,
                                   std::uint64_t exact_limit = 1000000,
                                   std::uint64_t draws = 100000);

// Number of blocks whose values are strictly increasing.
double increasing_blocks(std::span<const std::vector<double>> blocks);

}  // namespace alpha_auction::analytics

#endif  // ALPHA_AUCTION_ANALYTICS_HPP_
