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

#include "alpha_auction/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "alpha_auction/errors.hpp"

namespace alpha_auction::analytics {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

int to_int(std::string_view field, std::size_t line, std::string_view column) {
  int value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(fmt::format("line {}: bad {} '{}'", line, column, field));
  }
  return value;
}

bool to_flag(std::string_view field, std::size_t line, std::string_view column) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw DataError(fmt::format("line {}: bad {} '{}'", line, column, field));
}

Role to_role(std::string_view field, std::size_t line) {
  try {
    return parse_role(field);
  } catch (const Error&) {
    throw DataError(fmt::format("line {}: bad role '{}'", line, field));
  }
}

Rational to_rational(std::string_view field, std::size_t line,
                     std::string_view column) {
  try {
    return parse_rational(field);
  } catch (const Error&) {
    throw DataError(fmt::format("line {}: bad {} '{}'", line, column, field));
  }
}

double reduced_payoff(double alpha, double win_on_tie, double value, Bid own,
                      Bid other) {
  if (own > other) return value - (alpha * own + (1.0 - alpha) * other);
  if (own < other) return alpha * other + (1.0 - alpha) * own;
  return win_on_tie * (value - own) + (1.0 - win_on_tie) * own;
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(xs);
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(xs.size() - 1));
}

std::string fixed(double x) {
  return std::isnan(x) ? std::string("NA") : fmt::format("{:.6f}", x);
}

using PeriodKey = std::pair<std::string, int>;

// Fields for every (session, period), looked up by key.
class FieldIndex {
 public:
  FieldIndex(std::span<const LogRow> rows, const Rational& gamma) {
    for (auto& field : all_payoff_fields(rows, gamma)) {
      PeriodKey key{field.session_id, field.period};
      fields_.emplace(std::move(key), std::move(field));
    }
  }
  const PayoffField& at(const LogRow& row) const {
    return fields_.at({row.session_id, row.period});
  }

 private:
  std::map<PeriodKey, PayoffField> fields_;
};

}  // namespace

// ---------------------------------------------------------------- rows

session::PeriodValues LogRow::values() const {
  return role == Role::kHigh ? session::PeriodValues{item_a, item_b_other, item_b_own}
                             : session::PeriodValues{item_a, item_b_own, item_b_other};
}

std::vector<LogRow> read_period_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty period CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != session::kPeriodCsvHeader) {
    throw DataError("period CSV header does not match the schema");
  }
  std::vector<LogRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 18) {
      throw DataError(fmt::format("line {}: expected 18 fields, got {}", number, f.size()));
    }
    LogRow row{std::string(f[0]),
               to_int(f[1], number, "session_type"),
               to_rational(f[2], number, "auction_alpha"),
               to_int(f[3], number, "period"),
               to_int(f[4], number, "pair_id"),
               to_int(f[5], number, "subject_id"),
               to_role(f[6], number),
               to_int(f[7], number, "item_a"),
               to_int(f[8], number, "item_b_own"),
               to_int(f[9], number, "item_b_other"),
               to_int(f[10], number, "bid"),
               to_int(f[11], number, "revisions"),
               to_int(f[12], number, "opp_bid"),
               to_role(f[13], number),
               to_rational(f[14], number, "transfer"),
               to_rational(f[15], number, "raw_points"),
               to_flag(f[16], number, "efficient"),
               to_flag(f[17], number, "equilibrium_outcome")};
    const int cap = std::max(row.item_b_own, row.item_b_other);
    if (row.bid < 0 || row.bid > cap || row.opp_bid < 0 || row.opp_bid > cap) {
      throw DataError(fmt::format("line {}: bid outside 0..{}", number, cap));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LogRow> to_rows(const session::SessionConfig& config,
                            std::span<const session::PeriodRecord> records) {
  std::stringstream buffer;
  session::write_period_csv(buffer, config, records);
  return read_period_csv(buffer);
}

std::string structure_label(int session_type, const session::PeriodValues& values) {
  switch (session_type) {
    case 1:
      return values.item_b_high == 160 ? "1A" : "1B";
    case 2:
      return values.item_b_high == 290 ? "2A" : "2B";
    case 3:
      return "3";
    case 4:
      return "4";
    default:
      return fmt::format("type{}", session_type);
  }
}

std::vector<PairObservation> pair_observations(std::span<const LogRow> rows) {
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, std::size_t> index;
  std::vector<PairObservation> pairs;
  for (const LogRow& row : rows) {
    Key key{row.session_id, row.period, row.pair_id};
    auto [it, inserted] = index.emplace(key, pairs.size());
    if (inserted) pairs.push_back({nullptr, nullptr});
    auto& slot = row.role == Role::kLow ? pairs[it->second].low : pairs[it->second].high;
    if (slot != nullptr) {
      throw DataError(fmt::format("session {} period {} pair {}: duplicate {}",
                                  row.session_id, row.period, row.pair_id,
                                  to_string(row.role)));
    }
    slot = &row;
  }
  for (const auto& pair : pairs) {
    const LogRow* any = pair.low != nullptr ? pair.low : pair.high;
    if (pair.low == nullptr || pair.high == nullptr) {
      throw DataError(fmt::format("session {} period {} pair {}: missing a role",
                                  any->session_id, any->period, any->pair_id));
    }
    const LogRow& l = *pair.low;
    const LogRow& h = *pair.high;
    if (l.opp_bid != h.bid || h.opp_bid != l.bid || l.winner != h.winner ||
        l.transfer != h.transfer || l.efficient != h.efficient ||
        l.item_a != h.item_a || l.item_b_own != h.item_b_other ||
        l.equilibrium_outcome != h.equilibrium_outcome || l.alpha != h.alpha) {
      throw DataError(fmt::format("session {} period {} pair {}: rows disagree",
                                  l.session_id, l.period, l.pair_id));
    }
  }
  return pairs;
}

// ---------------------------------------------------------------- standardize

StandardizedMetrics standardize(const PairObservation& pair) {
  const auto values = pair.low->values();
  const ValuationPair v = values.reduced();
  const Rational c_low(v.net(Role::kLow));
  const Rational c_high(v.net(Role::kHigh));
  const Rational surplus = c_high - c_low;
  const Rational pi_low = pair.low->raw_points - values.item_a;
  const Rational pi_high = pair.high->raw_points - values.item_a;
  return {(pi_low - c_low) / surplus,
          (pi_high - c_high) / surplus,
          (Rational(pair.low->bid) - c_low) / surplus,
          (Rational(pair.high->bid) - c_low) / surplus,
          pair.low->efficient,
          pair.low->equilibrium_outcome};
}

std::vector<SummaryRow> summary_table(std::span<const LogRow> rows) {
  struct Group {
    std::vector<double> payoff, bid, efficient, equilibrium;
  };
  // alpha descending puts WB, AB, LB first.
  using Key = std::tuple<Rational, std::string, Role>;
  auto order = [](const Key& a, const Key& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  };
  std::map<Key, Group, decltype(order)> groups(order);
  for (const auto& pair : pair_observations(rows)) {
    const auto metrics = standardize(pair);
    const std::string structure =
        structure_label(pair.low->session_type, pair.low->values());
    for (Role role : kRoles) {
      auto& group = groups[{pair.low->alpha, structure, role}];
      group.payoff.push_back(to_double(metrics.std_payoff(role)));
      group.bid.push_back(to_double(metrics.std_bid(role)));
      group.efficient.push_back(metrics.efficient ? 1.0 : 0.0);
      group.equilibrium.push_back(metrics.equilibrium_outcome ? 1.0 : 0.0);
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) {
    out.push_back({auction_label(std::get<0>(key)), std::get<1>(key),
                   std::get<2>(key), group.payoff.size(), mean(group.payoff),
                   sample_sd(group.payoff), mean(group.bid), sample_sd(group.bid),
                   mean(group.efficient), mean(group.equilibrium)});
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.auction, r.structure,
                       to_string(r.role), r.n, fixed(r.mean_std_payoff),
                       fixed(r.sd_std_payoff), fixed(r.mean_std_bid),
                       fixed(r.sd_std_bid), fixed(r.efficiency_rate),
                       fixed(r.equilibrium_rate));
  }
}

// ---------------------------------------------------------------- fields

namespace {

PayoffField build_field(const LogRow& first, const std::vector<Bid>& low_bids,
                        const std::vector<Bid>& high_bids, const Rational& gamma) {
  PayoffField field{first.session_id, first.period, first.values(), first.alpha, {}};
  const ValuationPair v = field.values.reduced();
  const double alpha = to_double(first.alpha);
  const double g = to_double(gamma);
  const int cap = field.values.bid_cap();
  for (Role role : kRoles) {
    const auto& others = role == Role::kLow ? high_bids : low_bids;
    if (others.empty()) {
      throw DataError(fmt::format("session {} period {}: no {} bids",
                                  first.session_id, first.period,
                                  to_string(opponent(role))));
    }
    const double tie = role == Role::kHigh ? g : 1.0 - g;
    auto& out = field.payoff[role == Role::kLow ? 0 : 1];
    out.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    for (Bid own = 0; own <= cap; ++own) {
      double total = 0.0;
      for (Bid other : others) total += reduced_payoff(alpha, tie, v.of(role), own, other);
      out[static_cast<std::size_t>(own)] = total / static_cast<double>(others.size());
    }
  }
  return field;
}

}  // namespace

PayoffField empirical_payoff_field(std::span<const LogRow> rows,
                                   const std::string& session_id, int period,
                                   const Rational& gamma) {
  const LogRow* first = nullptr;
  std::vector<Bid> low, high;
  for (const auto& row : rows) {
    if (row.session_id != session_id || row.period != period) continue;
    if (first == nullptr) first = &row;
    (row.role == Role::kLow ? low : high).push_back(row.bid);
  }
  if (first == nullptr) {
    throw DataError(fmt::format("session {} has no period {}", session_id, period));
  }
  return build_field(*first, low, high, gamma);
}

std::vector<PayoffField> all_payoff_fields(std::span<const LogRow> rows,
                                           const Rational& gamma) {
  std::map<PeriodKey, std::size_t> index;
  std::vector<const LogRow*> firsts;
  std::vector<std::array<std::vector<Bid>, 2>> bids;
  for (const auto& row : rows) {
    auto [it, inserted] = index.emplace(PeriodKey{row.session_id, row.period}, firsts.size());
    if (inserted) {
      firsts.push_back(&row);
      bids.emplace_back();
    }
    bids[it->second][row.role == Role::kLow ? 0 : 1].push_back(row.bid);
  }
  std::vector<PayoffField> out;
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    out.push_back(build_field(*firsts[i], bids[i][0], bids[i][1], gamma));
  }
  return out;
}

double mean_rank(std::span<const double> payoffs, Bid bid) {
  if (bid < 0 || static_cast<std::size_t>(bid) >= payoffs.size()) {
    throw DomainError("bid outside the payoff field");
  }
  const double target = payoffs[static_cast<std::size_t>(bid)];
  const double eps = 1e-9 * std::max(1.0, std::abs(target));
  std::size_t below = 0, equal = 0;
  for (double x : payoffs) {
    if (x < target - eps) {
      ++below;
    } else if (x <= target + eps) {
      ++equal;
    }
  }
  return static_cast<double>(below) + (static_cast<double>(equal) + 1.0) / 2.0;
}

int ventile(double rank, std::size_t n_actions) {
  const double scaled = 20.0 * rank / static_cast<double>(n_actions);
  return std::clamp(static_cast<int>(std::ceil(scaled - 1e-12)), 1, 20);
}

std::vector<Histogram> ventile_histogram(std::span<const LogRow> rows,
                                         const Rational& gamma) {
  const FieldIndex fields(rows, gamma);
  using Key = std::pair<Rational, Role>;
  auto order = [](const Key& a, const Key& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::map<Key, std::array<std::size_t, 20>, decltype(order)> counts(order);
  for (const auto& row : rows) {
    const auto& payoff = fields.at(row).of(row.role);
    const int bin = ventile(mean_rank(payoff, row.bid), payoff.size());
    auto [it, inserted] = counts.try_emplace({row.alpha, row.role});
    if (inserted) it->second.fill(0);
    ++it->second[static_cast<std::size_t>(bin - 1)];
  }
  std::vector<Histogram> out;
  for (const auto& [key, bins] : counts) {
    Histogram h{auction_label(key.first), key.second, 0, {}};
    h.n = std::accumulate(bins.begin(), bins.end(), std::size_t{0});
    for (std::size_t i = 0; i < 20; ++i) {
      h.frequency[i] = static_cast<double>(bins[i]) / static_cast<double>(h.n);
    }
    out.push_back(h);
  }
  return out;
}

void write_histogram_csv(std::ostream& out, std::span<const Histogram> rows) {
  out << "auction,role,ventile,frequency\n";
  for (const auto& h : rows) {
    for (std::size_t i = 0; i < 20; ++i) {
      out << fmt::format("{},{},{},{:.6f}\n", h.auction, to_string(h.role), i + 1,
                         h.frequency[i]);
    }
  }
}

// ---------------------------------------------------------------- played

double sign_test(int positive, int n) {
  if (n < 0 || positive < 0 || positive > n) {
    throw DomainError("sign test needs 0 <= positive <= n");
  }
  if (n == 0) return 1.0;
  // Sum of C(n, i) / 2^n in log space.
  double total = 0.0;
  for (int i = positive; i <= n; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(n - i + 1.0) - n * std::log(2.0);
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

PlayedVsUnplayed played_vs_unplayed(std::span<const LogRow> rows, UnitLevel level,
                                    const Rational& gamma) {
  const FieldIndex fields(rows, gamma);
  struct Cell {
    std::string unit;
    const PayoffField* field;
    Role role;
    std::vector<Bid> bids;
  };
  std::map<std::tuple<std::string, int, Role>, Cell> cells;
  std::vector<std::string> unit_order;
  std::set<std::string> seen_units;
  for (const auto& row : rows) {
    std::string unit = row.session_id;
    if (level == UnitLevel::kValuationSession) {
      unit += "/" + structure_label(row.session_type, row.values());
    }
    if (seen_units.insert(unit).second) unit_order.push_back(unit);
    auto& cell = cells[{row.session_id, row.period, row.role}];
    cell.unit = unit;
    cell.field = &fields.at(row);
    cell.role = row.role;
    cell.bids.push_back(row.bid);
  }
  struct Sums {
    double played = 0.0, unplayed = 0.0;
    std::size_t n_played = 0, n_cells = 0;
  };
  std::map<std::string, Sums> sums;
  for (const auto& [key, cell] : cells) {
    const auto& payoff = cell.field->of(cell.role);
    std::vector<bool> chosen(payoff.size(), false);
    auto& s = sums[cell.unit];
    for (Bid b : cell.bids) {
      chosen[static_cast<std::size_t>(b)] = true;
      s.played += payoff[static_cast<std::size_t>(b)];
      ++s.n_played;
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < payoff.size(); ++b) {
      if (chosen[b]) continue;
      total += payoff[b];
      ++count;
    }
    if (count == 0) continue;
    s.unplayed += total / static_cast<double>(count);
    ++s.n_cells;
  }
  PlayedVsUnplayed out{{}, 0, 0, 1.0};
  for (const auto& unit : unit_order) {
    const auto& s = sums[unit];
    if (s.n_cells == 0) continue;
    const double played = s.played / static_cast<double>(s.n_played);
    const double unplayed = s.unplayed / static_cast<double>(s.n_cells);
    out.units.push_back({unit, played, unplayed, played - unplayed});
    if (played > unplayed) ++out.positive;
    if (played < unplayed) ++out.negative;
  }
  out.sign_test_p = sign_test(out.positive, out.positive + out.negative);
  return out;
}

// ---------------------------------------------------------------- clogit

namespace {

struct ClogitState {
  double log_likelihood = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;  // minus the Hessian
};

std::size_t covariate_count(std::span<const ChoiceSet> data) {
  if (data.empty()) throw DomainError("conditional logit needs data");
  const auto& first = data.front().covariates;
  if (first.empty()) throw DomainError("choice set without alternatives");
  return first.front().size();
}

ClogitState evaluate(std::span<const ChoiceSet> data, const Eigen::VectorXd& beta,
                     bool derivatives) {
  const auto k = static_cast<Eigen::Index>(beta.size());
  ClogitState state;
  state.gradient = Eigen::VectorXd::Zero(k);
  state.information = Eigen::MatrixXd::Zero(k, k);
  std::vector<double> utility;
  for (const auto& choice : data) {
    const auto m = choice.covariates.size();
    utility.resize(m);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      double u = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) {
        u += beta[c] * choice.covariates[j][static_cast<std::size_t>(c)];
      }
      utility[j] = u;
      top = std::max(top, u);
    }
    double denom = 0.0;
    for (double u : utility) denom += std::exp(u - top);
    state.log_likelihood += utility[choice.chosen] - top - std::log(denom);
    if (!derivatives) continue;
    Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp(utility[j] - top) / denom;
      Eigen::Map<const Eigen::VectorXd> x(choice.covariates[j].data(), k);
      mean_x += p * x;
      second.noalias() += p * x * x.transpose();
    }
    Eigen::Map<const Eigen::VectorXd> chosen(choice.covariates[choice.chosen].data(), k);
    state.gradient += chosen - mean_x;
    state.information += second - mean_x * mean_x.transpose();
  }
  return state;
}

void validate_choices(std::span<const ChoiceSet> data, std::size_t k) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& choice = data[i];
    if (choice.covariates.empty() || choice.chosen >= choice.covariates.size()) {
      throw DomainError(fmt::format("choice set {}: chosen index out of range", i));
    }
    for (const auto& row : choice.covariates) {
      if (row.size() != k) {
        throw DomainError(fmt::format("choice set {}: ragged covariates", i));
      }
    }
  }
}

}  // namespace

double clogit_log_likelihood(std::span<const ChoiceSet> data,
                             std::span<const double> beta) {
  const std::size_t k = covariate_count(data);
  if (beta.size() != k) throw SizeError("beta has the wrong length");
  validate_choices(data, k);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(k));
  return evaluate(data, b, false).log_likelihood;
}

ClogitFit conditional_logit(std::span<const ChoiceSet> data, const ClogitOptions& options) {
  const std::size_t k = covariate_count(data);
  validate_choices(data, k);
  const double n = static_cast<double>(data.size());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  ClogitState state = evaluate(data, beta, true);
  ClogitFit fit{};
  fit.n_choices = data.size();
  fit.log_likelihood_zero = state.log_likelihood;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    fit.gradient_norm = state.gradient.norm() / n;
    if (fit.gradient_norm <= options.tol) {
      fit.converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(state.information);
    if (solver.info() != Eigen::Success || !solver.isPositive() ||
        solver.vectorD().minCoeff() <= 0.0) {
      fit.separated = true;
      break;
    }
    const Eigen::VectorXd step = solver.solve(state.gradient);
    // Below this expected gain the likelihood comparison is rounding noise,
    // so the full step is taken.
    const bool tiny = state.gradient.dot(step) <=
                      1e-10 * std::max(1.0, std::abs(state.log_likelihood));
    double scale = 1.0;
    ClogitState next;
    Eigen::VectorXd candidate;
    // Halve the Newton step until the likelihood does not decrease.
    while (true) {
      candidate = beta + scale * step;
      next = evaluate(data, candidate, true);
      if (tiny || next.log_likelihood >= state.log_likelihood || scale < 1e-10) break;
      scale *= 0.5;
    }
    beta = candidate;
    state = std::move(next);
    fit.iterations = iter + 1;
    if (beta.cwiseAbs().maxCoeff() > options.beta_cap) {
      fit.separated = true;
      break;
    }
  }
  fit.gradient_norm = state.gradient.norm() / n;
  if (!fit.converged && fit.gradient_norm <= options.tol) fit.converged = true;
  // Likelihood pinned at zero means the covariates predict every choice.
  if (state.log_likelihood > -1e-6 * n) fit.separated = true;
  if (fit.separated) {
    fit.converged = false;
    beta = beta.cwiseMax(-options.beta_cap).cwiseMin(options.beta_cap);
  }
  fit.log_likelihood = state.log_likelihood;
  fit.beta.assign(beta.data(), beta.data() + beta.size());
  fit.std_error.assign(k, std::numeric_limits<double>::quiet_NaN());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(state.information);
  if (lu.isInvertible()) {
    const Eigen::MatrixXd covariance = lu.inverse();
    for (std::size_t c = 0; c < k; ++c) {
      const double var = covariance(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
      if (var > 0.0) fit.std_error[c] = std::sqrt(var);
    }
  }
  return fit;
}

std::vector<ChoiceSet> choice_data(std::span<const LogRow> rows,
                                   const ChoiceCovariates& covariates,
                                   const Rational& gamma) {
  const FieldIndex fields(rows, gamma);
  std::vector<ChoiceSet> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto& payoff = fields.at(row).of(row.role);
    ChoiceSet choice{{}, static_cast<std::size_t>(row.bid)};
    choice.covariates.reserve(payoff.size());
    for (std::size_t b = 0; b < payoff.size(); ++b) {
      const double points = payoff[b] + row.item_a;
      std::vector<double> x{points};
      if (covariates.period_interaction) x.push_back(points * row.period);
      if (covariates.round_numbers) {
        x.push_back(b % 10 == 0 ? 1.0 : 0.0);
        x.push_back(b % 5 == 0 && b % 10 != 0 ? 1.0 : 0.0);
      }
      choice.covariates.push_back(std::move(x));
    }
    out.push_back(std::move(choice));
  }
  return out;
}

std::vector<std::string> covariate_names(const ChoiceCovariates& covariates) {
  std::vector<std::string> names{"expected_payoff"};
  if (covariates.period_interaction) names.emplace_back("payoff_x_period");
  if (covariates.round_numbers) {
    names.emplace_back("round10");
    names.emplace_back("round5");
  }
  return names;
}

void write_fit_report(std::ostream& out, const ClogitFit& fit,
                      std::span<const std::string> names) {
  out << fmt::format("n_choices={}\n", fit.n_choices);
  out << fmt::format("iterations={}\n", fit.iterations);
  out << fmt::format("converged={}\n", fit.converged);
  out << fmt::format("separated={}\n", fit.separated);
  out << fmt::format("log_likelihood={:.10g}\n", fit.log_likelihood);
  out << fmt::format("log_likelihood_zero={:.10g}\n", fit.log_likelihood_zero);
  out << fmt::format("gradient_norm={:.3e}\n", fit.gradient_norm);
  for (std::size_t c = 0; c < fit.beta.size(); ++c) {
    const std::string name = c < names.size() ? names[c] : fmt::format("x{}", c);
    out << fmt::format("beta.{}={:.10g}\n", name, fit.beta[c]);
    out << fmt::format("se.{}={:.10g}\n", name, fit.std_error[c]);
  }
  out << "se_kind=observed_information\n";
}

// ---------------------------------------------------------------- permutation

double increasing_blocks(std::span<const std::vector<double>> blocks) {
  double count = 0.0;
  for (const auto& block : blocks) {
    bool increasing = true;
    for (std::size_t i = 1; i < block.size(); ++i) {
      if (!(block[i - 1] < block[i])) increasing = false;
    }
    if (increasing) count += 1.0;
  }
  return count;
}

PermutationResult permutation_test(std::span<const std::vector<double>> blocks,
                                   const BlockStatistic& statistic,
                                   std::uint64_t seed, std::uint64_t exact_limit,
                                   std::uint64_t draws) {
  if (blocks.empty()) throw DomainError("permutation test needs blocks");
  const double observed = statistic(blocks);
  const double slack = 1e-12 * std::max(1.0, std::abs(observed));

  // State count, saturating once past the limit.
  std::uint64_t states = 1;
  for (const auto& block : blocks) {
    for (std::uint64_t f = 2; f <= block.size(); ++f) {
      states = states > exact_limit ? states : states * f;
    }
  }
  std::vector<std::vector<double>> current(blocks.begin(), blocks.end());

  if (states <= exact_limit) {
    std::vector<std::vector<std::vector<double>>> arrangements;
    for (const auto& block : blocks) {
      std::vector<std::size_t> order(block.size());
      std::iota(order.begin(), order.end(), 0);
      std::vector<std::vector<double>> all;
      do {
        std::vector<double> arranged;
        for (std::size_t i : order) arranged.push_back(block[i]);
        all.push_back(std::move(arranged));
      } while (std::next_permutation(order.begin(), order.end()));
      arrangements.push_back(std::move(all));
    }
    std::vector<std::size_t> digit(blocks.size(), 0);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < states; ++s) {
      for (std::size_t b = 0; b < blocks.size(); ++b) current[b] = arrangements[b][digit[b]];
      if (statistic(current) >= observed - slack) ++hits;
      for (std::size_t b = 0; b < digit.size(); ++b) {
        if (++digit[b] < arrangements[b].size()) break;
        digit[b] = 0;
      }
    }
    return {static_cast<double>(hits) / static_cast<double>(states), observed, true, states};
  }

  session::Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      current[b] = blocks[b];
      for (std::size_t i = current[b].size(); i > 1; --i) {
        std::swap(current[b][i - 1], current[b][rng.below(i)]);
      }
    }
    if (statistic(current) >= observed - slack) ++hits;
  }
  return {static_cast<double>(hits + 1) / static_cast<double>(draws + 1), observed,
          false, draws};
}

}  // namespace alpha_auction::analytics
