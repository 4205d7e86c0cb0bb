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

// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 when any
// criterion fails. Positional arguments select criteria by name.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "alpha_auction/analytics.hpp"
#include "alpha_auction/auction.hpp"
#include "alpha_auction/empirical_eq.hpp"
#include "alpha_auction/equilibrium.hpp"
#include "alpha_auction/qre.hpp"
#include "alpha_auction/rational.hpp"
#include "alpha_auction/service/hub.hpp"
#include "alpha_auction/session.hpp"
#include "cli.hpp"
#include "oracle.hpp"

namespace {

using namespace alpha_auction;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool ok;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Verdict()> run;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

AuctionSpec structure_spec(const char* name, Rational alpha) {
  return session::structure_values(name).spec(alpha, Rational(1));
}

// The six efficiency curves, solved once and shared.
struct CurveSet {
  std::vector<std::pair<std::string, qre::SweepCurve>> curves;
  double seconds;
};

const CurveSet& efficiency_curves() {
  static const CurveSet set = [] {
    CurveSet out;
    const auto grid = qre::default_grid();
    const auto start = Clock::now();
    for (const char* structure : {"1A", "2A"}) {
      for (auto [label, alpha] : {std::pair{"WB", Rational(1)}, std::pair{"AB", Rational(1, 2)},
                                  std::pair{"LB", Rational(0)}}) {
        out.curves.emplace_back(fmt::format("{}-{}", label, structure),
                                qre::sweep(structure_spec(structure, alpha), grid));
      }
    }
    out.seconds = seconds_since(start);
    return out;
  }();
  return set;
}

double curve_value(const CurveSet& set, const std::string& id, double lambda) {
  for (const auto& [name, curve] : set.curves) {
    if (name != id) continue;
    for (const auto& row : curve.rows) {
      if (std::abs(row.lambda - lambda) < 1e-9) return row.summary.efficiency_pct;
    }
  }
  throw std::runtime_error(fmt::format("no point {}({})", id, lambda));
}

Verdict efficiency_curves_criterion() {
  const auto& set = efficiency_curves();
  std::vector<std::string> problems;
  std::size_t points = 0;
  for (const auto& [name, curve] : set.curves) points += curve.rows.size();
  if (points != 6 * 31) problems.push_back(fmt::format("{} points", points));

  const std::map<std::string, double> anchors{{"1A", 50.0 + 100.0 / (2 * 161)},
                                              {"2A", 50.0 + 100.0 / (2 * 291)}};
  for (const auto& [name, curve] : set.curves) {
    const double want = anchors.at(name.substr(3));
    const double got = curve.rows.front().summary.efficiency_pct;
    if (std::abs(got - want) > 1e-6) {
      problems.push_back(fmt::format("{}(0)={:.9f} want {:.9f}", name, got, want));
    }
  }

  struct Spot {
    const char* curve;
    double lambda;
    double value;
  };
  const Spot spots[] = {{"WB-1A", 0.1, 77.2},  {"AB-1A", 0.3, 94.3},  {"LB-1A", 0.3, 83.6},
                        {"WB-2A", 0.05, 63.7}, {"AB-2A", 0.15, 83.9}, {"LB-2A", 0.2, 78.0}};
  std::string values;
  for (const auto& spot : spots) {
    const double got = curve_value(set, spot.curve, spot.lambda);
    values += fmt::format(" {}({})={:.2f}", spot.curve, spot.lambda, got);
    if (std::abs(got - spot.value) > 1.0) {
      problems.push_back(fmt::format("{}({})={:.3f} want {}+-1", spot.curve, spot.lambda, got,
                                     spot.value));
    }
  }
  if (set.seconds > 300) problems.push_back(fmt::format("sweep took {:.1f}s", set.seconds));
  if (!problems.empty()) return {false, fmt::format("{}", fmt::join(problems, "; "))};
  return {true, fmt::format("{} points in {:.1f}s;{}", points, set.seconds, values)};
}

oracle::Game oracle_game(const AuctionSpec& spec) {
  return {static_cast<long double>(to_double(spec.alpha)),
          static_cast<long double>(to_double(spec.gamma)), spec.valuations.low(),
          spec.valuations.high(), spec.bids.p_max()};
}

Verdict pure_nash_criterion() {
  std::size_t games = 0;
  std::size_t equilibria = 0;
  std::size_t diagonal = 0;
  std::vector<std::string> problems;
  auto fail = [&](std::string what) {
    if (problems.size() < 5) problems.push_back(std::move(what));
    else if (problems.size() == 5) problems.emplace_back("...");
  };
  for (int vh = 4; vh <= 12; vh += 2) {
    for (int vl = 2; vl < vh; vl += 2) {
      for (int p_max = vh / 2; p_max <= 12; ++p_max) {
        const int c_low = vl / 2;
        const int c_high = vh / 2;
        const int surplus = c_high - c_low;
        for (Rational alpha : {Rational(1), Rational(0)}) {
          const AuctionSpec spec(alpha, Rational(1), ValuationPair(vl, vh), BidDomain(p_max));
          ++games;
          const auto found = equilibrium::enumerate_pure_nash(spec);
          const auto brute = oracle::pure_nash(oracle_game(spec));
          const auto tag = fmt::format("alpha={} v=({},{}) p={}", format_rational(alpha), vl, vh,
                                       p_max);
          if (found.size() != brute.size()) {
            fail(fmt::format("{}: {} equilibria, brute force {}", tag, found.size(),
                             brute.size()));
            continue;
          }
          std::set<Rational> transfers;
          for (std::size_t i = 0; i < found.size(); ++i) {
            const auto& eq = found[i];
            ++equilibria;
            if (eq.low != brute[i].first || eq.high != brute[i].second) {
              fail(fmt::format("{}: ({},{}) differs from brute force", tag, eq.low, eq.high));
            }
            const auto outcome = resolve(spec, eq.low, eq.high).outcome;
            transfers.insert(outcome.transfer);
            const Rational share = outcome.transfer - c_low;
            if (outcome.payoff_low != c_low + share ||
                outcome.payoff_high != c_high + (surplus - share)) {
              fail(fmt::format("{}: payoffs at ({},{})", tag, eq.low, eq.high));
            }
          }
          std::set<Rational> range;
          for (int t = c_low; t <= c_high; ++t) range.insert(Rational(t));
          if (transfers != range) fail(fmt::format("{}: transfer set differs from range", tag));
        }
        const AuctionSpec average(Rational(1, 2), Rational(1), ValuationPair(vl, vh),
                                  BidDomain(p_max));
        for (Bid p = c_low; p <= c_high; ++p) {
          ++diagonal;
          if (equilibrium::strictness(average, p, p) != equilibrium::Strictness::kStrict) {
            fail(fmt::format("AB v=({},{}) p={}: ({},{}) not strict", vl, vh, p_max, p, p));
          }
        }
      }
    }
  }
  if (!problems.empty()) return {false, fmt::format("{}", fmt::join(problems, "; "))};
  return {true, fmt::format("{} WB/LB games, {} equilibria, {} AB diagonal profiles strict",
                            games, equilibria, diagonal)};
}

Verdict monotonicity_criterion() {
  std::size_t points = 0;
  std::vector<std::string> problems;
  auto check = [&](const std::string& tag, const AuctionSpec& spec, const qre::QrePoint& point) {
    ++points;
    const auto report = empirical::is_weakly_payoff_monotone(spec, point.profile, 0.0, 0.0);
    if (!report.ok && problems.size() < 5) {
      problems.push_back(
          fmt::format("{} lambda={}: {} violations", tag, point.lambda, report.violations.size()));
    }
  };
  for (const auto& [name, curve] : efficiency_curves().curves) {
    for (const auto& point : curve.points) {
      if (point.lambda > 0) check(name, curve.spec, point);
    }
  }
  const std::vector<double> grid{0, 0.25, 0.5, 1, 2, 4};
  for (Rational alpha : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)}) {
    for (auto [vl, vh, p_max] : {std::tuple{4, 8, 8}, std::tuple{2, 10, 12},
                                 std::tuple{6, 12, 9}}) {
      const AuctionSpec spec(alpha, Rational(1), ValuationPair(vl, vh), BidDomain(p_max));
      const auto curve = qre::sweep(spec, grid);
      for (const auto& point : curve.points) {
        if (point.lambda > 0) {
          check(fmt::format("alpha={} v=({},{})", format_rational(alpha), vl, vh), spec, point);
        }
      }
    }
  }
  if (points < 200) problems.push_back(fmt::format("only {} points", points));
  if (!problems.empty()) return {false, fmt::format("{}", fmt::join(problems, "; "))};
  return {true, fmt::format("{} converged points with lambda > 0, zero tolerance", points)};
}

// Continuation grid for the tail check: fine near zero, coarser where the
// solver is slow and the profile moves little.
std::vector<double> tail_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  for (int i = 5; i <= 64; ++i) grid.push_back(0.25 * i);
  return grid;
}

Verdict tail_criterion() {
  const auto grid = tail_grid();
  std::vector<std::string> parts;
  bool ok = true;
  for (auto [label, alpha] : {std::pair{"WB-1A", Rational(1)}, std::pair{"LB-1A", Rational(0)}}) {
    const auto spec = structure_spec("1A", alpha);
    const auto curve = qre::sweep(spec, grid);
    std::vector<MixedProfile> profiles;
    for (const auto& point : curve.points) profiles.push_back(point.profile);
    const auto report = empirical::check_path(spec, grid, profiles, 0.05);
    if (!report.tail_start) {
      ok = false;
      parts.push_back(fmt::format("{}: distance never below 0.05 (last {:.4f} at lambda={})",
                                  label, report.points.back().distance,
                                  report.points.back().lambda));
      continue;
    }
    const double c_low = spec.valuations.net(Role::kLow);
    std::size_t bad = 0;
    for (std::size_t i = *report.tail_start; i < report.points.size(); ++i) {
      const auto& point = report.points[i];
      bool holds = point.statements[1].holds && point.statements[2].holds;
      if (alpha == Rational(1)) holds = holds && point.mean_bid_low < c_low + 1;
      if (!holds) ++bad;
    }
    ok = ok && bad == 0;
    const auto& start = report.points[*report.tail_start];
    parts.push_back(fmt::format("{}: tail from lambda={} ({} points, {} failing)", label,
                                start.lambda, report.points.size() - *report.tail_start, bad));
  }
  return {ok, fmt::format("{}", fmt::join(parts, "; "))};
}

session::SessionConfig bot_config(std::string id, Rational alpha, int type, int n, int periods,
                                  std::uint64_t seed, const session::BotPolicy& policy) {
  auto config = session::SessionConfig::make(std::move(id), alpha, type, n, seed);
  config.periods = periods;
  config.seats.assign(static_cast<std::size_t>(n), session::SeatAssignment{policy});
  return config;
}

// All simulated logs produced by the suite, kept for the log validations.
std::vector<std::vector<analytics::LogRow>>& simulated_logs() {
  static std::vector<std::vector<analytics::LogRow>> logs;
  return logs;
}

std::vector<analytics::LogRow> simulate(const session::SessionConfig& config) {
  const auto result = session::run_session(config);
  auto rows = analytics::to_rows(config, result.records);
  simulated_logs().push_back(rows);
  return rows;
}

// Mean standardized payoff of HV minus LV.
double payoff_gap(std::span<const analytics::LogRow> rows) {
  double high = 0;
  double low = 0;
  for (const auto& row : analytics::summary_table(rows)) {
    (row.role == Role::kHigh ? high : low) = row.mean_std_payoff;
  }
  return high - low;
}

Verdict bias_criterion() {
  const auto policy = session::BotPolicy::qre(0.3);
  int wb_ok = 0;
  int lb_ok = 0;
  int ab_ok = 0;
  std::vector<std::string> gaps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double wb = payoff_gap(simulate(bot_config("wb", Rational(1), 3, 20, 40, seed, policy)));
    const double ab =
        payoff_gap(simulate(bot_config("ab", Rational(1, 2), 3, 20, 40, seed, policy)));
    const double lb = payoff_gap(simulate(bot_config("lb", Rational(0), 3, 20, 40, seed, policy)));
    wb_ok += wb > 0;
    lb_ok += lb < 0;
    ab_ok += std::abs(ab) < std::abs(wb) && std::abs(ab) < std::abs(lb);
    gaps.push_back(fmt::format("{:+.3f}/{:+.3f}/{:+.3f}", wb, ab, lb));
  }
  const bool ok = wb_ok >= 9 && lb_ok >= 9 && ab_ok >= 8;
  return {ok, fmt::format("HV>LV in WB {}/10, HV<LV in LB {}/10, AB smallest {}/10; "
                          "gaps WB/AB/LB by seed: {}",
                          wb_ok, lb_ok, ab_ok, fmt::join(gaps, " "))};
}

Verdict standardization_criterion() {
  // Adds a spread of structures and policies to the bias logs.
  for (Rational alpha : {Rational(1), Rational(1, 2), Rational(0), Rational(1, 4)}) {
    for (int type = 1; type <= 4; ++type) {
      for (const char* policy : {"uniform", "qre:0.1", "ebr"}) {
        simulate(bot_config("std", alpha, type, 8, 20, 500 + type,
                            session::BotPolicy::parse(policy)));
      }
    }
  }
  std::size_t pairs = 0;
  std::size_t sum_errors = 0;
  std::size_t equilibrium_errors = 0;
  for (const auto& rows : simulated_logs()) {
    for (const auto& pair : analytics::pair_observations(rows)) {
      ++pairs;
      const auto m = analytics::standardize(pair);
      if (m.std_payoff_low + m.std_payoff_high != Rational(m.efficient ? 1 : -1)) ++sum_errors;
      if (m.equilibrium_outcome && !m.efficient) ++equilibrium_errors;
    }
  }
  return {sum_errors == 0 && equilibrium_errors == 0,
          fmt::format("{} logs, {} pair-periods; sum errors {}, inefficient equilibrium "
                      "outcomes {}",
                      simulated_logs().size(), pairs, sum_errors, equilibrium_errors)};
}

// Choice sets drawn from a logit model over uniform payoffs.
std::vector<analytics::ChoiceSet> logit_choices(double beta, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kAlternatives = 41;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> payoff(0.0, 100.0);
  std::vector<analytics::ChoiceSet> data(n);
  for (auto& choice : data) {
    std::vector<double> weight(kAlternatives);
    for (std::size_t j = 0; j < kAlternatives; ++j) {
      const double x = payoff(rng);
      choice.covariates.push_back({x});
      weight[j] = std::exp(beta * x);
    }
    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
    choice.chosen = pick(rng);
  }
  return data;
}

Verdict clogit_criterion() {
  constexpr double kBeta = 0.042;
  constexpr std::size_t kChoices = 50000;
  bool ok = true;
  std::vector<std::string> parts;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto fit = analytics::conditional_logit(logit_choices(kBeta, kChoices, seed));
    // Data drawn from the fitted model must give back the fitted value.
    const auto refit =
        analytics::conditional_logit(logit_choices(fit.beta[0], kChoices, seed + 1000));
    const bool good = fit.converged && refit.converged && std::abs(fit.beta[0] - kBeta) <= 0.005 &&
                      std::abs(refit.beta[0] - fit.beta[0]) <= 0.005 &&
                      fit.log_likelihood >= fit.log_likelihood_zero &&
                      refit.log_likelihood >= refit.log_likelihood_zero;
    ok = ok && good;
    parts.push_back(fmt::format("seed {}: beta={:.5f} refit={:.5f} ll-ll0={:.1f}", seed,
                                fit.beta[0], refit.beta[0],
                                fit.log_likelihood - fit.log_likelihood_zero));
  }
  return {ok, fmt::format("{}", fmt::join(parts, "; "))};
}

Verdict permutation_criterion() {
  auto unanimous = [](int count) {
    std::vector<std::vector<double>> blocks;
    for (int i = 0; i < count; ++i) blocks.push_back({-1.0 * i, 0.5, 3.0 + i});
    return blocks;
  };
  const auto six = analytics::permutation_test(unanimous(6), analytics::increasing_blocks);
  const auto four = analytics::permutation_test(unanimous(4), analytics::increasing_blocks);
  const bool ok = six.exact && four.exact && six.states == 46656 && four.states == 1296 &&
                  six.p_value == 1.0 / 46656 && four.p_value == 1.0 / 1296;
  return {ok, fmt::format("six triples p={:.10g} over {} states; four triples p={:.10g} over {} "
                          "states",
                          six.p_value, six.states, four.p_value, four.states)};
}

std::string run_tool(const std::vector<std::string>& args, int* status) {
  std::ostringstream out;
  std::ostringstream err;
  *status = cli::run_cli(args, out, err);
  return out.str() + err.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// analyze and replay --events must print the same bytes, twice over.
std::string compare_replay(const fs::path& csv, const fs::path& events) {
  int status = 0;
  const auto analyzed = run_tool({"analyze", "--log", csv.string()}, &status);
  if (status != 0) return fmt::format("analyze {} exited {}", csv.string(), status);
  for (int round = 0; round < 2; ++round) {
    const auto replayed =
        run_tool({"replay", "--log", csv.string(), "--events", events.string()}, &status);
    if (status != 0) return fmt::format("replay {} exited {}: {}", csv.string(), status, replayed);
    if (replayed != analyzed) return fmt::format("replay {} summary differs", csv.string());
  }
  return {};
}

Verdict determinism_criterion() {
  const auto dir = fs::temp_directory_path() / fmt::format("alpha_auction_acceptance_{}",
                                                           std::random_device{}());
  fs::create_directories(dir);
  std::vector<std::string> problems;
  std::size_t sessions = 0;

  for (const char* auction : {"wb", "ab", "lb"}) {
    for (const char* type : {"1", "4"}) {
      const auto id = fmt::format("sim_{}_{}", auction, type);
      for (const char* sub : {"a", "b"}) {
        int status = 0;
        run_tool({"simulate", "--session-id", id, "--auction", auction, "--type", type, "--n",
                  "10", "--periods", "12", "--seed", "42", "--bot", "qre:0.2", "--out-dir",
                  (dir / sub).string()},
                 &status);
        if (status != 0) problems.push_back(fmt::format("simulate {} exited {}", id, status));
      }
      const auto csv = dir / "a" / (id + ".csv");
      const auto events = dir / "a" / (id + ".events.jsonl");
      if (read_file(csv) != read_file(dir / "b" / (id + ".csv")) ||
          read_file(events) != read_file(dir / "b" / (id + ".events.jsonl"))) {
        problems.push_back(fmt::format("{}: two runs with one seed differ", id));
      }
      if (auto problem = compare_replay(csv, events); !problem.empty()) {
        problems.push_back(problem);
      }
      ++sessions;
    }
  }

  // A served session with one scripted human seat.
  {
    service::HubOptions options;
    options.token_seed = 5;
    service::ServiceHub hub(options);
    const auto created = hub.handle_text(
        R"({"kind":"admin_create","payload":{"session_id":"served","auction":"ab",)"
        R"("session_type":2,"n_subjects":6,"periods":8,"humans":1,"bot":"qre:0.3","seed":9}})");
    const auto reply = service::WireMessage::parse(created);
    const auto token = reply.payload.at("seat_tokens").at(0).get<std::string>();
    auto send = [&](service::Kind kind, service::Json payload) {
      service::WireMessage m;
      m.kind = kind;
      m.session_id = "served";
      m.seat_token = token;
      m.payload = std::move(payload);
      return hub.handle(m);
    };
    auto state = send(service::Kind::kJoin, service::Json::object()).payload;
    int period = 0;
    while (state.at("phase") == "bidding") {
      const int cap = state.at("bid_max").get<int>();
      send(service::Kind::kSubmitBid, {{"bid", (37 * ++period) % (cap + 1)}, {"guess", 11}});
      send(service::Kind::kRevise, service::Json::object());
      send(service::Kind::kSubmitBid, {{"bid", (53 * period) % (cap + 1)}});
      state = send(service::Kind::kConfirm, service::Json::object()).payload;
    }
    const auto csv_text = hub.period_csv("served");
    const auto events_text = hub.event_log("served");
    if (!csv_text || !events_text) {
      problems.push_back("served session did not finish");
    } else {
      write_file(dir / "served.csv", *csv_text);
      write_file(dir / "served.events.jsonl", *events_text);
      if (auto problem = compare_replay(dir / "served.csv", dir / "served.events.jsonl");
          !problem.empty()) {
        problems.push_back(problem);
      }
      ++sessions;
      // A tampered log must be refused.
      auto tampered = *events_text;
      const auto at = tampered.rfind("\"bid\":");
      if (at != std::string::npos) tampered.insert(at + 6, "1");
      write_file(dir / "tampered.events.jsonl", tampered);
      int status = 0;
      run_tool({"replay", "--log", (dir / "served.csv").string(), "--events",
                (dir / "tampered.events.jsonl").string()},
               &status);
      if (status == 0) problems.push_back("tampered event log was accepted");
    }
  }
  std::error_code ignored;
  fs::remove_all(dir, ignored);
  if (!problems.empty()) return {false, fmt::format("{}", fmt::join(problems, "; "))};
  return {true, fmt::format("{} sessions (6 simulated, 1 served) replay to identical summaries",
                            sessions)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"qre-efficiency-curves", efficiency_curves_criterion},
      {"pure-nash-structure", pure_nash_criterion},
      {"logit-monotonicity", monotonicity_criterion},
      {"qre-tail-windows", tail_criterion},
      {"bias-direction", bias_criterion},
      {"standardization-identities", standardization_criterion},
      {"clogit-recovery", clogit_criterion},
      {"permutation-arithmetic", permutation_criterion},
      {"replay-determinism", determinism_criterion},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  for (const auto& name : selected) {
    if (std::none_of(criteria.begin(), criteria.end(),
                     [&](const Criterion& c) { return c.name == name; })) {
      std::cerr << "unknown criterion " << name << "\n";
      return 2;
    }
  }
  int failed = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.name)) continue;
    const auto start = Clock::now();
    Verdict outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !outcome.ok;
    std::cout << fmt::format("{} {} ({:.1f}s): {}\n", outcome.ok ? "PASS" : "FAIL",
                             criterion.name, seconds_since(start), outcome.detail)
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
