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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "alpha_auction/auction.hpp"
#include "alpha_auction/empirical_eq.hpp"
#include "alpha_auction/equilibrium.hpp"
#include "alpha_auction/errors.hpp"
#include "alpha_auction/qre.hpp"
#include "alpha_auction/session.hpp"
#include "alpha_auction/service/http.hpp"

namespace alpha_auction::cli {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto next = text.find(sep, start);
    out.emplace_back(text.substr(start, next - start));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return out;
}

double parse_number(std::string_view text, std::string_view what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(std::string(text), &used);
    if (used == text.size() && std::isfinite(value)) return value;
  } catch (const std::exception&) {
  }
  throw DomainError(fmt::format("{} '{}' is not a number", what, text));
}

// Valuation flags shared by the solver subcommands.
struct SpecFlags {
  std::string auction = "wb";
  std::string structure;
  int vl = 0;
  int vh = 0;
  int pmax = 0;
  std::string gamma = "1";

  void add(CLI::App* app, bool auction_list = false) {
    app->add_option("--auction", auction,
                    auction_list ? "wb, ab, lb or an alpha; comma-separated list allowed"
                                 : "wb, ab, lb or an alpha")
        ->capture_default_str();
    app->add_option("--structure", structure,
                    auction_list ? "1A, 1B, 2A, 2B, 3 or 4; comma-separated list allowed"
                                 : "1A, 1B, 2A, 2B, 3 or 4");
    app->add_option("--vl", vl, "low valuation (with --vh and --pmax)");
    app->add_option("--vh", vh, "high valuation");
    app->add_option("--pmax", pmax, "largest bid");
    app->add_option("--gamma", gamma, "probability that HV wins a tie")->capture_default_str();
  }

  std::vector<AuctionSpec> specs() const {
    std::vector<AuctionSpec> out;
    const Rational g = parse_rational(gamma);
    for (const auto& name : split(auction, ',')) {
      const Rational alpha = parse_alpha(name);
      if (!structure.empty()) {
        for (const auto& s : split(structure, ',')) {
          out.push_back(session::structure_values(s).spec(alpha, g));
        }
      } else {
        if (vl == 0 || vh == 0 || pmax == 0) {
          throw DomainError("give --structure or all of --vl, --vh, --pmax");
        }
        out.emplace_back(alpha, g, ValuationPair(vl, vh), BidDomain(pmax));
      }
    }
    return out;
  }

  AuctionSpec spec() const {
    const auto all = specs();
    if (all.size() != 1) throw DomainError("this command takes a single auction and structure");
    return all.front();
  }
};

// Output file or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(fmt::format("cannot write {}", path));
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

qre::SolverOptions solver_options(double tol, int max_iter) {
  qre::SolverOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return options;
}

// Continuation grid 0, step, 2 step, ... up to and including lambda.
std::vector<double> continuation_grid(double lambda, double step) {
  std::vector<double> grid{0.0};
  if (lambda <= 0) return grid;
  for (int i = 1;; ++i) {
    const double x = std::round(i * step * 1e9) / 1e9;
    if (x >= lambda - 1e-12) break;
    grid.push_back(x);
  }
  grid.push_back(lambda);
  return grid;
}

void write_spec_line(std::ostream& out, const AuctionSpec& spec) {
  out << fmt::format("auction={} alpha={} gamma={} v_l={} v_h={} p_max={}\n",
                     auction_label(spec.alpha), format_rational(spec.alpha),
                     format_rational(spec.gamma), spec.valuations.low(),
                     spec.valuations.high(), spec.bids.p_max());
}

std::vector<analytics::LogRow> read_logs(const std::vector<std::string>& paths) {
  std::vector<analytics::LogRow> rows;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read {}", path));
    try {
      auto part = analytics::read_period_csv(in);
      rows.insert(rows.end(), part.begin(), part.end());
    } catch (const DataError& error) {
      throw DataError(fmt::format("{}: {}", path, error.what()));
    }
  }
  return rows;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read {}", path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// ------------------------------------------------------------ subcommands

struct SolveQre {
  SpecFlags spec;
  double lambda = 0;
  double step = 0.01;
  double tol = 1e-10;
  int max_iter = 100000;
  std::string profile_out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("solve-qre", "logit QRE at one lambda");
    spec.add(app);
    app->add_option("--lambda", lambda, "precision")->required()->check(CLI::NonNegativeNumber);
    app->add_option("--step", step, "continuation step from lambda = 0")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "sup-norm fixed-point tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap per grid point")->capture_default_str();
    app->add_option("--profile-out", profile_out, "write role,bid,probability CSV");
  }

  int run(std::ostream& out) const {
    const auto s = spec.spec();
    const auto grid = continuation_grid(lambda, step);
    const auto curve = qre::sweep(s, grid, true, solver_options(tol, max_iter));
    const auto& point = curve.points.back();
    const auto& row = curve.rows.back();
    write_spec_line(out, s);
    out << fmt::format("lambda={} iterations={} residual={:.3e}\n", point.lambda,
                       point.iterations, point.residual);
    out << fmt::format(
        "efficiency_pct={:.6f} mean_std_bid_lv={:.6f} mean_std_bid_hv={:.6f} "
        "std_payoff_lv={:.6f} std_payoff_hv={:.6f}\n",
        row.summary.efficiency_pct, row.summary.mean_std_bid_low,
        row.summary.mean_std_bid_high, row.summary.std_payoff_low,
        row.summary.std_payoff_high);
    if (!profile_out.empty()) {
      Sink file(profile_out, out);
      *file << "role,bid,probability\n";
      for (Role role : kRoles) {
        const auto& dist = role == Role::kLow ? point.profile.low : point.profile.high;
        for (std::size_t b = 0; b < dist.size(); ++b) {
          *file << fmt::format("{},{},{:.17g}\n", to_string(role), b, dist[b]);
        }
      }
    }
    return kExitOk;
  }
};

struct Sweep {
  SpecFlags spec;
  std::string lambda = "0:0.01:0.30";
  bool cold = false;
  double tol = 1e-10;
  int max_iter = 100000;
  std::string out_path;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("sweep", "QRE summaries over a lambda grid (CSV)");
    spec.add(app, true);
    app->add_option("--lambda", lambda, "grid start:step:end")->capture_default_str();
    app->add_flag("--no-continuation", cold, "solve every point from the uniform profile");
    app->add_option("--tol", tol, "sup-norm fixed-point tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap per grid point")->capture_default_str();
    app->add_option("--out", out_path, "CSV path (default stdout)");
  }

  int run(std::ostream& out) const {
    const auto wanted = parse_grid(lambda);
    std::vector<double> grid = wanted;
    const bool prepend = grid.front() > 0;
    if (prepend) grid.insert(grid.begin(), 0.0);
    Sink sink(out_path, out);
    bool header = true;
    for (const auto& s : spec.specs()) {
      auto curve = qre::sweep(s, grid, !cold, solver_options(tol, max_iter));
      if (prepend) {
        curve.rows.erase(curve.rows.begin());
        curve.points.erase(curve.points.begin());
      }
      qre::write_sweep_csv(*sink, curve, header);
      header = false;
    }
    return kExitOk;
  }
};

struct Nash {
  SpecFlags spec;
  int cap = equilibrium::kDefaultEnumerationCap;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("nash", "pure Nash equilibria by enumeration (CSV)");
    spec.add(app);
    app->add_option("--cap", cap, "largest p_max accepted")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto s = spec.spec();
    out << "bid_low,bid_high,winner,transfer,payoff_lv,payoff_hv,strictness\n";
    for (const auto& eq : equilibrium::enumerate_pure_nash(s, cap)) {
      const auto outcome = resolve(s, eq.low, eq.high).outcome;
      out << fmt::format("{},{},{},{},{},{},{}\n", eq.low, eq.high, to_string(outcome.winner),
                         format_rational(outcome.transfer),
                         format_rational(outcome.payoff_low),
                         format_rational(outcome.payoff_high),
                         equilibrium::to_string(equilibrium::strictness(s, eq.low, eq.high)));
    }
    return kExitOk;
  }
};

struct EeCheck {
  SpecFlags spec;
  std::string lambda = "0:0.05:6";
  double threshold = 0.05;
  std::string variant = "verbatim";
  double tol = 1e-10;
  int max_iter = 100000;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand(
        "ee-check", "monotonicity and bias statements along a QRE path");
    spec.add(app);
    app->add_option("--lambda", lambda, "grid start:step:end")->capture_default_str();
    app->add_option("--threshold", threshold, "distance that starts the tail")
        ->capture_default_str();
    app->add_option("--variant", variant, "cutoff formula")
        ->check(CLI::IsMember({"verbatim", "mirror"}))
        ->capture_default_str();
    app->add_option("--tol", tol, "sup-norm fixed-point tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap per grid point")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto s = spec.spec();
    auto grid = parse_grid(lambda);
    if (grid.front() > 0) grid.insert(grid.begin(), 0.0);
    const auto curve = qre::sweep(s, grid, true, solver_options(tol, max_iter));
    std::vector<MixedProfile> profiles;
    for (const auto& point : curve.points) profiles.push_back(point.profile);
    const auto report = empirical::check_path(
        s, grid, profiles, threshold,
        variant == "mirror" ? empirical::CutoffVariant::kMirror
                            : empirical::CutoffVariant::kVerbatim);
    write_spec_line(out, s);
    empirical::write_report(out, report);
    const bool monotone = std::all_of(report.points.begin() + 1, report.points.end(),
                                      [](const auto& p) { return p.monotone; });
    const bool ok = monotone && (!report.tail_start || report.tail_holds);
    out << fmt::format("verdict={}\n", ok ? "pass" : "fail");
    return ok ? kExitOk : kExitFailure;
  }
};

struct Simulate {
  std::string session_id = "sim";
  std::string auction = "wb";
  int type = 4;
  int n = 20;
  int periods = 40;
  std::uint64_t seed = 0;
  std::string bot = "qre:0.3";
  std::string gamma = "1";
  std::string out_dir;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("simulate", "all-bot session; period CSV and event log");
    app->add_option("--session-id", session_id, "session id")->capture_default_str();
    app->add_option("--auction", auction, "wb, ab, lb or an alpha")->capture_default_str();
    app->add_option("--type", type, "session type 1-4")->capture_default_str();
    app->add_option("--n", n, "subjects (even, >= 4)")->capture_default_str();
    app->add_option("--periods", periods, "periods")->capture_default_str();
    app->add_option("--seed", seed, "rng seed")->capture_default_str();
    app->add_option("--bot", bot, "uniform, qre:<lambda>, ebr or fixed:<bid>")
        ->capture_default_str();
    app->add_option("--gamma", gamma, "probability that HV wins a tie")->capture_default_str();
    app->add_option("--out-dir", out_dir,
                    "write <id>.csv and <id>.events.jsonl here (default: CSV to stdout)");
  }

  int run(std::ostream& out) const {
    auto config = session::SessionConfig::make(session_id, parse_alpha(auction), type, n, seed);
    config.periods = periods;
    config.gamma = parse_rational(gamma);
    config.seats.assign(static_cast<std::size_t>(n),
                        session::SeatAssignment{session::BotPolicy::parse(bot)});
    const auto result = session::run_session(config);
    if (out_dir.empty()) {
      session::write_period_csv(out, config, result.records);
      return kExitOk;
    }
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::ofstream csv(dir / (session_id + ".csv"), std::ios::binary);
    session::write_period_csv(csv, config, result.records);
    std::ofstream events(dir / (session_id + ".events.jsonl"), std::ios::binary);
    session::write_event_log(events, result.event_log);
    out << fmt::format("wrote {} and {}\n", (dir / (session_id + ".csv")).string(),
                       (dir / (session_id + ".events.jsonl")).string());
    return kExitOk;
  }
};

struct Analyze {
  std::vector<std::string> logs;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string histogram_out;
  std::string played_out;
  std::string unit = "session";
  std::string clogit_out;
  bool period_interaction = false;
  bool round_numbers = false;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("analyze", "summary statistics from period CSVs");
    app->add_option("--log", logs, "period CSV (repeatable)")->required();
    app->add_option("--seed", seed, "Monte Carlo seed for the ordering test")
        ->capture_default_str();
    app->add_option("--out", out_path, "summary path (default stdout)");
    app->add_option("--histogram-out", histogram_out, "ventile histogram CSV");
    app->add_option("--played-out", played_out, "played vs unplayed report");
    app->add_option("--unit", unit, "unit for --played-out")
        ->check(CLI::IsMember({"session", "valuation-session"}))
        ->capture_default_str();
    app->add_option("--clogit-out", clogit_out, "conditional logit fit report");
    app->add_flag("--period-interaction", period_interaction,
                  "clogit: add expected payoff x period");
    app->add_flag("--round-numbers", round_numbers, "clogit: add round-number dummies");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto rows = read_logs(logs);
    {
      Sink sink(out_path, out);
      write_log_summary(*sink, rows, seed);
    }
    if (!histogram_out.empty()) {
      Sink sink(histogram_out, out);
      analytics::write_histogram_csv(*sink, analytics::ventile_histogram(rows));
    }
    if (!played_out.empty()) {
      Sink sink(played_out, out);
      const auto result = analytics::played_vs_unplayed(
          rows, unit == "session" ? analytics::UnitLevel::kSession
                                  : analytics::UnitLevel::kValuationSession);
      *sink << "unit,played,unplayed,difference\n";
      for (const auto& u : result.units) {
        *sink << fmt::format("{},{:.6f},{:.6f},{:.6f}\n", u.unit, u.played, u.unplayed,
                             u.difference);
      }
      *sink << fmt::format("# sign_test positive={} negative={} p_value={:.6g}\n",
                           result.positive, result.negative, result.sign_test_p);
    }
    if (!clogit_out.empty()) {
      const analytics::ChoiceCovariates cov{period_interaction, round_numbers};
      const auto fit = analytics::conditional_logit(analytics::choice_data(rows, cov));
      Sink sink(clogit_out, out);
      analytics::write_fit_report(*sink, fit, analytics::covariate_names(cov));
      if (!fit.converged) {
        err << fmt::format(
            "conditional logit did not converge: iterations={} gradient_norm={:.3e} "
            "separated={}\n",
            fit.iterations, fit.gradient_norm, fit.separated ? 1 : 0);
        return kExitNoConvergence;
      }
    }
    return kExitOk;
  }
};

struct Replay {
  std::vector<std::string> logs;
  std::string events;
  std::uint64_t seed = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand(
        "replay", "re-derive the summary of a session; with --events, replay its inputs");
    app->add_option("--log", logs, "period CSV (repeatable)")->required();
    app->add_option("--events", events,
                    "event log; the session is rebuilt and must reproduce both files");
    app->add_option("--seed", seed, "Monte Carlo seed for the ordering test")
        ->capture_default_str();
  }

  int run(std::ostream& out, std::ostream& err) const {
    auto rows = read_logs(logs);
    if (!events.empty()) {
      const auto lines = read_lines(events);
      const auto replayed = session::replay_events(lines);
      if (replayed.event_log != lines) {
        err << "replay: event log differs from the replayed session\n";
        return kExitFailure;
      }
      const auto head = nlohmann::json::parse(lines.front());
      auto config = session::SessionConfig::make(
          head.at("session_id").get<std::string>(),
          parse_rational(head.at("alpha").get<std::string>()),
          head.at("session_type").get<int>(), head.at("n_subjects").get<int>(), 0);
      const auto replayed_rows = analytics::to_rows(config, replayed.records);
      std::ostringstream given;
      std::ostringstream again;
      session::write_period_csv(again, config, replayed.records);
      for (const auto& path : logs) {
        std::ifstream in(path, std::ios::binary);
        given << in.rdbuf();
      }
      if (logs.size() != 1 || given.str() != again.str()) {
        err << "replay: period CSV differs from the replayed session\n";
        return kExitFailure;
      }
      rows = replayed_rows;
    }
    write_log_summary(out, rows, seed);
    return kExitOk;
  }

};

struct Serve {
  std::string listen;
  std::string output_dir = "sessions";
  std::string admin_token;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand(
        "serve", fmt::format("host live sessions over HTTP (listen address from {})",
                             service::kListenEnv));
    app->add_option("--listen", listen, "host:port, overrides the environment");
    app->add_option("--output-dir", output_dir, "finished session logs")->capture_default_str();
    app->add_option("--admin-token", admin_token,
                    "required on admin messages (default ALPHA_AUCTION_ADMIN_TOKEN)");
  }

  int run(std::ostream& out) const;
};

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

int Serve::run(std::ostream& out) const {
  const auto address = listen.empty() ? service::listen_address_from_env()
                                      : service::ListenAddress::parse(listen);
  service::HubOptions options;
  options.output_dir = output_dir;
  options.admin_token = admin_token;
  if (options.admin_token.empty()) {
    if (const char* env = std::getenv("ALPHA_AUCTION_ADMIN_TOKEN")) options.admin_token = env;
  }
  service::ServiceHub hub(options);
  service::HttpService http(hub);
  const int port = http.bind(address);
  out << fmt::format("listening on {}:{}\n", address.host, port) << std::flush;

  g_stop_requested = false;
  auto* previous_int = std::signal(SIGINT, on_stop_signal);
  auto* previous_term = std::signal(SIGTERM, on_stop_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (g_stop_requested) {
        http.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  http.run();
  done = true;
  watcher.join();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  hub.shutdown();
  out << fmt::format("persisted {} sessions to {}\n", hub.session_ids().size(), output_dir);
  return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw DomainError(fmt::format("grid '{}' is not start:step:end", text));
  const double start = parse_number(parts[0], "grid start");
  const double step = parse_number(parts[1], "grid step");
  const double end = parse_number(parts[2], "grid end");
  if (start < 0 || !(step > 0) || end < start) {
    throw DomainError(fmt::format("grid '{}' needs 0 <= start <= end and step > 0", text));
  }
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    // Round away representation noise so 0.1 prints as 0.1.
    grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return grid;
}

void write_log_summary(std::ostream& out, std::span<const analytics::LogRow> rows,
                       std::uint64_t seed) {
  const auto table = analytics::summary_table(rows);
  analytics::write_summary_csv(out, table);

  // structure -> role -> label -> mean standardized payoff
  std::map<std::string, std::map<Role, std::map<std::string, double>>> cells;
  for (const auto& row : table) cells[row.structure][row.role][row.auction] = row.mean_std_payoff;
  std::vector<std::vector<double>> blocks;
  for (const auto& [structure, roles] : cells) {
    for (const auto& [role, by_auction] : roles) {
      if (!by_auction.count("WB") || !by_auction.count("AB") || !by_auction.count("LB")) continue;
      if (role == Role::kHigh) {
        blocks.push_back({by_auction.at("LB"), by_auction.at("AB"), by_auction.at("WB")});
      } else {
        blocks.push_back({by_auction.at("WB"), by_auction.at("AB"), by_auction.at("LB")});
      }
    }
  }
  if (blocks.empty()) return;
  const auto result = analytics::permutation_test(blocks, analytics::increasing_blocks, seed);
  out << fmt::format("# ordering blocks={} increasing={} p_value={:.10g} exact={} states={}\n",
                     blocks.size(), result.observed, result.p_value, result.exact ? 1 : 0,
                     result.states);
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app("Solver, simulator and session service for alpha-auctions.", "alpha-auction");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  SolveQre solve;
  Sweep sweep;
  Nash nash;
  EeCheck ee;
  Simulate simulate;
  Analyze analyze;
  Replay replay;
  Serve serve;
  solve.add(app);
  sweep.add(app);
  nash.add(app);
  ee.add(app);
  simulate.add(app);
  analyze.add(app);
  replay.add(app);
  serve.add(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "solve-qre") return solve.run(out);
    if (name == "sweep") return sweep.run(out);
    if (name == "nash") return nash.run(out);
    if (name == "ee-check") return ee.run(out);
    if (name == "simulate") return simulate.run(out);
    if (name == "analyze") return analyze.run(out, err);
    if (name == "replay") return replay.run(out, err);
    if (name == "serve") return serve.run(out);
  } catch (const ConvergenceError& e) {
    err << fmt::format("{}: {}\n", name, e.what());
    return kExitNoConvergence;
  } catch (const Error& e) {
    err << fmt::format("{}: {}\n", name, e.what());
    return kExitFailure;
  } catch (const nlohmann::json::exception& e) {
    err << fmt::format("{}: {}\n", name, e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace alpha_auction::cli
