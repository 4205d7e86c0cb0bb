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

#ifndef ALPHA_AUCTION_TOOLS_CLI_HPP_
#define ALPHA_AUCTION_TOOLS_CLI_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alpha_auction/analytics.hpp"
#include "alpha_auction/rational.hpp"

namespace alpha_auction::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNoConvergence = 3;

// `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "start:step:end", both ends included. DomainError when malformed.
std::vector<double> parse_grid(std::string_view text);

// Summary table CSV, then a "# ordering" line when the rows cover WB, AB
// and LB for some structure: blocks are structure x role with standardized
// payoffs listed in the direction the bias predicts (HV: LB, AB, WB; LV:
// WB, AB, LB), tested with increasing_blocks. `seed` only matters when
// the test falls back to Monte Carlo.
void write_log_summary(std::ostream& out, std::span<const analytics::LogRow> rows,
                       std::uint64_t seed);

}  // namespace alpha_auction::cli

#endif  // ALPHA_AUCTION_TOOLS_CLI_HPP_
