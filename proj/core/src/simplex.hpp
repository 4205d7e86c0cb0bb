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

#ifndef ALPHA_AUCTION_SRC_SIMPLEX_HPP_
#define ALPHA_AUCTION_SRC_SIMPLEX_HPP_

#include <cstddef>
#include <vector>

namespace alpha_auction::detail {

// Dense two-phase simplex for the small linear programs used to measure
// distances to Nash equilibrium sets. Minimizes objective . x subject to the
// rows and x >= 0.
struct LinearProgram {
  enum class Sense { kLessEqual, kEqual };
  struct Row {
    std::vector<double> coeffs;
    double rhs;
    Sense sense;
  };

  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;
};

struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
  Status status = Status::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace alpha_auction::detail

#endif  // ALPHA_AUCTION_SRC_SIMPLEX_HPP_
