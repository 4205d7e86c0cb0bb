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

#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace alpha_auction::detail {
namespace {

constexpr double kEps = 1e-10;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& reduced,
             double& value) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (std::fabs(f) < 1e-15) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    const double f = reduced[pc];
    if (std::fabs(f) > 0.0) {
      for (std::size_t c = 0; c < cols_; ++c) reduced[c] -= f * at(pr, c);
      value += f * at(pr, cols_);
      reduced[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

// Runs simplex iterations on the current reduced-cost row. Columns flagged in
// `barred` never enter. Returns false when unbounded.
LpResult::Status iterate(Tableau& t, std::vector<double>& reduced, double& value,
                         const std::vector<bool>& barred) {
  const std::size_t max_iter = 50 * (t.rows() + t.cols()) + 1000;
  std::size_t degenerate = 0;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const bool bland = degenerate > 50;
    std::size_t enter = t.cols();
    double best = -kEps;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (barred[c] || reduced[c] >= -kEps) continue;
      if (bland) {
        enter = c;
        break;
      }
      if (reduced[c] < best) {
        best = reduced[c];
        enter = c;
      }
    }
    if (enter == t.cols()) return LpResult::Status::kOptimal;

    std::size_t leave = t.rows();
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kEps) continue;
      const double q = t.at(r, t.cols()) / a;
      if (q < ratio - 1e-12 ||
          (q <= ratio + 1e-12 && leave < t.rows() && t.basis()[r] < t.basis()[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == t.rows()) return LpResult::Status::kUnbounded;
    degenerate = ratio < 1e-12 ? degenerate + 1 : 0;
    t.pivot(leave, enter, reduced, value);
  }
  return LpResult::Status::kIterationLimit;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();

  // Normalize rows to non-negative right-hand sides.
  std::vector<int> sign(m, 1);
  std::size_t slack_count = 0;
  std::size_t art_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    if (row.rhs < 0) sign[i] = -1;
    if (row.sense == LinearProgram::Sense::kLessEqual) ++slack_count;
    // A <= row with negative rhs becomes >= and needs an artificial; so do
    // equalities.
    if (row.sense == LinearProgram::Sense::kEqual || sign[i] < 0) ++art_count;
  }
  const std::size_t cols = n + slack_count + art_count;
  Tableau t(m, cols);
  std::vector<bool> is_artificial(cols, false);

  std::size_t next_slack = n;
  std::size_t next_art = n + slack_count;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const double s = sign[i];
    for (std::size_t j = 0; j < n && j < row.coeffs.size(); ++j) t.at(i, j) = s * row.coeffs[j];
    t.rhs(i) = s * row.rhs;
    if (row.sense == LinearProgram::Sense::kLessEqual) {
      t.at(i, next_slack) = s;  // slack (+1) or surplus (-1)
      if (s > 0) t.basis()[i] = next_slack;
      ++next_slack;
    }
    if (row.sense == LinearProgram::Sense::kEqual || s < 0) {
      t.at(i, next_art) = 1.0;
      is_artificial[next_art] = true;
      t.basis()[i] = next_art;
      ++next_art;
    }
  }

  LpResult result;
  std::vector<bool> barred(cols, false);

  // Phase 1: minimize the sum of artificials.
  if (art_count > 0) {
    std::vector<double> reduced(cols, 0.0);
    double value = 0.0;
    for (std::size_t c = 0; c < cols; ++c) reduced[c] = is_artificial[c] ? 1.0 : 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[t.basis()[r]]) continue;
      for (std::size_t c = 0; c < cols; ++c) reduced[c] -= t.at(r, c);
      value -= t.rhs(r);
    }
    auto status = iterate(t, reduced, value, barred);
    if (status == LpResult::Status::kIterationLimit) {
      result.status = status;
      return result;
    }
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (is_artificial[t.basis()[r]]) infeasibility += t.rhs(r);
    }
    if (infeasibility > 1e-8) {
      result.status = LpResult::Status::kInfeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[t.basis()[r]]) continue;
      std::size_t pc = cols;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!is_artificial[c] && std::fabs(t.at(r, c)) > 1e-9) {
          pc = c;
          break;
        }
      }
      if (pc < cols) {
        t.pivot(r, pc, reduced, value);
      } else {
        for (std::size_t c = 0; c <= cols; ++c) t.at(r, c) = 0.0;  // redundant row
      }
    }
    for (std::size_t c = 0; c < cols; ++c) barred[c] = is_artificial[c];
  }

  // Phase 2.
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) cost[j] = lp.objective[j];
  std::vector<double> reduced = cost;
  double value = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cost[t.basis()[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) reduced[c] -= cb * t.at(r, c);
    value -= cb * t.rhs(r);
  }
  auto status = iterate(t, reduced, value, barred);
  result.status = status;
  if (status != LpResult::Status::kOptimal) return result;

  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis()[r] < n) result.x[t.basis()[r]] = t.rhs(r);
  }
  result.value = 0.0;
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) {
    result.value += lp.objective[j] * result.x[j];
  }
  return result;
}

}  // namespace alpha_auction::detail
