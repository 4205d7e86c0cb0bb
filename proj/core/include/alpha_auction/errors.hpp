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

#ifndef ALPHA_AUCTION_ERRORS_HPP_
#define ALPHA_AUCTION_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace alpha_auction {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bid, valuation or parameter lies outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A computation was asked to exceed a configured size cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// An operation that only makes sense for extreme-price auctions was called
// with an interior alpha (or vice versa).
class UnsupportedAuctionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition on the inputs was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete input data (logs, CSV, wire messages).
class DataError : public Error {
 public:
  using Error::Error;
};

// Fixed-point iteration stopped without reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lambda, double residual,
                   int iterations)
      : Error(what),
        lambda_(lambda),
        residual_(residual),
        iterations_(iterations) {}

  double lambda() const { return lambda_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double lambda_;
  double residual_;
  int iterations_;
};

}  // namespace alpha_auction

#endif  // ALPHA_AUCTION_ERRORS_HPP_
